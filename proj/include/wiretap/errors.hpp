#pragma once

#include <stdexcept>
#include <string>

namespace wiretap {

// Error taxonomy, mirrored by the CLI exit codes:
//   validation_error  -> 2 (bad inputs, contract violations, parse failures)
//   resource_error    -> 3 (enumeration/evaluation budget exceeded)
//   consistency_error -> 4 (internal cross-checks disagree; indicates a bug)
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class validation_error : public error {
 public:
  using error::error;
};

class resource_error : public error {
 public:
  using error::error;
};

class consistency_error : public error {
 public:
  using error::error;
};

}  // namespace wiretap
