#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/errors.hpp"

namespace wiretap {

// All information quantities are in bits (log base 2).
using Bits = double;

// Construction-time normalization tolerance for pmf tables.
inline constexpr double kNormTol = 1e-12;
// Entries below this are structural zeros in log computations (0 log 0 = 0).
inline constexpr double kStructuralZero = 1e-15;
// Information quantities within this of zero from below are clamped to 0;
// anything more negative signals a corrupted table and raises an error.
inline constexpr double kInfoClampTol = 1e-12;

struct Alphabet {
  std::string name;
  int size = 0;
};

inline void validate_alphabet(const Alphabet& a) {
  if (a.name.empty()) throw validation_error("alphabet has empty name");
  if (a.size < 1) throw validation_error("alphabet '" + a.name + "' has size < 1");
}

inline double xlog2(double p) {
  return p < kStructuralZero ? 0.0 : p * std::log2(p);
}

// Entropy of a raw nonnegative table, summed in index order.
inline Bits entropy_of_table(std::span<const double> table) {
  double h = 0.0;
  for (double p : table) h -= xlog2(p);
  return h;
}

inline Bits binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw validation_error("binary_entropy: argument outside [0,1]");
  return -xlog2(q) - xlog2(1.0 - q);
}

// Smaller root q in [0, 1/2] of binary_entropy(q) = bits, by bisection to 1e-12.
inline double binary_entropy_inverse(Bits bits) {
  if (!(bits >= 0.0 && bits <= 1.0))
    throw validation_error("binary_entropy_inverse: argument outside [0,1]");
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < bits ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double clamp_information(double v, const char* what) {
  if (v < -kInfoClampTol)
    throw consistency_error(std::string(what) +
                            " is significantly negative (" + std::to_string(v) +
                            "); table is corrupted");
  return v < 0.0 ? 0.0 : v;
}

// A labeled joint pmf over a tuple of named finite variables, stored
// row-major (last variable fastest). Immutable after construction; all
// measures are pure functions with fixed index-order summation so results
// are bit-reproducible.
class JointPmf {
 public:
  JointPmf(std::vector<Alphabet> variables, std::vector<double> table)
      : vars_(std::move(variables)), table_(std::move(table)) {
    validate();
    init_strides();
  }

  // For internally produced tables whose mass is preserved by construction.
  static JointPmf unchecked(std::vector<Alphabet> variables, std::vector<double> table) {
    return JointPmf(Internal{}, std::move(variables), std::move(table));
  }

  const std::vector<Alphabet>& variables() const { return vars_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t cells() const { return table_.size(); }

  std::size_t variable_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == name) return i;
    throw validation_error("unknown variable '" + std::string(name) + "'");
  }

  double probability(std::span<const int> symbols) const {
    if (symbols.size() != vars_.size())
      throw validation_error("probability: symbol tuple arity mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) idx += strides_[i] * symbols[i];
    return table_[idx];
  }

  // Sums out all variables not in `keep`; the result's variables follow the
  // order of `keep`.
  JointPmf marginalize(const std::vector<std::string>& keep) const {
    const auto idx = resolve(keep, "marginalize");
    std::vector<Alphabet> vars;
    vars.reserve(idx.size());
    for (std::size_t i : idx) vars.push_back(vars_[i]);
    return JointPmf::unchecked(std::move(vars), marginal_table(idx));
  }

  Bits entropy(const std::vector<std::string>& vars) const {
    const auto idx = resolve(vars, "entropy");
    return entropy_of_table(marginal_table(idx));
  }

  // H(target | given) = H(target, given) - H(given); >= 0 after clamping.
  Bits conditional_entropy(const std::vector<std::string>& target,
                           const std::vector<std::string>& given) const {
    require_disjoint(target, given, "conditional_entropy");
    if (given.empty()) return entropy(target);
    const double h = entropy(concat(target, given)) - entropy(given);
    return clamp_information(h, "conditional entropy");
  }

  // I(a; b) = H(a) + H(b) - H(a, b); >= 0 after clamping.
  Bits mutual_information(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) const {
    require_disjoint(a, b, "mutual_information");
    const double i = entropy(a) + entropy(b) - entropy(concat(a, b));
    return clamp_information(i, "mutual information");
  }

  // I(a; b | c) = H(a,c) + H(b,c) - H(a,b,c) - H(c); c may be empty.
  Bits conditional_mutual_information(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c) const {
    require_disjoint(a, b, "conditional_mutual_information");
    require_disjoint(a, c, "conditional_mutual_information");
    require_disjoint(b, c, "conditional_mutual_information");
    if (c.empty()) return mutual_information(a, b);
    const double i = entropy(concat(a, c)) + entropy(concat(b, c)) -
                     entropy(concat(concat(a, b), c)) - entropy(c);
    return clamp_information(i, "conditional mutual information");
  }

 private:
  struct Internal {};
  JointPmf(Internal, std::vector<Alphabet> variables, std::vector<double> table)
      : vars_(std::move(variables)), table_(std::move(table)) {
    init_strides();
  }

  void validate() const {
    if (vars_.empty()) throw validation_error("JointPmf needs at least one variable");
    std::size_t cells = 1;
    for (const auto& a : vars_) {
      validate_alphabet(a);
      cells *= static_cast<std::size_t>(a.size);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (std::size_t j = i + 1; j < vars_.size(); ++j)
        if (vars_[i].name == vars_[j].name)
          throw validation_error("duplicate variable name '" + vars_[i].name + "'");
    if (cells != table_.size())
      throw validation_error("JointPmf table size " + std::to_string(table_.size()) +
                             " does not match variable dimensions " + std::to_string(cells));
    double sum = 0.0;
    for (double p : table_) {
      if (p < 0.0) throw validation_error("JointPmf has a negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTol)
      throw validation_error("JointPmf not normalized: sum = " + std::to_string(sum));
  }

  void init_strides() {
    strides_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 1;)
      strides_[i - 1] = strides_[i] * static_cast<std::size_t>(vars_[i].size);
  }

  std::vector<std::size_t> resolve(const std::vector<std::string>& names,
                                   const char* op) const {
    if (names.empty())
      throw validation_error(std::string(op) + ": variable subset is empty");
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
      const std::size_t i = variable_index(n);
      if (std::find(idx.begin(), idx.end(), i) != idx.end())
        throw validation_error(std::string(op) + ": variable '" + n + "' repeated");
      idx.push_back(i);
    }
    return idx;
  }

  static void require_disjoint(const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const char* op) {
    for (const auto& x : a)
      for (const auto& y : b)
        if (x == y)
          throw validation_error(std::string(op) + ": subsets overlap on '" + x + "'");
  }

  static std::vector<std::string> concat(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  // Accumulates in source index order: fixed summation order by design.
  std::vector<double> marginal_table(const std::vector<std::size_t>& keep) const {
    std::vector<std::size_t> out_stride(vars_.size(), 0);
    std::size_t out_cells = 1;
    for (std::size_t i = keep.size(); i-- > 0;) {
      out_stride[keep[i]] = out_cells;
      out_cells *= static_cast<std::size_t>(vars_[keep[i]].size);
    }
    std::vector<double> out(out_cells, 0.0);
    std::vector<int> digit(vars_.size(), 0);
    for (std::size_t idx = 0; idx < table_.size(); ++idx) {
      std::size_t t = 0;
      for (std::size_t v = 0; v < vars_.size(); ++v) t += out_stride[v] * digit[v];
      out[t] += table_[idx];
      for (std::size_t v = vars_.size(); v-- > 0;) {
        if (++digit[v] < vars_[v].size) break;
        digit[v] = 0;
      }
    }
    return out;
  }

  std::vector<Alphabet> vars_;
  std::vector<double> table_;
  std::vector<std::size_t> strides_;
};

// Free-function spellings of the measures.
inline Bits entropy(const JointPmf& p, const std::vector<std::string>& vars) {
  return p.entropy(vars);
}
inline Bits conditional_entropy(const JointPmf& p, const std::vector<std::string>& target,
                                const std::vector<std::string>& given) {
  return p.conditional_entropy(target, given);
}
inline Bits mutual_information(const JointPmf& p, const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  return p.mutual_information(a, b);
}
inline Bits conditional_mutual_information(const JointPmf& p,
                                           const std::vector<std::string>& a,
                                           const std::vector<std::string>& b,
                                           const std::vector<std::string>& c) {
  return p.conditional_mutual_information(a, b, c);
}
inline JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep) {
  return p.marginalize(keep);
}

}  // namespace wiretap
