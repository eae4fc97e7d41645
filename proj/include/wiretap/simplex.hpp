#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wiretap/errors.hpp"

namespace wiretap {

// Number of grid points on the (dim-1)-simplex with step 1/resolution:
// C(resolution + dim - 1, dim - 1). Throws on 64-bit overflow.
inline std::uint64_t simplex_grid_size(int dim, int resolution) {
  if (dim < 1) throw validation_error("simplex_grid_size: dim < 1");
  if (resolution < 1) throw validation_error("simplex_grid_size: resolution < 1");
  std::uint64_t result = 1;
  for (int i = 1; i < dim; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(resolution) + i;
    if (result > UINT64_MAX / num)
      throw resource_error("simplex grid size overflows 64 bits");
    result = result * num / i;
  }
  return result;
}

// Enumerates all compositions of `resolution` into `dim` nonnegative parts,
// scaled by 1/resolution, in lexicographic order of the composition vector
// (first coordinate ascending). The callback receives a reused buffer.
template <class Fn>
void for_each_simplex_point(int dim, int resolution, Fn&& fn) {
  if (dim < 1) throw validation_error("for_each_simplex_point: dim < 1");
  if (resolution < 1) throw validation_error("for_each_simplex_point: resolution < 1");
  std::vector<int> parts(dim, 0);
  std::vector<double> point(dim, 0.0);
  const double inv = 1.0 / resolution;
  // recursion via explicit loop over prefix sums
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == dim - 1) {
      parts[pos] = remaining;
      for (int i = 0; i < dim; ++i) point[i] = parts[i] * inv;
      fn(std::span<const double>(point));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      parts[pos] = c;
      rec(pos + 1, remaining - c);
    }
  };
  rec(0, resolution);
}

// Materialized grid, capped. `cap` bounds the number of points; exceeding it
// is a resource error that states the required cap.
inline std::vector<std::vector<double>> simplex_grid(int dim, int resolution,
                                                     std::uint64_t cap = 100000000ull) {
  const std::uint64_t count = simplex_grid_size(dim, resolution);
  if (count > cap)
    throw resource_error("simplex grid has " + std::to_string(count) +
                         " points; raise the cap to at least " + std::to_string(count));
  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for_each_simplex_point(dim, resolution, [&](std::span<const double> p) {
    grid.emplace_back(p.begin(), p.end());
  });
  return grid;
}

}  // namespace wiretap
