// Grid enumeration of symmetric power allocations on the ell x ell simplex.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bamac/core.hpp"

namespace bamac {

/// Number of grid steps for a resolution; throws unless 1/resolution is an
/// integer within 1e-9.
inline int simplex_steps(double resolution) {
  if (!(resolution > 0.0 && resolution <= 1.0))
    throw std::invalid_argument("simplex grid: resolution must lie in (0,1]");
  const double inv = 1.0 / resolution;
  const double n = std::round(inv);
  if (std::abs(inv - n) > 1e-9)
    throw std::invalid_argument("simplex grid: 1/resolution must be an integer");
  return static_cast<int>(n);
}

/// C(n + d - 1, d - 1): compositions of n into d nonnegative parts.
inline std::uint64_t composition_count(int parts, int total) {
  const int k = parts - 1;
  const int top = total + parts - 1;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(top - k + i) / i;
  return c;
}

/// Visits every composition of `total` into `parts` nonnegative integers in
/// lexicographic order (first part ascending slowest).
inline void for_each_composition(int parts, int total,
                                 const std::function<void(const std::vector<int>&)>& fn) {
  if (parts < 1) throw std::invalid_argument("for_each_composition: parts must be >= 1");
  std::vector<int> c(static_cast<std::size_t>(parts), 0);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == parts - 1) {
      c[static_cast<std::size_t>(idx)] = left;
      fn(c);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      c[static_cast<std::size_t>(idx)] = k;
      rec(idx + 1, left - k);
    }
  };
  rec(0, total);
}

inline std::uint64_t simplex_point_count(int ell, double resolution) {
  return composition_count(ell * ell, simplex_steps(resolution));
}

/// Streams every symmetric allocation whose fractions are multiples of
/// `resolution`, lexicographic over row-major (u, v).
inline void for_each_simplex_point(int ell, double resolution,
                                   const std::function<void(const PowerAllocation&)>& fn) {
  if (ell < 1) throw std::invalid_argument("simplex grid: ell must be >= 1");
  const int n = simplex_steps(resolution);
  for_each_composition(ell * ell, n, [&](const std::vector<int>& c) {
    LayerMap b(ell);
    for (std::size_t i = 0; i < c.size(); ++i)
      b.flat()[i] = static_cast<double>(c[i]) / n;
    fn(PowerAllocation::symmetric(std::move(b)));
  });
}

inline std::vector<PowerAllocation> simplex_grid(int ell, double resolution) {
  std::vector<PowerAllocation> out;
  for_each_simplex_point(ell, resolution,
                         [&](const PowerAllocation& pa) { out.push_back(pa); });
  return out;
}

}  // namespace bamac
