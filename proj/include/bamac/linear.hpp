// Exact maximization of a nonnegative linear objective over a rate region
// by vertex enumeration.
//
// Rows with all-nonnegative coefficients couple only the rates they touch,
// so the region splits into independent blocks (one per diagonal layer and
// one per pair {uv, vu} for the achievable regions). Each block is at most a
// few dimensions; every vertex is the solution of d tight rows chosen among
// the block's constraints and the axes R >= 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bamac/core.hpp"
#include "bamac/rate_region.hpp"

namespace bamac {

struct LinearOptimum {
  double value = 0.0;
  RateVector arg;
};

namespace detail {

inline constexpr int kMaxBlockDim = 6;
inline constexpr double kFeasTol = 1e-10;

// Solves A x = rhs (n x n, row-major) by Gaussian elimination with partial
// pivoting; false when singular.
inline bool solve_dense(std::vector<double> a, std::vector<double> rhs, int n,
                        std::vector<double>& x) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < 1e-12) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(rhs[col], rhs[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return true;
}

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// True when a is lexicographically smaller than b beyond tolerance.
inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - kTolerance) return true;
    if (a[i] > b[i] + kTolerance) return false;
  }
  return false;
}

}  // namespace detail

/// Maximizes sum objective(u,v) * R_uv over the region. Ties within 1e-12
/// resolve to the lexicographically smallest maximizer (row-major order).
inline LinearOptimum maximize_linear(const RateRegion& region, const LayerMap& objective) {
  const int ell = region.ell();
  if (objective.ell() != ell)
    throw std::invalid_argument("maximize_linear: objective dimension differs from region");
  for (double c : objective.flat())
    if (!(c >= 0.0)) throw std::invalid_argument("maximize_linear: objective must be >= 0");

  const int dims = ell * ell;
  const auto& rows = region.constraints();

  // Union-find over coordinates sharing a row.
  std::vector<int> parent(static_cast<std::size_t>(dims));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::vector<bool> touched(static_cast<std::size_t>(dims), false);
  for (const auto& row : rows) {
    int first = -1;
    for (int i = 0; i < dims; ++i) {
      if (!row.coeffs.flat()[i]) continue;
      touched[i] = true;
      if (first < 0) first = i;
      else parent[find(i)] = find(first);
    }
  }

  std::vector<double> arg(static_cast<std::size_t>(dims), 0.0);
  double value = 0.0;
  for (int i = 0; i < dims; ++i)
    if (!touched[i] && objective.flat()[i] > 0.0)
      throw std::invalid_argument("maximize_linear: objective is unbounded on the region");

  std::vector<bool> done(static_cast<std::size_t>(dims), false);
  for (int root = 0; root < dims; ++root) {
    if (!touched[root] || done[find(root)]) continue;
    const int rep = find(root);
    done[rep] = true;
    std::vector<int> vars;
    for (int i = 0; i < dims; ++i)
      if (touched[i] && find(i) == rep) vars.push_back(i);
    const int d = static_cast<int>(vars.size());
    if (d > detail::kMaxBlockDim)
      throw std::invalid_argument("maximize_linear: coupled block too large for vertex enumeration");

    // Block rows: region rows touching the block, then -R_i <= 0.
    std::vector<std::vector<double>> a;
    std::vector<double> rhs;
    for (const auto& row : rows) {
      bool hit = false;
      std::vector<double> coef(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) {
        coef[k] = row.coeffs.flat()[vars[k]];
        hit = hit || coef[k] != 0.0;
      }
      if (!hit) continue;
      a.push_back(std::move(coef));
      rhs.push_back(row.bound);
    }
    for (int k = 0; k < d; ++k) {
      std::vector<double> coef(static_cast<std::size_t>(d), 0.0);
      coef[k] = -1.0;
      a.push_back(std::move(coef));
      rhs.push_back(0.0);
    }

    const int nrows = static_cast<int>(a.size());
    bool found = false;
    double best = 0.0;
    std::vector<double> best_x;
    std::vector<double> x;
    detail::for_each_subset(nrows, d, [&](const std::vector<int>& pick) {
      std::vector<double> m(static_cast<std::size_t>(d * d));
      std::vector<double> b(static_cast<std::size_t>(d));
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) m[r * d + c] = a[pick[r]][c];
        b[r] = rhs[pick[r]];
      }
      if (!detail::solve_dense(m, b, d, x)) return;
      for (double& xi : x)
        if (xi < 0.0 && xi > -detail::kFeasTol) xi = 0.0;
      for (int r = 0; r < nrows; ++r) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += a[r][c] * x[c];
        if (s > rhs[r] + detail::kFeasTol) return;
      }
      double val = 0.0;
      for (int k = 0; k < d; ++k) val += objective.flat()[vars[k]] * x[k];
      if (!found || val > best + kTolerance ||
          (std::abs(val - best) <= kTolerance && detail::lex_less(x, best_x))) {
        if (!found || val > best + kTolerance) best = val;
        best_x = x;
        found = true;
      }
    });
    if (!found) throw std::logic_error("maximize_linear: no feasible vertex");
    for (int k = 0; k < d; ++k) arg[vars[k]] = best_x[k];
  }

  for (int i = 0; i < dims; ++i) value += objective.flat()[i] * arg[i];
  LayerMap out(ell);
  out.flat() = arg;
  return LinearOptimum{value, RateVector(std::move(out))};
}

}  // namespace bamac
