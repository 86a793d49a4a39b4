// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's bound formulas.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double cap(double x, double y, double power) {
  return 0.5 * std::log2(1.0 + x / (y + 1.0 / power));
}

/// Seven two-state bounds written out from the closed forms.
struct Terms {
  double r11, r12, r21, r1, r12p, r21p, r22;
};

inline Terms two_state_terms(double a1, double a2, double P, double b11, double b12, double b21,
                             double b22) {
  auto C = [P](double x, double y) { return cap(x, y, P); };
  const double mix = a1 * (b12 + b22) + a2 * (b21 + b22);
  Terms t{};
  t.r11 = std::min(C(a1 * b11, (a1 + a2) * (1 - b11)), 0.5 * C(2 * a1 * b11, 2 * a1 * (1 - b11)));
  t.r12 = std::min(C(a2 * b12, mix), 0.5 * C(2 * a2 * b12, 2 * a2 * b22));
  t.r21 = std::min(C(a1 * b21, mix), 0.5 * C(2 * a2 * b21, 2 * a2 * b22));
  t.r1 = std::min(C(a1 * b21 + a2 * b12, mix), 0.5 * C(2 * a2 * (b12 + b21), 2 * a2 * b22));
  t.r12p = C(a2 * (2 * b12 + b21), 2 * a2 * b22);
  t.r21p = C(a2 * (b12 + 2 * b21), 2 * a2 * b22);
  t.r22 = 0.5 * C(2 * a2 * b22, 0);
  return t;
}

/// Uniform point on the probability simplex with n parts.
inline std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  double s = 0.0;
  for (double& v : x) s += (v = e(rng));
  for (double& v : x) v /= s;
  double t = 0.0;
  for (int i = 0; i + 1 < n; ++i) t += x[i];
  x.back() = 1.0 - t;
  if (x.back() < 0.0) x.back() = 0.0;
  return x;
}

/// Brute-force maximum of w1 x + w2 y over the pair block
/// {x <= r12, y <= r21, x + y <= r1, 2x + y <= r12p, x + 2y <= r21p, x, y >= 0}
/// on a square grid of the given step.
inline double grid_pair_max(const Terms& t, double w1, double w2, double step) {
  double best = 0.0;
  const double hx = std::max(t.r12, 0.0), hy = std::max(t.r21, 0.0);
  const long nx = static_cast<long>(hx / step), ny = static_cast<long>(hy / step);
  for (long i = 0; i <= nx; ++i) {
    const double x = i * step;
    for (long j = 0; j <= ny; ++j) {
      const double y = j * step;
      if (x + y > t.r1 || 2 * x + y > t.r12p || x + 2 * y > t.r21p) break;
      best = std::max(best, w1 * x + w2 * y);
    }
  }
  return best;
}

/// Vertices of the same pair block by intersecting every pair of boundary
/// lines (a x + b y = c) and keeping the feasible ones.
inline std::vector<std::pair<double, double>> pair_vertices(const Terms& t) {
  struct Line {
    double a, b, c;
  };
  const std::vector<Line> lines = {{1, 0, t.r12}, {0, 1, t.r21}, {1, 1, t.r1},
                                   {2, 1, t.r12p}, {1, 2, t.r21p}, {1, 0, 0}, {0, 1, 0}};
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line& p = lines[i];
      const Line& q = lines[j];
      const double det = p.a * q.b - p.b * q.a;
      if (std::abs(det) < 1e-14) continue;
      const double x = (p.c * q.b - p.b * q.c) / det;
      const double y = (p.a * q.c - p.c * q.a) / det;
      const double eps = 1e-11;
      if (x < -eps || y < -eps || x > t.r12 + eps || y > t.r21 + eps || x + y > t.r1 + eps ||
          2 * x + y > t.r12p + eps || x + 2 * y > t.r21p + eps)
        continue;
      out.emplace_back(std::max(x, 0.0), std::max(y, 0.0));
    }
  }
  return out;
}

}  // namespace oracle
