// Polyhedral rate regions: lists of linear upper bounds over symmetric
// stream rates, valid for one power allocation.

#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bamac/core.hpp"

namespace bamac {

struct RateConstraint {
  LayerGrid<int> coeffs;  // entries in {0, 1, 2}
  double bound = 0.0;     // >= 0
  std::string tag;        // which bound generated the row

  double lhs(const RateVector& rv) const {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.flat().size(); ++i)
      s += coeffs.flat()[i] * rv.map().flat()[i];
    return s;
  }

  /// Human-readable form, e.g. "2 R12 + R21 <= 1.25".
  std::string describe() const {
    std::ostringstream os;
    bool first = true;
    for (int u = 1; u <= coeffs.ell(); ++u) {
      for (int v = 1; v <= coeffs.ell(); ++v) {
        const int c = coeffs(u, v);
        if (!c) continue;
        if (!first) os << " + ";
        if (c != 1) os << c << ' ';
        os << 'R' << u << v;
        first = false;
      }
    }
    if (first) os << '0';
    os << " <= " << bound;
    return os.str();
  }
};

struct ConstraintViolation {
  std::string tag;
  std::string description;
  double lhs = 0.0;
  double bound = 0.0;
};

class RateRegion {
 public:
  RateRegion() = default;
  explicit RateRegion(int ell) : ell_(ell) {}

  int ell() const { return ell_; }
  const std::vector<RateConstraint>& constraints() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Appends sum_k coeff_k * R_{u_k v_k} <= bound.
  void add(std::initializer_list<std::pair<std::pair<int, int>, int>> terms,
           double bound, std::string tag) {
    LayerGrid<int> c(ell_, 0);
    for (const auto& [uv, k] : terms) {
      if (k < 0 || k > 2)
        throw std::invalid_argument("RateRegion: coefficients must lie in {0,1,2}");
      c(uv.first, uv.second) += k;
    }
    if (!(bound >= 0.0)) throw std::invalid_argument("RateRegion: bound must be >= 0");
    rows_.push_back(RateConstraint{std::move(c), bound, std::move(tag)});
  }

  std::vector<ConstraintViolation> violations(const RateVector& rv,
                                              double tol = kTolerance) const {
    if (rv.ell() != ell_)
      throw std::invalid_argument("RateRegion: rate vector dimension mismatch");
    std::vector<ConstraintViolation> out;
    for (const auto& row : rows_) {
      const double l = row.lhs(rv);
      if (l > row.bound + tol) out.push_back({row.tag, row.describe(), l, row.bound});
    }
    return out;
  }

  bool contains(const RateVector& rv, double tol = kTolerance) const {
    return violations(rv, tol).empty();
  }

 private:
  int ell_ = 0;
  std::vector<RateConstraint> rows_;
};

}  // namespace bamac
