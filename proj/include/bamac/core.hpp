// Channel model, capacity term and the layer-indexed containers shared by
// every other header.
//
// Layer indices (u, v) are 1-based throughout the public API: stream W^i_uv
// of user i is the layer adapted to the joint state in which user i sees
// gain alpha_v and the other user sees alpha_u.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bamac {

/// Absolute tolerance used for every equality and feasibility test.
inline constexpr double kTolerance = 1e-12;

namespace detail {

// Snap tiny negative round-off (e.g. 1 - sum of fractions) to zero.
inline double clamp_round_off(double x) {
  return (x < 0.0 && x > -kTolerance) ? 0.0 : x;
}

inline std::string join(const std::vector<std::string>& parts,
                        const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// Gaussian rate of signal power x against interference y, with unit noise
/// and power budget P: 0.5 * log2(1 + x / (y + 1/P)).
inline double cap_term(double x, double y, double power) {
  if (!(power > 0.0)) throw std::domain_error("cap_term: power must be > 0");
  x = detail::clamp_round_off(x);
  y = detail::clamp_round_off(y);
  if (!(x >= 0.0)) throw std::domain_error("cap_term: signal must be >= 0");
  if (!(y >= 0.0))
    throw std::domain_error("cap_term: interference must be >= 0");
  return 0.5 * std::log2(1.0 + x / (y + 1.0 / power));
}

/// Square ell x ell map indexed by 1-based layer indices (u, v).
template <typename T>
class LayerGrid {
 public:
  LayerGrid() = default;
  explicit LayerGrid(int ell, T fill = T{})
      : ell_(ell), data_(static_cast<std::size_t>(ell) * ell, fill) {
    if (ell < 1) throw std::invalid_argument("LayerGrid: ell must be >= 1");
  }

  /// Builds from rows; rows.size() defines ell and every row must match it.
  static LayerGrid from_rows(const std::vector<std::vector<T>>& rows) {
    LayerGrid g(static_cast<int>(rows.size()));
    for (int u = 1; u <= g.ell_; ++u) {
      const auto& row = rows[static_cast<std::size_t>(u - 1)];
      if (static_cast<int>(row.size()) != g.ell_)
        throw std::invalid_argument("LayerGrid: rows must form a square map");
      for (int v = 1; v <= g.ell_; ++v) g(u, v) = row[static_cast<std::size_t>(v - 1)];
    }
    return g;
  }

  int ell() const { return ell_; }

  T& operator()(int u, int v) { return data_[offset(u, v)]; }
  const T& operator()(int u, int v) const { return data_[offset(u, v)]; }

  /// Row-major flat view: entry (u, v) sits at (u-1)*ell + (v-1).
  const std::vector<T>& flat() const { return data_; }
  std::vector<T>& flat() { return data_; }

  std::vector<std::vector<T>> rows() const {
    std::vector<std::vector<T>> out(static_cast<std::size_t>(ell_));
    for (int u = 1; u <= ell_; ++u)
      for (int v = 1; v <= ell_; ++v)
        out[static_cast<std::size_t>(u - 1)].push_back((*this)(u, v));
    return out;
  }

  T sum() const { return std::accumulate(data_.begin(), data_.end(), T{}); }

  friend bool operator==(const LayerGrid&, const LayerGrid&) = default;

 private:
  std::size_t offset(int u, int v) const {
    if (u < 1 || u > ell_ || v < 1 || v > ell_) {
      std::ostringstream os;
      os << "layer index (" << u << ',' << v << ") outside 1.." << ell_;
      throw std::out_of_range(os.str());
    }
    return static_cast<std::size_t>(u - 1) * ell_ + static_cast<std::size_t>(v - 1);
  }

  int ell_ = 0;
  std::vector<T> data_;
};

using LayerMap = LayerGrid<double>;

/// Fading model: ell gains per user, identical state law for both users.
struct ChannelModel {
  int ell = 0;
  std::vector<double> alphas;  // linear power gains, strictly increasing
  double power = 0.0;          // per-user power P (noise variance 1)
  std::vector<double> probs;   // P(h_i^2 = alpha_m)

  double alpha(int m) const { return alphas.at(static_cast<std::size_t>(m - 1)); }
  double prob(int m) const { return probs.at(static_cast<std::size_t>(m - 1)); }

  /// Two-state model with P(weak) = p_weak.
  static ChannelModel two_state(double alpha1, double alpha2, double power,
                                double p_weak) {
    return ChannelModel{2, {alpha1, alpha2}, power, {p_weak, 1.0 - p_weak}};
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string message() const { return detail::join(violations, "; "); }
};

inline ValidationReport validate_model(const ChannelModel& m) {
  ValidationReport r;
  if (m.ell < 1) r.violations.push_back("ell must be a positive integer");
  if (static_cast<int>(m.alphas.size()) != m.ell)
    r.violations.push_back("alphas must hold exactly ell entries");
  if (static_cast<int>(m.probs.size()) != m.ell)
    r.violations.push_back("probs must hold exactly ell entries");
  if (!m.alphas.empty() && !(m.alphas.front() > 0.0))
    r.violations.push_back("alphas must be strictly positive");
  for (std::size_t i = 1; i < m.alphas.size(); ++i) {
    if (!(m.alphas[i] > m.alphas[i - 1])) {
      r.violations.push_back("alphas must be strictly increasing");
      break;
    }
  }
  for (double a : m.alphas) {
    if (!std::isfinite(a)) {
      r.violations.push_back("alphas must be finite");
      break;
    }
  }
  if (!(m.power > 0.0) || !std::isfinite(m.power))
    r.violations.push_back("power must be > 0");
  bool negative = false;
  double total = 0.0;
  for (double p : m.probs) {
    if (!(p >= 0.0)) negative = true;
    total += p;
  }
  if (negative) r.violations.push_back("probs must be nonnegative");
  if (!m.probs.empty() && !(std::abs(total - 1.0) <= kTolerance))
    r.violations.push_back("probs must sum to 1");
  return r;
}

inline void require_valid(const ChannelModel& m) {
  auto r = validate_model(m);
  if (!r.ok()) throw std::invalid_argument("invalid channel model: " + r.message());
}

/// Per-user power fractions on the ell x ell layer simplex.
class PowerAllocation {
 public:
  PowerAllocation() = default;

  /// Both users share one map (beta^1 = beta^2).
  static PowerAllocation symmetric(LayerMap betas) {
    PowerAllocation pa;
    pa.user1_ = std::move(betas);
    pa.user2_ = pa.user1_;
    pa.symmetric_ = true;
    pa.validate();
    return pa;
  }

  static PowerAllocation asymmetric(LayerMap user1, LayerMap user2) {
    if (user1.ell() != user2.ell())
      throw std::invalid_argument("PowerAllocation: user maps differ in size");
    PowerAllocation pa;
    pa.user1_ = std::move(user1);
    pa.user2_ = std::move(user2);
    pa.symmetric_ = false;
    pa.validate();
    return pa;
  }

  /// ell = 2 shorthand in (b11, b12, b21, b22) order.
  static PowerAllocation two_state(double b11, double b12, double b21, double b22) {
    LayerMap b(2);
    b(1, 1) = b11;
    b(1, 2) = b12;
    b(2, 1) = b21;
    b(2, 2) = b22;
    return symmetric(std::move(b));
  }

  int ell() const { return user1_.ell(); }
  bool declared_symmetric() const { return symmetric_; }

  /// True for the symmetric flavor, or when both maps agree entrywise.
  bool is_symmetric() const {
    if (symmetric_) return true;
    for (std::size_t i = 0; i < user1_.flat().size(); ++i)
      if (std::abs(user1_.flat()[i] - user2_.flat()[i]) > kTolerance) return false;
    return true;
  }

  const LayerMap& user(int i) const {
    if (i == 1) return user1_;
    if (i == 2) return user2_;
    throw std::out_of_range("PowerAllocation: user must be 1 or 2");
  }

  /// The shared map; throws for a genuinely asymmetric allocation.
  const LayerMap& shared() const {
    if (!is_symmetric())
      throw std::invalid_argument("operation requires a symmetric power allocation");
    return user1_;
  }

 private:
  void validate() const {
    for (const LayerMap* m : {&user1_, &user2_}) {
      for (double b : m->flat()) {
        if (!(b >= -kTolerance && b <= 1.0 + kTolerance))
          throw std::invalid_argument("PowerAllocation: fractions must lie in [0,1]");
      }
      if (!(std::abs(m->sum() - 1.0) <= kTolerance))
        throw std::invalid_argument("PowerAllocation: fractions must sum to 1");
    }
  }

  LayerMap user1_;
  LayerMap user2_;
  bool symmetric_ = true;
};

/// Symmetric stream rates R_uv = R^1_uv = R^2_uv in bits per channel use.
class RateVector {
 public:
  RateVector() = default;
  explicit RateVector(int ell) : rates_(ell, 0.0) {}
  explicit RateVector(LayerMap rates) : rates_(std::move(rates)) {
    for (double r : rates_.flat())
      if (!(r >= 0.0)) throw std::invalid_argument("RateVector: rates must be >= 0");
  }

  static RateVector two_state(double r11, double r12, double r21, double r22) {
    LayerMap m(2);
    m(1, 1) = r11;
    m(1, 2) = r12;
    m(2, 1) = r21;
    m(2, 2) = r22;
    return RateVector(std::move(m));
  }

  int ell() const { return rates_.ell(); }
  double operator()(int u, int v) const { return rates_(u, v); }
  void set(int u, int v, double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("RateVector: rates must be >= 0");
    rates_(u, v) = r;
  }
  const LayerMap& map() const { return rates_; }

  friend bool operator==(const RateVector&, const RateVector&) = default;

 private:
  LayerMap rates_;
};

}  // namespace bamac
