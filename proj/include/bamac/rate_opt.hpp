// Average rates, power-allocation search and weak/strong frontier tracing.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bamac/core.hpp"
#include "bamac/linear.hpp"
#include "bamac/multi_state.hpp"
#include "bamac/rate_region.hpp"
#include "bamac/simplex.hpp"
#include "bamac/two_state.hpp"

namespace bamac {

/// Achievable region for a symmetric allocation: the two-state closed form
/// when ell = 2, the general construction otherwise.
inline RateRegion achievable_region(const ChannelModel& m, const PowerAllocation& pa) {
  if (m.ell == 2) return two_state::inner_region(m, pa);
  return multi_state::general_region(m, pa);
}

// ---------------------------------------------------------------------------
// Average rate

/// 2 [R11 + (1-p)(R12 + R21) + (1-p)^2 R22] with p = P(weak).
inline double average_rate(const RateVector& rv, double p_weak) {
  if (rv.ell() != 2) throw std::invalid_argument("average_rate: requires a 2x2 rate vector");
  if (!(p_weak >= 0.0 && p_weak <= 1.0))
    throw std::domain_error("average_rate: p must lie in [0,1]");
  const double s = 1.0 - p_weak;
  return 2.0 * (rv(1, 1) + s * (rv(1, 2) + rv(2, 1)) + s * s * rv(2, 2));
}

/// Expected decoded sum rate: sum over joint states of
/// P(h2 = alpha_p) P(h1 = alpha_q) times the rates decoded at (p, q).
inline double average_rate_general(const ChannelModel& m, const RateVector& rv,
                                   const multi_state::DecodeTable& table) {
  require_valid(m);
  if (rv.ell() != m.ell || table.ell() != m.ell)
    throw std::invalid_argument("average_rate_general: dimension mismatch");
  double total = 0.0;
  for (int p = 1; p <= m.ell; ++p) {
    for (int q = 1; q <= m.ell; ++q) {
      double decoded = 0.0;
      for (const auto& s : table.at(p, q)) decoded += rv(s.u, s.v);
      total += m.prob(p) * m.prob(q) * decoded;
    }
  }
  return total;
}

/// Linear weights w_uv with average_rate_general = sum w_uv R_uv.
inline LayerMap average_rate_weights(const ChannelModel& m,
                                     const multi_state::DecodeTable& table) {
  LayerMap w(m.ell, 0.0);
  for (int p = 1; p <= m.ell; ++p)
    for (int q = 1; q <= m.ell; ++q)
      for (const auto& s : table.at(p, q)) w(s.u, s.v) += m.prob(p) * m.prob(q);
  return w;
}

// ---------------------------------------------------------------------------
// Allocation search

enum class Scheme {
  kProposed,         // all ell^2 layers, achievable region
  kBaseline,         // two-layer scheme: layers (2,1), (2,2) silent, achievable region
  kBaselineClosedForm,  // two-layer scheme scored with the closed-form (R_w, R_s) bounds
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kBaseline: return "baseline";
    case Scheme::kBaselineClosedForm: return "baseline-closed-form";
  }
  return "?";
}

struct SearchOptions {
  double resolution = 0.02;
  bool refine = true;
  double min_step = 1e-4;
};

struct AvgRateResult {
  double value = 0.0;
  RateVector rates;
  PowerAllocation allocation;
};

namespace detail {

inline PowerAllocation two_layer_allocation(double weak_fraction) {
  const double w = std::clamp(weak_fraction, 0.0, 1.0);
  return PowerAllocation::two_state(w, 1.0 - w, 0.0, 0.0);
}

// Simplex coordinates -> allocation for each scheme.
inline PowerAllocation allocation_from(const std::vector<double>& x, int ell, Scheme s) {
  if (s == Scheme::kProposed) {
    LayerMap b(ell);
    b.flat() = x;
    return PowerAllocation::symmetric(std::move(b));
  }
  return two_layer_allocation(x[0]);
}

// Hill climbing by mass transfers between simplex coordinates, halving the
// step when no transfer improves.
inline std::vector<double> refine_on_simplex(std::vector<double> x, double step, double min_step,
                                             const std::function<double(const std::vector<double>&)>& f) {
  double best = f(x);
  const int n = static_cast<int>(x.size());
  while (step >= min_step) {
    bool improved = false;
    for (int i = 0; i < n && !improved; ++i) {
      if (x[i] <= 0.0) continue;
      const double d = std::min(step, x[i]);
      for (int k = 0; k < n && !improved; ++k) {
        if (k == i) continue;
        std::vector<double> y = x;
        y[i] = (x[i] - d <= 1e-15) ? 0.0 : x[i] - d;
        y[k] = x[k] + d;
        double total = 0.0;
        for (double v : y) total += v;
        for (double& v : y) v /= total;
        const double val = f(y);
        if (val > best + 1e-13) {
          best = val;
          x = std::move(y);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

}  // namespace detail

/// Average-rate optimum for one allocation under a scheme.
inline AvgRateResult evaluate_average_rate(const ChannelModel& m, const PowerAllocation& pa,
                                           Scheme scheme) {
  const multi_state::DecodeTable table(m.ell);
  const LayerMap w = average_rate_weights(m, table);
  if (scheme == Scheme::kBaselineClosedForm) {
    const two_state::BaselineBounds b = two_state::two_layer_bounds(m, pa);
    RateVector rv = RateVector::two_state(0.5 * b.weak_sum, 0.5 * b.strong_sum, 0.0, 0.0);
    return AvgRateResult{w(1, 1) * rv(1, 1) + w(1, 2) * rv(1, 2), rv, pa};
  }
  const LinearOptimum opt = maximize_linear(achievable_region(m, pa), w);
  return AvgRateResult{opt.value, opt.arg, pa};
}

/// Maximum average rate over the allocation grid (plus optional local
/// refinement). Ties keep the earliest grid point.
inline AvgRateResult maximize_average_rate(const ChannelModel& m, const SearchOptions& opt,
                                           Scheme scheme = Scheme::kProposed) {
  require_valid(m);
  if (scheme != Scheme::kProposed && m.ell != 2)
    throw std::invalid_argument("maximize_average_rate: baseline schemes require ell = 2");

  const int ell = m.ell;
  const int steps = simplex_steps(opt.resolution);
  const int dims = scheme == Scheme::kProposed ? ell * ell : 2;

  std::optional<AvgRateResult> best;
  std::vector<double> best_x;
  for_each_composition(dims, steps, [&](const std::vector<int>& c) {
    std::vector<double> x(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) x[i] = static_cast<double>(c[i]) / steps;
    AvgRateResult r = evaluate_average_rate(m, detail::allocation_from(x, ell, scheme), scheme);
    if (!best || r.value > best->value + kTolerance) {
      best = std::move(r);
      best_x = x;
    }
  });

  if (opt.refine) {
    auto f = [&](const std::vector<double>& x) {
      return evaluate_average_rate(m, detail::allocation_from(x, ell, scheme), scheme).value;
    };
    std::vector<std::vector<double>> starts = {best_x};
    // The two-layer allocations are a face of the full simplex; also climb
    // from the refined two-layer optimum so the result never falls below it.
    if (scheme == Scheme::kProposed && ell == 2) {
      const AvgRateResult two = maximize_average_rate(m, opt, Scheme::kBaseline);
      starts.push_back({two.allocation.shared()(1, 1), two.allocation.shared()(1, 2), 0.0, 0.0});
    }
    for (const auto& s : starts) {
      std::vector<double> x = detail::refine_on_simplex(s, opt.resolution, opt.min_step, f);
      AvgRateResult r = evaluate_average_rate(m, detail::allocation_from(x, ell, scheme), scheme);
      if (r.value > best->value) best = std::move(r);
    }
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Frontiers in the (weak-group sum, strong-group sum) plane

struct FrontierPoint {
  double x = 0.0;
  double y = 0.0;
  PowerAllocation allocation;
};

/// Upper envelope of the union over allocations of the per-allocation
/// feasible sets, each of which is a rectangle [0, X] x [0, Y] in this plane.
class Frontier {
 public:
  Frontier() = default;

  /// Keeps the Pareto staircase of the corners; ties keep the earliest.
  explicit Frontier(std::vector<FrontierPoint> corners) {
    std::stable_sort(corners.begin(), corners.end(),
                     [](const FrontierPoint& a, const FrontierPoint& b) { return a.x > b.x; });
    double best_y = -std::numeric_limits<double>::infinity();
    for (auto& c : corners) {
      if (c.y > best_y + kTolerance) {
        best_y = c.y;
        stairs_.push_back(std::move(c));
      }
    }
    std::reverse(stairs_.begin(), stairs_.end());
  }

  /// Staircase corners, x ascending and y descending.
  const std::vector<FrontierPoint>& corners() const { return stairs_; }

  double x_max() const { return stairs_.empty() ? 0.0 : stairs_.back().x; }
  double y_at_zero() const { return stairs_.empty() ? 0.0 : stairs_.front().y; }

  /// Largest strong-group rate achievable with weak-group rate >= x;
  /// -inf beyond x_max.
  const FrontierPoint* corner_at(double x) const {
    for (const auto& c : stairs_)
      if (c.x >= x - kTolerance) return &c;
    return nullptr;
  }
  double value_at(double x) const {
    const FrontierPoint* c = corner_at(x);
    return c ? c->y : -std::numeric_limits<double>::infinity();
  }

  /// Envelope sampled on an evenly spaced ladder over [0, x_hi].
  std::vector<FrontierPoint> sample(int ladder, std::optional<double> x_hi = std::nullopt) const {
    if (ladder < 2) throw std::invalid_argument("Frontier::sample: ladder needs >= 2 points");
    const double hi = x_hi.value_or(x_max());
    std::vector<FrontierPoint> out;
    for (int i = 0; i < ladder; ++i) {
      const double x = hi * i / (ladder - 1);
      if (const FrontierPoint* c = corner_at(x)) out.push_back(FrontierPoint{x, c->y, c->allocation});
    }
    return out;
  }

 private:
  std::vector<FrontierPoint> stairs_;
};

struct FrontierOptions {
  double resolution = 0.02;
  int samples = 101;  // strong-group targets per allocation
  int ladder = 200;   // shared x-ladder size for sampled envelopes
};

/// Proposed scheme: x = 2 (R11 + R12 + R21), y = 2 R22.
inline Frontier trace_frontier_proposed(const ChannelModel& m, const FrontierOptions& opt = {}) {
  two_state::detail::require_two_state(m, "trace_frontier_proposed");
  if (opt.samples < 2) throw std::invalid_argument("trace_frontier_proposed: samples must be >= 2");
  LayerMap weak_group(2, 1.0);
  weak_group(2, 2) = 0.0;
  std::vector<FrontierPoint> pts;
  for_each_simplex_point(2, opt.resolution, [&](const PowerAllocation& pa) {
    const RateRegion region = two_state::inner_region(m, pa);
    const double y_top = 2.0 * region.constraints().back().bound;  // 2 r22
    // R22 shares no row with the other rates, so the weak-group optimum is
    // the same for every strong-group target on the ladder.
    const double x = 2.0 * maximize_linear(region, weak_group).value;
    double y_best = 0.0;
    for (int k = 0; k < opt.samples; ++k) y_best = std::max(y_best, y_top * k / (opt.samples - 1));
    pts.push_back(FrontierPoint{x, y_best, pa});
  });
  return Frontier(std::move(pts));
}

/// Two-layer baseline: x = R_w, y = R_s over the weak/strong power split.
inline Frontier trace_frontier_baseline(const ChannelModel& m, const FrontierOptions& opt = {}) {
  two_state::detail::require_two_state(m, "trace_frontier_baseline");
  const int steps = simplex_steps(opt.resolution);
  std::vector<FrontierPoint> pts;
  for (int i = 0; i <= steps; ++i) {
    const PowerAllocation pa = detail::two_layer_allocation(static_cast<double>(i) / steps);
    const auto b = two_state::two_layer_bounds(m, pa);
    pts.push_back(FrontierPoint{b.weak_sum, b.strong_sum, pa});
  }
  return Frontier(std::move(pts));
}

/// Outer bound mapped to the proposed plane, unioned over the grid.
inline Frontier trace_frontier_outer(const ChannelModel& m, const FrontierOptions& opt = {}) {
  two_state::detail::require_two_state(m, "trace_frontier_outer");
  std::vector<FrontierPoint> pts;
  for_each_simplex_point(2, opt.resolution, [&](const PowerAllocation& pa) {
    const auto o = two_state::outer_bound(m, pa);
    pts.push_back(FrontierPoint{2.0 * (o.cap_r11 + o.cap_r12 + o.cap_r21), 2.0 * o.cap_r22, pa});
  });
  return Frontier(std::move(pts));
}

/// Smallest upper(x) - lower(x) over a shared ladder spanning lower's range.
inline double min_frontier_slack(const Frontier& upper, const Frontier& lower, int ladder) {
  double slack = std::numeric_limits<double>::infinity();
  const double hi = lower.x_max();
  for (int i = 0; i < ladder; ++i) {
    const double x = hi * i / (ladder - 1);
    slack = std::min(slack, upper.value_at(x) - lower.value_at(x));
  }
  return slack;
}

}  // namespace bamac
