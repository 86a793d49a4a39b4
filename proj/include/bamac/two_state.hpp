// Closed-form bounds for the two-state channel (ell = 2): the achievable
// region, the two-layer baseline region, the outer bound, and a decoding
// stage checker that replays every per-state MAC constraint.
//
// Joint states are keyed (p, q) = (state of h2, state of h1), the same
// orientation as DecodeTable.

#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "bamac/core.hpp"
#include "bamac/rate_region.hpp"

namespace bamac::two_state {

namespace detail {

inline void require_two_state(const ChannelModel& m, const char* who) {
  require_valid(m);
  if (m.ell != 2) throw std::invalid_argument(std::string(who) + ": requires ell = 2");
}

}  // namespace detail

/// The seven bounds of the symmetric achievable region.
struct TwoStateTerms {
  double r11 = 0, r12 = 0, r21 = 0, r1 = 0, r12p = 0, r21p = 0, r22 = 0;
};

inline TwoStateTerms region_terms(const ChannelModel& m, const PowerAllocation& pa) {
  detail::require_two_state(m, "region_terms");
  if (pa.ell() != 2) throw std::invalid_argument("region_terms: allocation must be 2x2");
  const LayerMap& b = pa.shared();
  const double a1 = m.alpha(1), a2 = m.alpha(2), P = m.power;
  const double b11 = b(1, 1), b12 = b(1, 2), b21 = b(2, 1), b22 = b(2, 2);
  const double bar11 = 1.0 - b11;
  // Interference when exactly one user is strong and the mixed layers are decoded.
  const double mixed = a1 * (b12 + b22) + a2 * (b21 + b22);

  TwoStateTerms t;
  t.r11 = std::min(cap_term(a1 * b11, (a1 + a2) * bar11, P),
                   0.5 * cap_term(2 * a1 * b11, 2 * a1 * bar11, P));
  t.r12 = std::min(cap_term(a2 * b12, mixed, P),
                   0.5 * cap_term(2 * a2 * b12, 2 * a2 * b22, P));
  t.r21 = std::min(cap_term(a1 * b21, mixed, P),
                   0.5 * cap_term(2 * a2 * b21, 2 * a2 * b22, P));
  t.r1 = std::min(cap_term(a1 * b21 + a2 * b12, mixed, P),
                  0.5 * cap_term(2 * a2 * (b12 + b21), 2 * a2 * b22, P));
  t.r12p = cap_term(a2 * (2 * b12 + b21), 2 * a2 * b22, P);
  t.r21p = cap_term(a2 * (b12 + 2 * b21), 2 * a2 * b22, P);
  t.r22 = 0.5 * cap_term(2 * a2 * b22, 0.0, P);
  return t;
}

/// Per-stage MAC constants a_1 .. a_33 (index 0 unused). Accepts asymmetric
/// allocations.
class StageConstants {
 public:
  double operator[](int i) const {
    if (i < 1 || i > 33) throw std::out_of_range("StageConstants: index outside 1..33");
    return a_[static_cast<std::size_t>(i)];
  }
  double& at(int i) {
    if (i < 1 || i > 33) throw std::out_of_range("StageConstants: index outside 1..33");
    return a_[static_cast<std::size_t>(i)];
  }

 private:
  std::array<double, 34> a_{};
};

inline StageConstants stage_constants(const ChannelModel& m, const PowerAllocation& pa) {
  detail::require_two_state(m, "stage_constants");
  if (pa.ell() != 2) throw std::invalid_argument("stage_constants: allocation must be 2x2");
  const LayerMap& x = pa.user(1);
  const LayerMap& y = pa.user(2);
  const double a1 = m.alpha(1), a2 = m.alpha(2), P = m.power;
  auto C = [P](double s, double i) { return cap_term(s, i, P); };
  const double bar1 = 1.0 - x(1, 1), bar2 = 1.0 - y(1, 1);

  StageConstants a;
  // Stage 1: base layers, everything else is noise.
  a.at(1) = C(a1 * x(1, 1), a1 * (bar1 + bar2));
  a.at(2) = C(a1 * y(1, 1), a1 * (bar1 + bar2));
  a.at(3) = C(a1 * (x(1, 1) + y(1, 1)), a1 * (bar1 + bar2));
  a.at(4) = C(a1 * x(1, 1), a1 * bar1 + a2 * bar2);
  a.at(5) = C(a2 * y(1, 1), a1 * bar1 + a2 * bar2);
  a.at(6) = C(a1 * x(1, 1) + a2 * y(1, 1), a1 * bar1 + a2 * bar2);
  a.at(7) = C(a2 * x(1, 1), a2 * bar1 + a1 * bar2);
  a.at(8) = C(a1 * y(1, 1), a2 * bar1 + a1 * bar2);
  a.at(9) = C(a2 * x(1, 1) + a1 * y(1, 1), a2 * bar1 + a1 * bar2);
  a.at(10) = C(a2 * x(1, 1), a2 * (bar1 + bar2));
  a.at(11) = C(a2 * y(1, 1), a2 * (bar1 + bar2));
  a.at(12) = C(a2 * (x(1, 1) + y(1, 1)), a2 * (bar1 + bar2));

  // Stage 2, h1 weak / h2 strong: W^1_21 and W^2_12.
  const double i13 = a1 * (x(1, 2) + x(2, 2)) + a2 * (y(2, 1) + y(2, 2));
  a.at(13) = C(a1 * x(2, 1), i13);
  a.at(14) = C(a2 * y(1, 2), i13);
  a.at(15) = C(a1 * x(2, 1) + a2 * y(1, 2), i13);

  // Stage 2, h1 strong / h2 weak: W^1_12 and W^2_21.
  const double i16 = a2 * (x(2, 1) + x(2, 2)) + a1 * (y(1, 2) + y(2, 2));
  a.at(16) = C(a2 * x(1, 2), i16);
  a.at(17) = C(a1 * y(2, 1), i16);
  a.at(18) = C(a2 * x(1, 2) + a1 * y(2, 1), i16);

  // Stage 2, both strong: the four mixed layers jointly.
  const double i19 = a2 * x(2, 2) + a2 * y(2, 2);
  a.at(19) = C(a2 * x(1, 2), i19);
  a.at(20) = C(a2 * x(2, 1), i19);
  a.at(21) = C(a2 * y(1, 2), i19);
  a.at(22) = C(a2 * y(2, 1), i19);
  a.at(23) = C(a2 * x(1, 2) + a2 * x(2, 1), i19);
  a.at(24) = C(a2 * x(1, 2) + a2 * y(1, 2), i19);
  a.at(25) = C(a2 * x(1, 2) + a2 * y(2, 1), i19);
  a.at(26) = C(a2 * x(2, 1) + a2 * y(1, 2), i19);
  a.at(27) = C(a2 * x(2, 1) + a2 * y(2, 1), i19);
  a.at(28) = C(a2 * y(1, 2) + a2 * y(2, 1), i19);
  a.at(29) = C(a2 * (x(1, 2) + x(2, 1)) + a2 * y(1, 2), i19);
  a.at(30) = C(a2 * (x(1, 2) + x(2, 1)) + a2 * y(2, 1), i19);
  a.at(31) = C(a2 * x(1, 2) + a2 * (y(1, 2) + y(2, 1)), i19);
  a.at(32) = C(a2 * x(2, 1) + a2 * (y(1, 2) + y(2, 1)), i19);
  a.at(33) = C(a2 * (x(1, 2) + x(2, 1)) + a2 * (y(1, 2) + y(2, 1)), i19);
  return a;
}

/// Tags carried by the achievable-region rows, in emission order.
inline constexpr std::array<const char*, 7> kAchievableTags = {
    "R11<=r11", "R12<=r12", "R21<=r21", "R12+R21<=r1",
    "2R12+R21<=r12'", "R12+2R21<=r21'", "R22<=r22"};

inline RateRegion region_from_terms(const TwoStateTerms& t) {
  RateRegion r(2);
  r.add({{{1, 1}, 1}}, t.r11, kAchievableTags[0]);
  r.add({{{1, 2}, 1}}, t.r12, kAchievableTags[1]);
  r.add({{{2, 1}, 1}}, t.r21, kAchievableTags[2]);
  r.add({{{1, 2}, 1}, {{2, 1}, 1}}, t.r1, kAchievableTags[3]);
  r.add({{{1, 2}, 2}, {{2, 1}, 1}}, t.r12p, kAchievableTags[4]);
  r.add({{{1, 2}, 1}, {{2, 1}, 2}}, t.r21p, kAchievableTags[5]);
  r.add({{{2, 2}, 1}}, t.r22, kAchievableTags[6]);
  return r;
}

/// Symmetric achievable region for one allocation: exactly seven rows.
inline RateRegion inner_region(const ChannelModel& m, const PowerAllocation& pa) {
  return region_from_terms(region_terms(m, pa));
}

/// Two-layer baseline bounds on R_w = R^1_11 + R^2_11 and
/// R_s = R^1_12 + R^2_12.
struct BaselineBounds {
  double weak_sum = 0.0;
  double strong_sum = 0.0;
};

inline BaselineBounds two_layer_bounds(const ChannelModel& m, const PowerAllocation& pa) {
  detail::require_two_state(m, "two_layer_bounds");
  for (int i = 1; i <= 2; ++i) {
    const LayerMap& b = pa.user(i);
    if (b.ell() != 2 || b(2, 1) > kTolerance || b(2, 2) > kTolerance)
      throw std::invalid_argument(
          "two_layer_bounds: layers (2,1) and (2,2) must carry zero power");
  }
  const StageConstants a = stage_constants(m, pa);
  BaselineBounds out;
  out.weak_sum = std::min({a[3], a[6], a[9], a[4] + a[8]});
  out.strong_sum =
      cap_term(m.alpha(2) * pa.user(1)(1, 2) + m.alpha(2) * pa.user(2)(1, 2), 0.0, m.power);
  return out;
}

struct OuterBound2 {
  double cap_r11 = 0, cap_r12 = 0, cap_r21 = 0, cap_r22 = 0;
};

inline OuterBound2 outer_bound(const ChannelModel& m, const PowerAllocation& pa) {
  detail::require_two_state(m, "outer_bound");
  pa.shared();
  const StageConstants a = stage_constants(m, pa);
  const double b22 = pa.user(1)(2, 2);
  return OuterBound2{0.5 * a[3], 0.5 * a[24], 0.5 * a[27],
                     0.5 * cap_term(2 * m.alpha(2) * b22, 0.0, m.power)};
}

inline bool within_outer(const OuterBound2& o, const RateVector& rv, double tol = kTolerance) {
  return rv(1, 1) <= o.cap_r11 + tol && rv(1, 2) <= o.cap_r12 + tol &&
         rv(2, 1) <= o.cap_r21 + tol && rv(2, 2) <= o.cap_r22 + tol;
}

// ---------------------------------------------------------------------------
// Stage-wise feasibility

struct StageCheck {
  int stage = 0;      // 1, 2 or 3
  std::string label;  // e.g. "R1_11+R2_11<=a3"
  double lhs = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct StateReport {
  int p = 0;  // state of h2
  int q = 0;  // state of h1
  std::vector<StageCheck> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const StageCheck& c) { return c.ok; });
  }
  std::vector<int> failed_stages() const {
    std::vector<int> s;
    for (const auto& c : checks)
      if (!c.ok && std::find(s.begin(), s.end(), c.stage) == s.end()) s.push_back(c.stage);
    return s;
  }
};

struct StagewiseReport {
  std::vector<StateReport> states;  // (1,1), (1,2), (2,1), (2,2)

  bool pass() const {
    return std::all_of(states.begin(), states.end(), [](const StateReport& s) { return s.pass(); });
  }
  const StateReport& state(int p, int q) const {
    for (const auto& s : states)
      if (s.p == p && s.q == q) return s;
    throw std::out_of_range("StagewiseReport: no such state");
  }
};

/// Replays the successive-decoding constraints of every joint state at a
/// symmetric rate point (R^1_uv = R^2_uv = rv(u, v)).
inline StagewiseReport check_stagewise_feasibility(const ChannelModel& m,
                                                   const PowerAllocation& pa,
                                                   const RateVector& rv,
                                                   double tol = kTolerance) {
  detail::require_two_state(m, "check_stagewise_feasibility");
  if (rv.ell() != 2) throw std::invalid_argument("check_stagewise_feasibility: rates must be 2x2");
  const StageConstants a = stage_constants(m, pa);
  const double r11 = rv(1, 1), r12 = rv(1, 2), r21 = rv(2, 1), r22 = rv(2, 2);

  auto add = [&](StateReport& s, int stage, std::string label, double lhs, double bound) {
    s.checks.push_back(StageCheck{stage, std::move(label), lhs, bound, lhs <= bound + tol});
  };
  auto stage_one = [&](StateReport& s, int first) {
    const std::string i = std::to_string(first), j = std::to_string(first + 1),
                      k = std::to_string(first + 2);
    add(s, 1, "R1_11<=a" + i, r11, a[first]);
    add(s, 1, "R2_11<=a" + j, r11, a[first + 1]);
    add(s, 1, "R1_11+R2_11<=a" + k, 2 * r11, a[first + 2]);
  };

  StagewiseReport rep;
  StateReport weak_weak{1, 1, {}};
  stage_one(weak_weak, 1);

  // h1 strong, h2 weak.
  StateReport h1_strong{1, 2, {}};
  stage_one(h1_strong, 7);
  add(h1_strong, 2, "R1_12<=a16", r12, a[16]);
  add(h1_strong, 2, "R2_21<=a17", r21, a[17]);
  add(h1_strong, 2, "R1_12+R2_21<=a18", r12 + r21, a[18]);

  // h1 weak, h2 strong.
  StateReport h2_strong{2, 1, {}};
  stage_one(h2_strong, 4);
  add(h2_strong, 2, "R1_21<=a13", r21, a[13]);
  add(h2_strong, 2, "R2_12<=a14", r12, a[14]);
  add(h2_strong, 2, "R1_21+R2_12<=a15", r12 + r21, a[15]);

  StateReport strong_strong{2, 2, {}};
  stage_one(strong_strong, 10);
  add(strong_strong, 2, "R1_12<=a19", r12, a[19]);
  add(strong_strong, 2, "R1_21<=a20", r21, a[20]);
  add(strong_strong, 2, "R2_12<=a21", r12, a[21]);
  add(strong_strong, 2, "R2_21<=a22", r21, a[22]);
  add(strong_strong, 2, "R1_12+R1_21<=a23", r12 + r21, a[23]);
  add(strong_strong, 2, "R1_12+R2_12<=a24", 2 * r12, a[24]);
  add(strong_strong, 2, "R1_12+R2_21<=a25", r12 + r21, a[25]);
  add(strong_strong, 2, "R1_21+R2_12<=a26", r12 + r21, a[26]);
  add(strong_strong, 2, "R1_21+R2_21<=a27", 2 * r21, a[27]);
  add(strong_strong, 2, "R2_12+R2_21<=a28", r12 + r21, a[28]);
  add(strong_strong, 2, "R1_12+R1_21+R2_12<=a29", 2 * r12 + r21, a[29]);
  add(strong_strong, 2, "R1_12+R1_21+R2_21<=a30", r12 + 2 * r21, a[30]);
  add(strong_strong, 2, "R1_12+R2_12+R2_21<=a31", 2 * r12 + r21, a[31]);
  add(strong_strong, 2, "R1_21+R2_12+R2_21<=a32", r12 + 2 * r21, a[32]);
  add(strong_strong, 2, "R1_12+R1_21+R2_12+R2_21<=a33", 2 * (r12 + r21), a[33]);
  // Stage 3: the top layers after everything else is removed.
  const double a2 = m.alpha(2), P = m.power;
  const double x22 = pa.user(1)(2, 2), y22 = pa.user(2)(2, 2);
  add(strong_strong, 3, "R1_22<=C(a2*b1_22,0)", r22, cap_term(a2 * x22, 0.0, P));
  add(strong_strong, 3, "R2_22<=C(a2*b2_22,0)", r22, cap_term(a2 * y22, 0.0, P));
  add(strong_strong, 3, "R1_22+R2_22<=C(a2*(b1_22+b2_22),0)", 2 * r22,
      cap_term(a2 * (x22 + y22), 0.0, P));

  rep.states = {std::move(weak_weak), std::move(h1_strong), std::move(h2_strong),
                std::move(strong_strong)};
  return rep;
}

}  // namespace bamac::two_state
