// General ell-state machinery: index sets, residual power fractions, the
// per-pair bound terms, the achievable region, the decode-set recursion and
// the ell = 2 reduction check against the two-state closed forms.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bamac/core.hpp"
#include "bamac/rate_region.hpp"
#include "bamac/two_state.hpp"

namespace bamac::multi_state {

/// Which definition of the second index set to use.
///  - kAmended: {(j,k) : j in u..v-1, k in v..ell}, residuals at j.
///  - kStrict: {(j,k) : k in u..v-1, j in v+1..ell}, residuals at k.
/// Only kAmended reproduces the two-state region at ell = 2.
enum class SecondSetForm { kAmended, kStrict };

using IndexPair = std::pair<int, int>;

struct IndexSets {
  std::vector<int> j1;
  std::vector<IndexPair> j2;
  std::vector<IndexPair> j3;
};

inline IndexSets index_sets(int u, int v, int ell,
                            SecondSetForm form = SecondSetForm::kAmended) {
  if (u < 1 || u >= v || v > ell)
    throw std::invalid_argument("index_sets: requires 1 <= u < v <= ell");
  IndexSets s;
  for (int j = u; j <= v - 1; ++j) s.j1.push_back(j);
  if (form == SecondSetForm::kAmended) {
    for (int j = u; j <= v - 1; ++j)
      for (int k = v; k <= ell; ++k) s.j2.emplace_back(j, k);
  } else {
    for (int k = u; k <= v - 1; ++k)
      for (int j = v + 1; j <= ell; ++j) s.j2.emplace_back(j, k);
  }
  for (int j = v; j <= ell; ++j)
    for (int k = j; k <= ell; ++k) s.j3.emplace_back(j, k);
  return s;
}

// ---------------------------------------------------------------------------
// Residual power fractions: one minus the power already decoded, used as the
// interference weight of the undecoded layers.

namespace detail {

// sum of beta(m, n) over rows m in 1..rows and columns n in 1..cols.
inline double block_sum(const LayerMap& b, int rows, int cols) {
  double s = 0.0;
  for (int m = 1; m <= rows; ++m)
    for (int n = 1; n <= cols; ++n) s += b(m, n);
  return s;
}

inline double row_prefix(const LayerMap& b, int row, int cols) {
  double s = 0.0;
  for (int n = 1; n <= cols; ++n) s += b(row, n);
  return s;
}

inline double col_prefix(const LayerMap& b, int col, int rows) {
  double s = 0.0;
  for (int n = 1; n <= rows; ++n) s += b(n, col);
  return s;
}

inline double residual(double x) { return std::clamp(x, 0.0, 1.0); }

inline void check_range(const LayerMap& b, std::initializer_list<int> idx) {
  for (int i : idx)
    if (i < 1 || i > b.ell()) throw std::out_of_range("residual: index outside 1..ell");
}

}  // namespace detail

enum class Residual { B1 = 1, B2, B3, B4, B5, B6, B7, B8 };

/// Residual fraction B_kind. `j` is ignored by the kinds that do not take it
/// (B3, B4, B5, B8); B8 reads (u, v) as its two arguments.
inline double residual_fraction(const LayerMap& b, Residual kind, int j, int u, int v) {
  using detail::block_sum;
  using detail::col_prefix;
  using detail::row_prefix;
  switch (kind) {
    case Residual::B1:
    case Residual::B6:
      detail::check_range(b, {j, u, v});
      return detail::residual(1.0 - block_sum(b, v - 1, j) - row_prefix(b, v, u));
    case Residual::B2:
    case Residual::B7:
      detail::check_range(b, {j, u, v});
      return detail::residual(1.0 - block_sum(b, j, v - 1) - col_prefix(b, v, u));
    case Residual::B3:
      detail::check_range(b, {u, v});
      return detail::residual(1.0 - block_sum(b, v - 1, v - 1) - row_prefix(b, v, u) -
                              col_prefix(b, v, u));
    case Residual::B4:
      detail::check_range(b, {u, v});
      return detail::residual(1.0 - block_sum(b, u, v - 1) - col_prefix(b, v, u));
    case Residual::B5:
      detail::check_range(b, {u, v});
      return detail::residual(1.0 - block_sum(b, v - 1, u) - row_prefix(b, v, u));
    case Residual::B8:
      detail::check_range(b, {u, v});
      return detail::residual(1.0 - block_sum(b, v, u));
  }
  throw std::invalid_argument("residual_fraction: unknown kind");
}

// ---------------------------------------------------------------------------
// Bound terms

/// Terms for one pair u < v. Entries 1..10 are used; a term whose index set
/// is empty is left unset and its row omitted from the region.
struct PairTerms {
  std::array<std::optional<double>, 11> b{};

  double operator[](int i) const {
    if (i < 1 || i > 10 || !b[static_cast<std::size_t>(i)])
      throw std::out_of_range("PairTerms: term unavailable");
    return *b[static_cast<std::size_t>(i)];
  }
  bool has(int i) const { return i >= 1 && i <= 10 && b[static_cast<std::size_t>(i)].has_value(); }
};

struct DiagonalTerms {
  double b11 = 0.0;
  double b12 = 0.0;
};

namespace detail {

inline void require_model(const ChannelModel& m, const PowerAllocation& pa) {
  require_valid(m);
  if (pa.ell() != m.ell) throw std::invalid_argument("allocation size differs from ell");
}

inline std::optional<double> min_over(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return *std::min_element(xs.begin(), xs.end());
}

}  // namespace detail

inline PairTerms bound_terms(const ChannelModel& m, const PowerAllocation& pa, int u, int v,
                             SecondSetForm form = SecondSetForm::kAmended) {
  detail::require_model(m, pa);
  const LayerMap& b = pa.shared();
  const int ell = m.ell;
  const IndexSets sets = index_sets(u, v, ell, form);
  const double P = m.power;
  auto C = [P](double s, double i) { return cap_term(s, i, P); };
  auto alpha = [&m](int i) { return m.alpha(i); };
  auto B = [&b](Residual k, int j, int uu, int vv) { return residual_fraction(b, k, j, uu, vv); };

  const double buv = b(u, v), bvu = b(v, u);
  const double b3 = B(Residual::B3, 0, u, v);
  const double av = alpha(v), au = alpha(u), al = alpha(ell);

  PairTerms t;
  std::vector<double> xs;
  for (int j : sets.j1)
    xs.push_back(C(av * buv, alpha(j) * B(Residual::B1, j, u, v) + av * B(Residual::B2, j, u, v)));
  t.b[1] = detail::min_over(xs);
  t.b[2] = C(av * buv, (av + al) * b3);
  t.b[3] = C(2 * av * buv, 2 * av * b3);
  t.b[4] = C(au * bvu, al * B(Residual::B4, 0, u, v) + au * B(Residual::B5, 0, u, v));
  t.b[5] = C(2 * av * bvu, 2 * av * b3);

  xs.clear();
  for (const auto& [j, k] : sets.j2) {
    const int weak = form == SecondSetForm::kAmended ? j : k;
    xs.push_back(C(alpha(j) * bvu + alpha(k) * buv,
                   alpha(j) * B(Residual::B6, weak, u, v) + alpha(k) * B(Residual::B7, weak, u, v)));
  }
  t.b[6] = detail::min_over(xs);
  t.b[7] = C(av * (buv + bvu), (av + al) * b3);
  t.b[8] = C(2 * av * (buv + bvu), 2 * av * b3);

  std::vector<double> ys;
  xs.clear();
  for (const auto& [j, k] : sets.j3) {
    xs.push_back(C(alpha(j) * (buv + bvu) + alpha(k) * buv, (alpha(j) + alpha(k)) * b3));
    ys.push_back(C(alpha(j) * (buv + bvu) + alpha(k) * bvu, (alpha(j) + alpha(k)) * b3));
  }
  t.b[9] = detail::min_over(xs);
  t.b[10] = detail::min_over(ys);
  return t;
}

inline DiagonalTerms diagonal_terms(const ChannelModel& m, const PowerAllocation& pa, int u) {
  detail::require_model(m, pa);
  if (u < 1 || u > m.ell) throw std::out_of_range("diagonal_terms: u outside 1..ell");
  const LayerMap& b = pa.shared();
  const double au = m.alpha(u), al = m.alpha(m.ell);
  const double b8 = residual_fraction(b, Residual::B8, 0, u, u);
  return DiagonalTerms{cap_term(au * b(u, u), (au + al) * b8, m.power),
                       cap_term(2 * au * b(u, u), 2 * au * b8, m.power)};
}

namespace detail {

inline std::string pair_tag(const char* what, int u, int v) {
  std::string s = what;
  auto sub = [](int x, int y) { return std::to_string(x) + "," + std::to_string(y); };
  std::size_t pos;
  while ((pos = s.find("uv")) != std::string::npos) s.replace(pos, 2, "[" + sub(u, v) + "]");
  while ((pos = s.find("vu")) != std::string::npos) s.replace(pos, 2, "[" + sub(v, u) + "]");
  return s;
}

}  // namespace detail

/// Achievable region for any ell: five rows per pair u < v (four when the
/// second index set is empty) and one row per diagonal layer.
inline RateRegion general_region(const ChannelModel& m, const PowerAllocation& pa,
                                  SecondSetForm form = SecondSetForm::kAmended) {
  detail::require_model(m, pa);
  pa.shared();
  const int ell = m.ell;
  RateRegion r(ell);
  for (int u = 1; u <= ell; ++u) {
    const DiagonalTerms d = diagonal_terms(m, pa, u);
    r.add({{{u, u}, 1}}, std::min(d.b11, 0.5 * d.b12),
          "R" + std::to_string(u) + std::to_string(u) + "<=diag");
  }
  for (int u = 1; u <= ell; ++u) {
    for (int v = u + 1; v <= ell; ++v) {
      const PairTerms t = bound_terms(m, pa, u, v, form);
      r.add({{{u, v}, 1}}, std::min({t[1], t[2], 0.5 * t[3]}), detail::pair_tag("Ruv<=single", u, v));
      r.add({{{v, u}, 1}}, std::min(t[4], 0.5 * t[5]), detail::pair_tag("Rvu<=single", u, v));
      double sum = std::min(t[7], 0.5 * t[8]);
      if (t.has(6)) sum = std::min(sum, t[6]);
      r.add({{{u, v}, 1}, {{v, u}, 1}}, sum, detail::pair_tag("Ruv+Rvu<=sum", u, v));
      r.add({{{u, v}, 2}, {{v, u}, 1}}, t[9], detail::pair_tag("2Ruv+Rvu<=weighted", u, v));
      r.add({{{u, v}, 1}, {{v, u}, 2}}, t[10], detail::pair_tag("Ruv+2Rvu<=weighted", u, v));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decode table

/// Codebook W^user_{uv}.
struct Stream {
  int user = 1;
  int u = 1;
  int v = 1;
  auto operator<=>(const Stream&) const = default;
};

/// Decoded streams per joint state (p, q) = (state of h2, state of h1).
class DecodeTable {
 public:
  explicit DecodeTable(int ell) : ell_(ell) {
    if (ell < 1) throw std::invalid_argument("decode_table: ell must be >= 1");
    sets_.resize(static_cast<std::size_t>(ell) * ell);
    for (int p = 1; p <= ell; ++p) {
      for (int q = 1; q <= ell; ++q) {
        auto& s = mut(p, q);
        if (p > 1 && q > 1) s.insert(at(p - 1, q - 1).begin(), at(p - 1, q - 1).end());
        if (q > 1) s.insert(at(p, q - 1).begin(), at(p, q - 1).end());
        if (p > 1) s.insert(at(p - 1, q).begin(), at(p - 1, q).end());
        for (const Stream& n : new_streams(p, q)) s.insert(n);
      }
    }
  }

  int ell() const { return ell_; }

  const std::set<Stream>& at(int p, int q) const {
    check(p, q);
    return sets_[static_cast<std::size_t>(p - 1) * ell_ + static_cast<std::size_t>(q - 1)];
  }

  /// Streams first decoded at (p, q): W^1_pq and W^2_qp.
  static std::array<Stream, 2> new_streams(int p, int q) {
    return {Stream{1, p, q}, Stream{2, q, p}};
  }

 private:
  void check(int p, int q) const {
    if (p < 1 || p > ell_ || q < 1 || q > ell_)
      throw std::out_of_range("DecodeTable: state outside 1..ell");
  }
  std::set<Stream>& mut(int p, int q) {
    check(p, q);
    return sets_[static_cast<std::size_t>(p - 1) * ell_ + static_cast<std::size_t>(q - 1)];
  }

  int ell_;
  std::vector<std::set<Stream>> sets_;
};

inline DecodeTable decode_table(int ell) { return DecodeTable(ell); }

// ---------------------------------------------------------------------------
// Reduction check at ell = 2

struct ReductionEntry {
  std::string name;
  double general = 0.0;    // from the ell-state terms
  double two_state = 0.0;  // from the two-state closed forms
  double deviation = 0.0;  // |general - two_state|, +inf when a term is absent
};

struct ReductionReport {
  std::vector<ReductionEntry> entries;
  double max_deviation = 0.0;
  bool pass = true;
};

/// Compares every ell-state term and region bound with its two-state
/// counterpart; passes iff all deviations are <= 1e-12.
inline ReductionReport reduction_check(const ChannelModel& m, const PowerAllocation& pa,
                                        SecondSetForm form = SecondSetForm::kAmended) {
  require_valid(m);
  if (m.ell != 2) throw std::invalid_argument("reduction_check: requires ell = 2");
  const LayerMap& b = pa.shared();
  const double a1 = m.alpha(1), a2 = m.alpha(2), P = m.power;
  auto C = [P](double s, double i) { return cap_term(s, i, P); };
  const double b11 = b(1, 1), b12 = b(1, 2), b21 = b(2, 1), b22 = b(2, 2);
  const double mixed = a1 * (b12 + b22) + a2 * (b21 + b22);

  const PairTerms t = bound_terms(m, pa, 1, 2, form);
  const DiagonalTerms d1 = diagonal_terms(m, pa, 1);
  const DiagonalTerms d2 = diagonal_terms(m, pa, 2);

  ReductionReport rep;
  auto cmp = [&rep](std::string name, std::optional<double> general, double closed) {
    ReductionEntry e{std::move(name), general.value_or(std::numeric_limits<double>::quiet_NaN()),
                     closed, std::numeric_limits<double>::infinity()};
    if (general) e.deviation = std::abs(*general - closed);
    rep.entries.push_back(std::move(e));
  };
  auto opt = [&t](int i) { return t.b[static_cast<std::size_t>(i)]; };
  auto half = [](std::optional<double> x) -> std::optional<double> {
    if (!x) return std::nullopt;
    return 0.5 * *x;
  };

  cmp("r11.single", d1.b11, C(a1 * b11, (a1 + a2) * (1.0 - b11)));
  cmp("r11.joint", 0.5 * d1.b12, 0.5 * C(2 * a1 * b11, 2 * a1 * (1.0 - b11)));
  cmp("r12.single", opt(1), C(a2 * b12, mixed));
  cmp("r12.joint", half(opt(3)), 0.5 * C(2 * a2 * b12, 2 * a2 * b22));
  cmp("r21.single", opt(4), C(a1 * b21, mixed));
  cmp("r21.joint", half(opt(5)), 0.5 * C(2 * a2 * b21, 2 * a2 * b22));
  cmp("r1.single", opt(6), C(a1 * b21 + a2 * b12, mixed));
  cmp("r1.joint", half(opt(8)), 0.5 * C(2 * a2 * (b12 + b21), 2 * a2 * b22));
  cmp("r12'", opt(9), C(a2 * (2 * b12 + b21), 2 * a2 * b22));
  cmp("r21'", opt(10), C(a2 * (b12 + 2 * b21), 2 * a2 * b22));
  cmp("r22", std::min(d2.b11, 0.5 * d2.b12), 0.5 * C(2 * a2 * b22, 0.0));

  // Region level: match rows by coefficient pattern.
  const RateRegion general = general_region(m, pa, form);
  const RateRegion closed = two_state::inner_region(m, pa);
  for (const auto& row : closed.constraints()) {
    std::optional<double> g;
    for (const auto& other : general.constraints())
      if (other.coeffs == row.coeffs) g = other.bound;
    cmp("region:" + row.tag, g, row.bound);
  }

  for (const auto& e : rep.entries) rep.max_deviation = std::max(rep.max_deviation, e.deviation);
  rep.pass = rep.max_deviation <= kTolerance;
  return rep;
}

}  // namespace bamac::multi_state
