#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "bamac/linear.hpp"
#include "bamac/multi_state.hpp"
#include "oracles.hpp"

using namespace bamac;
using namespace bamac::multi_state;
using Catch::Matchers::WithinAbs;

namespace {

const ChannelModel kReference = ChannelModel::two_state(0.25, 1.0, 10.0, 0.5);

ChannelModel uniform_model(int ell) {
  ChannelModel m{ell, {}, 10.0, {}};
  for (int i = 1; i <= ell; ++i) {
    m.alphas.push_back(static_cast<double>(i) / ell);
    m.probs.push_back(1.0 / ell);
  }
  return m;
}

PowerAllocation random_allocation(std::mt19937_64& rng, int ell) {
  LayerMap b(ell);
  b.flat() = oracle::random_simplex(rng, ell * ell);
  return PowerAllocation::symmetric(b);
}

using Set = std::set<Stream>;

}  // namespace

TEST_CASE("index sets", "[multi_state]") {
  const auto s = index_sets(1, 2, 2);
  CHECK(s.j1 == std::vector<int>{1});
  CHECK(s.j2 == std::vector<IndexPair>{{1, 2}});
  CHECK(s.j3 == std::vector<IndexPair>{{2, 2}});

  CHECK(index_sets(1, 2, 3).j3 == std::vector<IndexPair>{{2, 2}, {2, 3}, {3, 3}});
  CHECK(index_sets(2, 3, 3).j1 == std::vector<int>{2});

  // Strict second set is empty at ell = 2.
  CHECK(index_sets(1, 2, 2, SecondSetForm::kStrict).j2.empty());
  CHECK(index_sets(1, 2, 3, SecondSetForm::kStrict).j2 == std::vector<IndexPair>{{3, 1}});

  CHECK_THROWS_AS(index_sets(2, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(index_sets(1, 4, 3), std::invalid_argument);
}

TEST_CASE("third index set matches its defining predicate", "[multi_state]") {
  for (int ell = 2; ell <= 6; ++ell) {
    for (int u = 1; u <= ell; ++u) {
      for (int v = u + 1; v <= ell; ++v) {
        std::vector<IndexPair> brute;
        for (int j = 1; j <= ell; ++j)
          for (int k = 1; k <= ell; ++k)
            if (j >= v && k >= j) brute.emplace_back(j, k);
        CHECK(index_sets(u, v, ell).j3 == brute);
      }
    }
  }
}

TEST_CASE("residual fractions", "[multi_state]") {
  const LayerMap b = LayerMap::from_rows({{0.4, 0.3}, {0.2, 0.1}});
  CHECK_THAT(residual_fraction(b, Residual::B1, 1, 1, 2), WithinAbs(1 - 0.4 - 0.2, 1e-15));
  CHECK_THAT(residual_fraction(b, Residual::B3, 0, 1, 2), WithinAbs(1 - 0.4 - 0.2 - 0.3, 1e-15));
  CHECK_THAT(residual_fraction(b, Residual::B8, 0, 2, 2), WithinAbs(0.0, 1e-15));
  CHECK_THAT(residual_fraction(b, Residual::B8, 0, 1, 1), WithinAbs(0.6, 1e-15));
  CHECK_THROWS_AS(residual_fraction(b, Residual::B1, 3, 1, 2), std::out_of_range);

  std::mt19937_64 rng(3);
  for (int ell = 1; ell <= 5; ++ell) {
    const auto pa = random_allocation(rng, ell);
    CHECK_THAT(residual_fraction(pa.shared(), Residual::B8, 0, ell, ell), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("bound terms reduce to the two-state constants", "[multi_state]") {
  const auto pa = PowerAllocation::two_state(0.4, 0.3, 0.2, 0.1);
  const auto t = bound_terms(kReference, pa, 1, 2);
  const auto a = two_state::stage_constants(kReference, pa);
  const auto d1 = diagonal_terms(kReference, pa, 1);
  CHECK_THAT(d1.b12, WithinAbs(a[3], 1e-15));
  CHECK_THAT(d1.b12, WithinAbs(oracle::cap(2 * 0.25 * 0.4, 2 * 0.25 * 0.6, 10), 1e-15));
  CHECK_THAT(t[1], WithinAbs(a[14], 1e-15));
  CHECK_THAT(t[9], WithinAbs(oracle::cap(1.0 * (2 * 0.3 + 0.2), 2 * 0.1, 10), 1e-15));
  CHECK_THAT(t[4], WithinAbs(a[13], 1e-15));
  CHECK_THAT(t[3], WithinAbs(a[24], 1e-15));
  CHECK_THAT(t[5], WithinAbs(a[27], 1e-15));
  CHECK_THAT(t[8], WithinAbs(a[33], 1e-15));
  CHECK_THAT(t[6], WithinAbs(a[15], 1e-15));
  // b2 and b7 never bind below their joint-decoding companions here.
  CHECK(t[2] >= 0.5 * t[3] - 1e-15);
  CHECK(t[7] >= 0.5 * t[8] - 1e-15);
}

TEST_CASE("region sizes", "[multi_state]") {
  const auto one = general_region(uniform_model(1), PowerAllocation::symmetric(LayerMap(1, 1.0)));
  REQUIRE(one.size() == 1);
  const double P = 10.0, a = 1.0;
  CHECK_THAT(one.constraints()[0].bound,
             WithinAbs(std::min(oracle::cap(a, 0, P), 0.5 * oracle::cap(2 * a, 0, P)), 1e-15));

  CHECK(general_region(uniform_model(3), PowerAllocation::symmetric(LayerMap(3, 1.0 / 9))).size() == 18);
  CHECK(general_region(uniform_model(4), PowerAllocation::symmetric(LayerMap(4, 1.0 / 16))).size() ==
        6 * 5 + 4);
  // Strict second set loses the single-strong-user term at ell = 2, so the
  // sum row is looser than its two-state counterpart.
  const auto pa = PowerAllocation::two_state(0.4, 0.3, 0.2, 0.1);
  const auto strict = general_region(kReference, pa, SecondSetForm::kStrict);
  CHECK(strict.size() == 7);
  CHECK_FALSE(bound_terms(kReference, pa, 1, 2, SecondSetForm::kStrict).has(6));
  CHECK(strict.constraints()[4].bound >= two_state::region_terms(kReference, pa).r1);
}

TEST_CASE("reduction check passes on hand and random allocations", "[multi_state]") {
  CHECK(reduction_check(kReference, PowerAllocation::two_state(0.4, 0.3, 0.2, 0.1)).pass);
  const auto top = reduction_check(kReference, PowerAllocation::two_state(0, 0, 0, 1));
  CHECK(top.pass);
  for (const auto& e : top.entries)
    if (e.name == "r22") CHECK_THAT(e.general, WithinAbs(0.25 * std::log2(21.0), 1e-15));

  std::mt19937_64 rng(200);
  for (int i = 0; i < 200; ++i) {
    const auto rep = reduction_check(kReference, random_allocation(rng, 2));
    CHECK(rep.pass);
    CHECK(rep.max_deviation <= 1e-12);
  }
}

TEST_CASE("strict second set fails the reduction", "[multi_state]") {
  const auto rep = reduction_check(kReference, PowerAllocation::two_state(0.4, 0.3, 0.2, 0.1),
                                    SecondSetForm::kStrict);
  CHECK_FALSE(rep.pass);
  CHECK(std::isinf(rep.max_deviation));
}

TEST_CASE("decode table at ell = 2", "[multi_state][decode]") {
  const DecodeTable t(2);
  const Stream w1_11{1, 1, 1}, w2_11{2, 1, 1}, w1_12{1, 1, 2}, w2_12{2, 1, 2}, w1_21{1, 2, 1},
      w2_21{2, 2, 1}, w1_22{1, 2, 2}, w2_22{2, 2, 2};
  CHECK(t.at(1, 1) == Set{w1_11, w2_11});
  CHECK(t.at(1, 2) == Set{w1_11, w2_11, w1_12, w2_21});
  CHECK(t.at(2, 1) == Set{w1_11, w2_11, w1_21, w2_12});
  CHECK(t.at(2, 2) == Set{w1_11, w2_11, w1_12, w2_21, w1_21, w2_12, w1_22, w2_22});
  CHECK_THROWS_AS(t.at(0, 1), std::out_of_range);
  CHECK_THROWS_AS(DecodeTable(0), std::invalid_argument);
}

TEST_CASE("decode table invariants up to ell = 6", "[multi_state][decode]") {
  for (int ell = 1; ell <= 6; ++ell) {
    const DecodeTable t(ell);
    CHECK(t.at(1, 1).size() == 2);
    CHECK(t.at(ell, ell).size() == static_cast<std::size_t>(2 * ell * ell));
    std::map<Stream, int> first_seen;
    for (int p = 1; p <= ell; ++p) {
      for (int q = 1; q <= ell; ++q) {
        const Set& s = t.at(p, q);
        if (p > 1) CHECK(std::includes(s.begin(), s.end(), t.at(p - 1, q).begin(), t.at(p - 1, q).end()));
        if (q > 1) CHECK(std::includes(s.begin(), s.end(), t.at(p, q - 1).begin(), t.at(p, q - 1).end()));
        for (const Stream& w : DecodeTable::new_streams(p, q)) CHECK(s.count(w) == 1);
        // W^1_uv is decoded iff h2 state >= u and h1 state >= v; W^2_uv iff h1 >= u and h2 >= v.
        for (const Stream& w : s) {
          if (w.user == 1) CHECK((p >= w.u && q >= w.v));
          else CHECK((q >= w.u && p >= w.v));
        }
        std::size_t expected = 0;
        for (int u = 1; u <= ell; ++u)
          for (int v = 1; v <= ell; ++v) expected += (p >= u && q >= v) + (q >= u && p >= v);
        CHECK(s.size() == expected);
        for (const Stream& w : s) {
          bool in_parent = (p > 1 && t.at(p - 1, q).count(w)) || (q > 1 && t.at(p, q - 1).count(w));
          if (!in_parent) ++first_seen[w];
        }
      }
    }
    CHECK(first_seen.size() == static_cast<std::size_t>(2 * ell * ell));
    for (const auto& [w, n] : first_seen) CHECK(n == 1);
  }
}

TEST_CASE("three-state region is well formed", "[multi_state]") {
  std::mt19937_64 rng(31);
  const ChannelModel m = uniform_model(3);
  for (int i = 0; i < 50; ++i) {
    const RateRegion r = general_region(m, random_allocation(rng, 3));
    CHECK(r.contains(RateVector(3)));
    for (const auto& row : r.constraints()) CHECK(row.bound >= 0.0);
    // Every rate is bounded, so a positive objective has a finite optimum.
    const auto opt = maximize_linear(r, LayerMap(3, 1.0));
    CHECK(std::isfinite(opt.value));
    CHECK(r.contains(opt.arg, 1e-9));
  }
}
