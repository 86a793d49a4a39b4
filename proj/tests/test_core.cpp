#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "bamac/core.hpp"
#include "bamac/simplex.hpp"
#include "oracles.hpp"

using namespace bamac;
using Catch::Matchers::WithinAbs;

TEST_CASE("cap_term hand values", "[core]") {
  CHECK(cap_term(0.0, 0.7, 10.0) == 0.0);
  CHECK_THAT(cap_term(1.0, 0.0, 10.0), WithinAbs(0.5 * std::log2(11.0), 1e-15));
  CHECK_THAT(cap_term(1.0, 0.0, 10.0), WithinAbs(1.729716, 1e-6));
  CHECK_THAT(cap_term(2.0, 0.0, 10.0), WithinAbs(2.196158, 1e-6));
  // 0.3 against 0.2 + 0.1 of noise
  CHECK_THAT(cap_term(0.3, 0.2, 10.0), WithinAbs(0.5, 1e-15));
}

TEST_CASE("cap_term domain errors", "[core]") {
  CHECK_THROWS_AS(cap_term(-0.1, 0.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(cap_term(0.1, -0.5, 10.0), std::domain_error);
  CHECK_THROWS_AS(cap_term(0.1, 0.0, 0.0), std::domain_error);
  CHECK_NOTHROW(cap_term(-1e-16, 0.0, 1.0));
}

TEST_CASE("cap_term scaling and monotonicity", "[core]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng), P = 0.5 + u(rng) * 5;
    CHECK_THAT(cap_term(x, y, P), WithinAbs(oracle::cap(x, y, P), 1e-14));
    CHECK(cap_term(x + 0.1, y, P) >= cap_term(x, y, P));
    CHECK(cap_term(x, y + 0.1, P) <= cap_term(x, y, P));
    // scaling both powers by k > 1 helps
    CHECK(cap_term(2 * x, 2 * y, P) >= cap_term(x, y, P) - 1e-15);
  }
}

TEST_CASE("validate_model", "[core]") {
  ChannelModel ok{2, {0.25, 1.0}, 10.0, {0.4, 0.6}};
  CHECK(validate_model(ok).ok());

  ChannelModel unordered{2, {1.0, 0.25}, 10.0, {0.4, 0.6}};
  CHECK_FALSE(validate_model(unordered).ok());
  CHECK_THROWS_AS(require_valid(unordered), std::invalid_argument);

  ChannelModel unnormalized{2, {0.25, 1.0}, 10.0, {0.5, 0.6}};
  CHECK_FALSE(validate_model(unnormalized).ok());

  ChannelModel bad_power{2, {0.25, 1.0}, 0.0, {0.5, 0.5}};
  CHECK_FALSE(validate_model(bad_power).ok());

  ChannelModel size_mismatch{3, {0.25, 1.0}, 1.0, {0.5, 0.5}};
  CHECK_FALSE(validate_model(size_mismatch).ok());

  ChannelModel zero_gain{2, {0.0, 1.0}, 1.0, {0.5, 0.5}};
  CHECK_FALSE(validate_model(zero_gain).ok());

  ChannelModel negative_prob{2, {0.5, 1.0}, 1.0, {1.5, -0.5}};
  CHECK_FALSE(validate_model(negative_prob).ok());
}

TEST_CASE("LayerGrid indexing", "[core]") {
  LayerMap m = LayerMap::from_rows({{1, 2}, {3, 4}});
  CHECK(m(1, 2) == 2);
  CHECK(m(2, 1) == 3);
  CHECK(m.flat() == std::vector<double>{1, 2, 3, 4});
  CHECK(m.sum() == 10);
  CHECK_THROWS_AS(m(0, 1), std::out_of_range);
  CHECK_THROWS_AS(m(1, 3), std::out_of_range);
  CHECK_THROWS_AS(LayerMap::from_rows({{1, 2}, {3}}), std::invalid_argument);
  CHECK(LayerMap::from_rows(m.rows()) == m);
}

TEST_CASE("PowerAllocation validation", "[core]") {
  CHECK_NOTHROW(PowerAllocation::two_state(0.4, 0.3, 0.2, 0.1));
  CHECK_THROWS_AS(PowerAllocation::two_state(0.4, 0.3, 0.2, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(PowerAllocation::two_state(1.2, -0.2, 0.0, 0.0), std::invalid_argument);

  const auto sym = PowerAllocation::two_state(0.4, 0.3, 0.2, 0.1);
  CHECK(sym.is_symmetric());
  CHECK(sym.user(1) == sym.user(2));
  CHECK_THROWS_AS(sym.user(3), std::out_of_range);

  const auto asym = PowerAllocation::asymmetric(LayerMap::from_rows({{0.5, 0.5}, {0.0, 0.0}}),
                                                LayerMap::from_rows({{0.25, 0.25}, {0.25, 0.25}}));
  CHECK_FALSE(asym.is_symmetric());
  CHECK_THROWS_AS(asym.shared(), std::invalid_argument);

  const auto equal_maps = PowerAllocation::asymmetric(LayerMap::from_rows({{0.5, 0.5}, {0.0, 0.0}}),
                                                      LayerMap::from_rows({{0.5, 0.5}, {0.0, 0.0}}));
  CHECK(equal_maps.is_symmetric());
  CHECK_FALSE(equal_maps.declared_symmetric());
}

TEST_CASE("RateVector", "[core]") {
  RateVector z(3);
  CHECK(z.map().sum() == 0.0);
  auto rv = RateVector::two_state(0.1, 0.2, 0.3, 0.4);
  CHECK(rv(2, 1) == 0.3);
  CHECK_THROWS_AS(rv.set(1, 1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(RateVector(LayerMap::from_rows({{-0.1}})), std::invalid_argument);
}

TEST_CASE("simplex grid counts", "[core][simplex]") {
  CHECK(simplex_grid(2, 1.0).size() == 4);
  CHECK(simplex_grid(2, 0.5).size() == 10);
  const auto one = simplex_grid(1, 0.25);
  REQUIRE(one.size() == 1);
  CHECK(one.front().shared()(1, 1) == 1.0);

  // Brute-force count of 4-part compositions.
  for (int n : {1, 2, 5, 10, 20}) {
    std::uint64_t brute = 0;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b)
        for (int c = 0; a + b + c <= n; ++c) ++brute;
    CHECK(simplex_point_count(2, 1.0 / n) == brute);
  }
  CHECK(simplex_point_count(2, 0.02) == 23426);
  CHECK(simplex_point_count(3, 0.5) == 45);
}

TEST_CASE("simplex grid points are distinct and on the simplex", "[core][simplex]") {
  const auto pts = simplex_grid(2, 0.25);
  std::set<std::vector<double>> seen;
  for (const auto& pa : pts) {
    CHECK_THAT(pa.shared().sum(), WithinAbs(1.0, 1e-12));
    for (double b : pa.shared().flat()) {
      CHECK(b >= 0.0);
      CHECK_THAT(b * 4, WithinAbs(std::round(b * 4), 1e-12));
    }
    seen.insert(pa.shared().flat());
  }
  CHECK(seen.size() == pts.size());
  // Lexicographic order, first entry slowest.
  CHECK(pts.front().shared().flat() == std::vector<double>{0, 0, 0, 1});
  CHECK(pts.back().shared().flat() == std::vector<double>{1, 0, 0, 0});
}

TEST_CASE("simplex grid rejects bad resolutions", "[core][simplex]") {
  CHECK_THROWS_AS(simplex_grid(2, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(simplex_grid(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(simplex_grid(2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(simplex_grid(0, 0.5), std::invalid_argument);
}
