#include <catch_amalgamated.hpp>

#include <cmath>

#include "bamac/monte_carlo.hpp"

using namespace bamac;
using Catch::Matchers::WithinAbs;

namespace {

SimConfig two_state_config(double p, std::uint64_t seed, std::uint64_t trials) {
  SimConfig c;
  c.model = ChannelModel::two_state(0.25, 1.0, 10.0, p);
  c.allocation = PowerAllocation::two_state(0.25, 0.25, 0.25, 0.25);
  c.rates = RateVector::two_state(0.02, 0.05, 0.05, 0.1);
  c.seed = seed;
  c.trials = trials;
  return c;
}

// Direct sum over the joint states of prob times decoded rate, with the
// decoded sets written from the threshold rule rather than the table.
double exhaustive(const ChannelModel& m, const RateVector& rv) {
  double total = 0.0;
  for (int p = 1; p <= m.ell; ++p)
    for (int q = 1; q <= m.ell; ++q) {
      double decoded = 0.0;
      for (int u = 1; u <= m.ell; ++u)
        for (int v = 1; v <= m.ell; ++v)
          decoded += rv(u, v) * ((p >= u && q >= v) + (q >= u && p >= v));
      total += m.prob(p) * m.prob(q) * decoded;
    }
  return total;
}

}  // namespace

TEST_CASE("degenerate weak-weak channel", "[mc]") {
  SimConfig c = two_state_config(1.0, 5, 1000);
  const auto r = run_sim(c);
  CHECK(r.empirical_mean == 2 * 0.02);
  CHECK(r.std_error == 0.0);
  CHECK(r.z_score == 0.0);
  CHECK(r.per_state_counts.at({1, 1}) == 1000);
  CHECK(r.generator == "mt19937_64");
}

TEST_CASE("same seed, same report; thread count does not matter", "[mc]") {
  SimConfig c = two_state_config(0.4, 42, 50000);
  c.block_size = 4096;
  const auto a = run_sim(c);
  c.threads = 4;
  const auto b = run_sim(c);
  CHECK(a.empirical_mean == b.empirical_mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.per_state_counts == b.per_state_counts);
  c.seed = 43;
  const auto d = run_sim(c);
  CHECK(d.per_state_counts != a.per_state_counts);
}

TEST_CASE("state sequence is fixed by the documented derivation", "[mc]") {
  // Re-derive the first trials of block 0 by hand.
  const std::uint64_t seed = 9;
  std::mt19937_64 gen(splitmix64(seed + 0x9E3779B97F4A7C15ULL));
  const double p = 0.4;
  std::map<std::pair<int, int>, std::uint64_t> counts;
  for (int t = 0; t < 100; ++t) {
    const double u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    ++counts[{u2 < p ? 1 : 2, u1 < p ? 1 : 2}];
  }
  const auto r = run_sim(two_state_config(p, seed, 100));
  for (const auto& [k, n] : r.per_state_counts) CHECK(counts[k] == n);
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("counts track the state probabilities", "[mc]") {
  const double p = 0.4;
  const std::uint64_t n = 200000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = run_sim(two_state_config(p, seed, n));
    std::uint64_t total = 0;
    for (const auto& [k, c] : r.per_state_counts) {
      total += c;
      const double pk = (k.first == 1 ? p : 1 - p) * (k.second == 1 ? p : 1 - p);
      const double sd = std::sqrt(n * pk * (1 - pk));
      CHECK(std::abs(static_cast<double>(c) - n * pk) <= 4 * sd);
    }
    CHECK(total == n);
  }
}

TEST_CASE("formula value equals the exhaustive expectation", "[mc]") {
  for (int ell = 1; ell <= 3; ++ell) {
    ChannelModel m{ell, {}, 10.0, {}};
    double s = 0;
    for (int i = 1; i <= ell; ++i) {
      m.alphas.push_back(static_cast<double>(i) / ell);
      m.probs.push_back(static_cast<double>(i));
      s += i;
    }
    for (double& x : m.probs) x /= s;
    SimConfig c;
    c.model = m;
    c.allocation = PowerAllocation::symmetric(LayerMap(ell, 1.0 / (ell * ell)));
    c.rates = RateVector(LayerMap(ell, 0.0));
    c.trials = 10;
    CHECK_THAT(run_sim(c).formula_value, WithinAbs(0.0, 1e-15));
    LayerMap r(ell, 0.0);
    r(1, 1) = 1e-3;
    if (ell > 1) r(ell, 1) = 2e-4;
    c.rates = RateVector(r);
    CHECK_THAT(run_sim(c).formula_value, WithinAbs(exhaustive(m, c.rates), 1e-12));
  }
}

TEST_CASE("empirical mean converges", "[mc]") {
  // Flake policy: one rerun with shifted seeds.
  auto pass_rate = [](std::uint64_t offset) {
    int ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto r = run_sim(two_state_config(0.4, 1000 + offset + s, 5000));
      if (std::abs(r.empirical_mean - r.formula_value) <= 4 * r.std_error) ++ok;
    }
    return ok;
  };
  int ok = pass_rate(0);
  if (ok < 99) ok = pass_rate(100000);
  CHECK(ok >= 99);
}

TEST_CASE("configuration errors", "[mc]") {
  SimConfig c = two_state_config(0.4, 1, 0);
  CHECK_THROWS_AS(run_sim(c), std::invalid_argument);
  c.trials = 10;
  c.rates = RateVector::two_state(5, 0, 0, 0);
  CHECK_THROWS_AS(run_sim(c), std::invalid_argument);
  c.rates = RateVector(3);
  CHECK_THROWS_AS(run_sim(c), std::invalid_argument);
}
