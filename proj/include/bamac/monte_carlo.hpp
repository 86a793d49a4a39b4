// Seeded Monte Carlo estimate of the average decoded rate.
//
// Generator: std::mt19937_64. Trials are cut into fixed-size blocks; block b
// is seeded with splitmix64(seed + 0x9E3779B97F4A7C15 * (b + 1)). Each trial
// draws u = (gen() >> 11) * 2^-53 for h1 and then for h2 and maps it through
// the inverse CDF of probs. Block statistics are merged in block order, so
// the report does not depend on the thread count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bamac/core.hpp"
#include "bamac/multi_state.hpp"
#include "bamac/rate_opt.hpp"

namespace bamac {

inline constexpr const char* kGeneratorId = "mt19937_64";

struct SimConfig {
  std::uint64_t trials = 200000;
  std::uint64_t seed = 0;
  ChannelModel model;
  RateVector rates;
  PowerAllocation allocation;
  unsigned threads = 1;
  std::uint64_t block_size = 65536;
};

struct SimReport {
  double empirical_mean = 0.0;
  double std_error = 0.0;
  double formula_value = 0.0;
  double z_score = 0.0;
  std::map<std::pair<int, int>, std::uint64_t> per_state_counts;  // (h2 state, h1 state)
  std::string generator = kGeneratorId;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (block + 1));
}

namespace detail {

struct BlockStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::vector<std::uint64_t> counts;
};

inline int draw_state(std::mt19937_64& gen, const std::vector<double>& cdf, int last_positive) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  for (std::size_t i = 0; i < cdf.size(); ++i)
    if (u < cdf[i]) return static_cast<int>(i) + 1;
  return last_positive;
}

inline void merge(BlockStats& into, const BlockStats& b) {
  if (b.n == 0) return;
  const double n = static_cast<double>(into.n + b.n);
  const double delta = b.mean - into.mean;
  into.mean += delta * static_cast<double>(b.n) / n;
  into.m2 += b.m2 + delta * delta * static_cast<double>(into.n) * static_cast<double>(b.n) / n;
  into.n += b.n;
  for (std::size_t i = 0; i < into.counts.size(); ++i) into.counts[i] += b.counts[i];
}

}  // namespace detail

inline SimReport run_sim(const SimConfig& cfg) {
  const ChannelModel& m = cfg.model;
  require_valid(m);
  if (cfg.trials == 0) throw std::invalid_argument("run_sim: trials must be >= 1");
  if (cfg.block_size == 0) throw std::invalid_argument("run_sim: block_size must be >= 1");
  if (cfg.rates.ell() != m.ell) throw std::invalid_argument("run_sim: rate vector dimension differs from ell");
  const auto bad = achievable_region(m, cfg.allocation).violations(cfg.rates);
  if (!bad.empty())
    throw std::invalid_argument("run_sim: rates are infeasible at the allocation (" + bad.front().description + ")");

  const int ell = m.ell;
  const multi_state::DecodeTable table(ell);
  std::vector<double> decoded(static_cast<std::size_t>(ell * ell), 0.0);
  for (int p = 1; p <= ell; ++p)
    for (int q = 1; q <= ell; ++q)
      for (const auto& s : table.at(p, q)) decoded[(p - 1) * ell + (q - 1)] += cfg.rates(s.u, s.v);

  std::vector<double> cdf(static_cast<std::size_t>(ell));
  double acc = 0.0;
  int last_positive = 1;
  for (int i = 0; i < ell; ++i) {
    acc += m.probs[i];
    cdf[i] = acc;
    if (m.probs[i] > 0.0) last_positive = i + 1;
  }

  const std::uint64_t blocks = (cfg.trials + cfg.block_size - 1) / cfg.block_size;
  std::vector<detail::BlockStats> stats(blocks);
  auto run_block = [&](std::uint64_t b) {
    detail::BlockStats& s = stats[b];
    s.counts.assign(decoded.size(), 0);
    const std::uint64_t n = std::min(cfg.block_size, cfg.trials - b * cfg.block_size);
    std::mt19937_64 gen(block_seed(cfg.seed, b));
    for (std::uint64_t t = 0; t < n; ++t) {
      const int h1 = detail::draw_state(gen, cdf, last_positive);
      const int h2 = detail::draw_state(gen, cdf, last_positive);
      const std::size_t idx = static_cast<std::size_t>((h2 - 1) * ell + (h1 - 1));
      ++s.counts[idx];
      const double x = decoded[idx];
      ++s.n;
      const double delta = x - s.mean;
      s.mean += delta / static_cast<double>(s.n);
      s.m2 += delta * (x - s.mean);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(blocks)));
  if (workers == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t b = w; b < blocks; b += workers) run_block(b);
      });
    for (auto& t : pool) t.join();
  }

  detail::BlockStats total;
  total.counts.assign(decoded.size(), 0);
  for (const auto& s : stats) detail::merge(total, s);

  SimReport r;
  r.trials = cfg.trials;
  r.seed = cfg.seed;
  r.empirical_mean = total.mean;
  const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
  r.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(total.n));
  r.formula_value = average_rate_general(m, cfg.rates, table);
  r.z_score = r.std_error > 0.0 ? (r.empirical_mean - r.formula_value) / r.std_error : 0.0;
  for (int p = 1; p <= ell; ++p)
    for (int q = 1; q <= ell; ++q) r.per_state_counts[{p, q}] = total.counts[(p - 1) * ell + (q - 1)];
  return r;
}

}  // namespace bamac
