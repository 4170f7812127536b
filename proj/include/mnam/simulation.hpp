#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/rng.hpp"

namespace mnam {

// One cell of the marginal conditional curve: the average response among
// samples where the covariate equals x. count == 0 marks an empty bin.
struct MarginalCell {
  long x = 0;
  double mean = 0.0;
  std::size_t count = 0;

  bool present() const { return count > 0; }
};

using MarginalCurve = std::vector<MarginalCell>;

// Average y at each integer level 0..x_max. Levels with no samples are kept
// in the output with count 0 so callers can see the gaps.
inline MarginalCurve empirical_marginal_curve(std::span<const int> xs,
                                              std::span<const double> ys,
                                              int x_max) {
  if (xs.size() != ys.size() || xs.empty())
    throw DataError("marginal curve needs matching nonempty samples");
  MarginalCurve curve(static_cast<std::size_t>(x_max) + 1);
  for (int v = 0; v <= x_max; ++v) curve[v].x = v;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int v = xs[i];
    if (v < 0 || v > x_max) continue;
    curve[v].mean += ys[i];
    curve[v].count += 1;
  }
  for (auto& cell : curve)
    if (cell.count > 0) cell.mean /= static_cast<double>(cell.count);
  return curve;
}

// Same computation for arbitrary (not necessarily contiguous) integer
// levels; the audit module runs real features through this.
inline MarginalCurve marginal_curve_at_levels(std::span<const double> xs,
                                              std::span<const double> ys,
                                              std::span<const long> levels) {
  if (xs.size() != ys.size() || xs.empty())
    throw DataError("marginal curve needs matching nonempty samples");
  MarginalCurve curve;
  curve.reserve(levels.size());
  for (long lvl : levels) curve.push_back({lvl, 0.0, 0});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = xs[i];
    for (auto& cell : curve) {
      if (v == static_cast<double>(cell.x)) {
        cell.mean += ys[i];
        cell.count += 1;
        break;
      }
    }
  }
  for (auto& cell : curve)
    if (cell.count > 0) cell.mean /= static_cast<double>(cell.count);
  return curve;
}

struct IndividualViolation {
  bool violated = false;
  bool vacuous = false;  // fewer than two occupied cells; nothing to compare
};

// A strict decrease anywhere along the occupied cells, reading left to
// right. Empty cells are bridged: each occupied cell is compared with the
// next occupied one, so gaps never manufacture violations.
inline IndividualViolation is_violated_individual(const MarginalCurve& curve) {
  IndividualViolation out;
  bool have_prev = false;
  double prev = 0.0;
  std::size_t present = 0;
  for (const auto& cell : curve) {
    if (!cell.present()) continue;
    ++present;
    if (have_prev && cell.mean < prev) out.violated = true;
    prev = cell.mean;
    have_prev = true;
  }
  out.vacuous = present < 2;
  if (out.vacuous) out.violated = false;
  return out;
}

// Discrete slope-dominance check: at every level x where both curves have
// occupied cells at x and x+1, the dominant curve's increment must be at
// least the dominated curve's. A strictly smaller increment anywhere is a
// pairwise violation.
inline bool is_violated_pairwise(const MarginalCurve& dominant,
                                 const MarginalCurve& dominated) {
  const std::size_t n = std::min(dominant.size(), dominated.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!dominant[i].present() || !dominant[i + 1].present() ||
        !dominated[i].present() || !dominated[i + 1].present())
      continue;
    const double inc_dom = dominant[i + 1].mean - dominant[i].mean;
    const double inc_sub = dominated[i + 1].mean - dominated[i].mean;
    if (inc_dom < inc_sub) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Monte Carlo studies of empirical violations under a log-utility DGP with
// Poisson covariates: y = alpha*log(c + X) + eps.

struct RatioEstimate {
  double ratio = 0.0;
  double std_error = 0.0;
  std::size_t violations = 0;
};

struct SimConfigIndividual {
  double alpha = 1.0;
  double c = 5.0;
  double poisson_rate = 0.5;
  double sigma = 0.2;
  std::size_t n_samples = 10000;
  std::size_t n_reps = 1000;
  int x_check_max = 4;
  std::uint64_t seed = 1;

  void validate() const {
    if (c < 1.0) throw SpecError("simulation requires c >= 1");
    if (sigma < 0.0) throw SpecError("sigma must be nonnegative");
    if (poisson_rate <= 0.0) throw SpecError("poisson rate must be positive");
    if (n_samples == 0 || n_reps == 0)
      throw SpecError("n_samples and n_reps must be positive");
    if (x_check_max < 0) throw SpecError("x_check_max must be >= 0");
  }
};

struct SimConfigPairwise {
  double alpha = 1.2;
  double beta = 1.0;
  double c = 10.0;
  double rate1 = 0.5;
  double rate2 = 0.4;
  double sigma = 0.2;
  std::size_t n_samples = 10000;
  std::size_t n_reps = 1000;
  int x_check_max = 4;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(alpha > beta)) throw SpecError("pairwise study requires alpha > beta");
    if (c < 1.0) throw SpecError("simulation requires c >= 1");
    if (sigma < 0.0) throw SpecError("sigma must be nonnegative");
    if (rate1 <= 0.0 || rate2 <= 0.0)
      throw SpecError("poisson rates must be positive");
    if (n_samples == 0 || n_reps == 0)
      throw SpecError("n_samples and n_reps must be positive");
    if (x_check_max < 0) throw SpecError("x_check_max must be >= 0");
  }
};

struct SimResultIndividual {
  RatioEstimate violation;
  std::size_t n_reps = 0;
  SimConfigIndividual config;
};

struct SimResultPairwise {
  RatioEstimate individual_x1;
  RatioEstimate individual_x2;
  RatioEstimate pairwise;
  std::size_t n_reps = 0;
  SimConfigPairwise config;
};

namespace detail {

inline RatioEstimate ratio_estimate(std::size_t violations, std::size_t reps) {
  RatioEstimate est;
  est.violations = violations;
  est.ratio = static_cast<double>(violations) / static_cast<double>(reps);
  est.std_error = std::sqrt(est.ratio * (1.0 - est.ratio) /
                            static_cast<double>(reps));
  return est;
}

// Splits [0, reps) across workers. Each replication derives its own stream
// from the root seed, so the partition cannot change the results.
template <typename PerRep>
inline void run_replications(std::size_t reps, unsigned threads, PerRep fn) {
  if (threads <= 1) {
    for (std::size_t rep = 0; rep < reps; ++rep) fn(rep);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([=] {
      for (std::size_t rep = w; rep < reps; rep += threads) fn(rep);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Per replication: n_samples of (X, y), the marginal curve over [0,
// x_check_max], and a violation flag. The violation count is exact and
// identical for any thread count.
inline SimResultIndividual simulate_individual(const SimConfigIndividual& cfg,
                                               unsigned threads = 1) {
  cfg.validate();
  SplitRng root(cfg.seed);
  std::vector<std::uint8_t> flags(cfg.n_reps, 0);
  detail::run_replications(cfg.n_reps, threads, [&](std::size_t rep) {
    SplitRng rng = root.split(rep);
    std::vector<int> xs(cfg.n_samples);
    std::vector<double> ys(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      xs[i] = rng.poisson(cfg.poisson_rate);
      ys[i] = cfg.alpha * std::log(cfg.c + xs[i]) + rng.normal(0.0, cfg.sigma);
    }
    const auto curve = empirical_marginal_curve(xs, ys, cfg.x_check_max);
    flags[rep] = is_violated_individual(curve).violated ? 1 : 0;
  });
  std::size_t violated = 0;
  for (auto f : flags) violated += f;
  SimResultIndividual result;
  result.violation = detail::ratio_estimate(violated, cfg.n_reps);
  result.n_reps = cfg.n_reps;
  result.config = cfg;
  return result;
}

inline SimResultPairwise simulate_pairwise(const SimConfigPairwise& cfg,
                                           unsigned threads = 1) {
  cfg.validate();
  SplitRng root(cfg.seed);
  std::vector<std::uint8_t> f1(cfg.n_reps, 0), f2(cfg.n_reps, 0),
      fp(cfg.n_reps, 0);
  detail::run_replications(cfg.n_reps, threads, [&](std::size_t rep) {
    SplitRng rng = root.split(rep);
    std::vector<int> x1(cfg.n_samples), x2(cfg.n_samples);
    std::vector<double> ys(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      x1[i] = rng.poisson(cfg.rate1);
      x2[i] = rng.poisson(cfg.rate2);
      ys[i] = cfg.alpha * std::log(cfg.c + x1[i]) +
              cfg.beta * std::log(cfg.c + x2[i]) + rng.normal(0.0, cfg.sigma);
    }
    const auto curve1 = empirical_marginal_curve(x1, ys, cfg.x_check_max);
    const auto curve2 = empirical_marginal_curve(x2, ys, cfg.x_check_max);
    f1[rep] = is_violated_individual(curve1).violated ? 1 : 0;
    f2[rep] = is_violated_individual(curve2).violated ? 1 : 0;
    fp[rep] = is_violated_pairwise(curve1, curve2) ? 1 : 0;
  });
  std::size_t v1 = 0, v2 = 0, vp = 0;
  for (std::size_t i = 0; i < cfg.n_reps; ++i) {
    v1 += f1[i];
    v2 += f2[i];
    vp += fp[i];
  }
  SimResultPairwise result;
  result.individual_x1 = detail::ratio_estimate(v1, cfg.n_reps);
  result.individual_x2 = detail::ratio_estimate(v2, cfg.n_reps);
  result.pairwise = detail::ratio_estimate(vp, cfg.n_reps);
  result.n_reps = cfg.n_reps;
  result.config = cfg;
  return result;
}

// The three four-cell parameter sweeps of the individual study, in table
// order: c in {5,10,15,20}, then sigma in {0.1..0.4}, then the Poisson rate
// in {0.3..0.6}. Cell seeds derive from the base seed.
struct SweepCell {
  std::string group;  // "dme", "noise", "distribution"
  SimConfigIndividual config;
};

inline std::vector<SweepCell> individual_violation_sweep(std::uint64_t seed,
                                                         std::size_t n_reps) {
  SplitRng root(seed);
  std::vector<SweepCell> cells;
  auto add = [&](const char* group, double alpha, double c, double rate,
                 double sigma) {
    SimConfigIndividual cfg;
    cfg.alpha = alpha;
    cfg.c = c;
    cfg.poisson_rate = rate;
    cfg.sigma = sigma;
    cfg.n_reps = n_reps;
    cfg.seed = root.split(cells.size()).next_u64();
    cells.push_back({group, cfg});
  };
  for (double c : {5.0, 10.0, 15.0, 20.0}) add("dme", 1.0, c, 0.5, 0.2);
  for (double sigma : {0.1, 0.2, 0.3, 0.4}) add("noise", 1.0, 10.0, 0.5, sigma);
  for (double rate : {0.3, 0.4, 0.5, 0.6}) add("distribution", 1.0, 10.0, rate, 0.2);
  return cells;
}

}
