#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/model.hpp"

namespace mnam {

// Where and how hard the monotonicity penalties bite.
//
// feature_points[i] holds the points at which feature i's slope is
// penalized (sorted, deduplicated; empty for unconstrained features).
// pair_points[j] holds the shared points for pairwise constraint j, the
// union of both members' points. margin is the strictness epsilon: the
// hinge activates when a slope (or slope gap) falls below it, so a zero
// penalty certifies slopes >= margin at every evaluated point.
struct PenaltyConfig {
  double lambda = 0.0;
  double eta = 0.0;
  double margin = 1e-3;
  std::vector<std::vector<double>> feature_points;
  std::vector<std::vector<double>> pair_points;

  void validate(const ModelSpec& spec) const {
    if (lambda < 0.0 || eta < 0.0 || margin < 0.0)
      throw SpecError("penalty weights and margin must be nonnegative");
    if (feature_points.size() != spec.features.size())
      throw SpecError("penalty config covers " +
                      std::to_string(feature_points.size()) + " features, spec has " +
                      std::to_string(spec.features.size()));
    for (const auto& c : spec.monotone_features)
      if (feature_points[c.feature].empty())
        throw SpecError("no evaluation points for constrained feature '" +
                        spec.features[c.feature].name + "'");
    if (pair_points.size() != spec.pairwise_constraints.size())
      throw SpecError("penalty config covers " + std::to_string(pair_points.size()) +
                      " pairs, spec has " +
                      std::to_string(spec.pairwise_constraints.size()));
    for (std::size_t j = 0; j < pair_points.size(); ++j)
      if (pair_points[j].empty())
        throw SpecError("no evaluation points for pairwise constraint " +
                        std::to_string(j));
  }
};

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Evaluation points from the training data: each constrained feature is
// penalized at its occupied values, each pair at the union of both members'
// values. Duplicates are collapsed; the hinge-zero condition is unchanged
// and the cost stays proportional to the number of distinct values.
inline PenaltyConfig build_penalty_config(const Dataset& data,
                                          const ModelSpec& spec,
                                          double lambda, double eta,
                                          double margin) {
  spec.validate();
  PenaltyConfig cfg;
  cfg.lambda = lambda;
  cfg.eta = eta;
  cfg.margin = margin;
  cfg.feature_points.resize(spec.features.size());
  for (const auto& c : spec.monotone_features)
    cfg.feature_points[c.feature] = sorted_unique(data.columns[c.feature]);
  cfg.pair_points.reserve(spec.pairwise_constraints.size());
  for (const auto& pc : spec.pairwise_constraints) {
    const auto& mu = spec.features[pc.dominant];
    const auto& mv = spec.features[pc.dominated];
    if (mu.max < mv.min || mv.max < mu.min)
      throw SpecError("pairwise constraint (" + mu.name + " over " + mv.name +
                      ") has disjoint observed ranges; no comparable domain");
    std::vector<double> merged = data.columns[pc.dominant];
    merged.insert(merged.end(), data.columns[pc.dominated].begin(),
                  data.columns[pc.dominated].end());
    cfg.pair_points.push_back(sorted_unique(std::move(merged)));
  }
  return cfg;
}

// h1 = sum over constrained features, sum over their points, of
// max(0, margin - f'(x))^2. Zero exactly when every penalized slope
// clears the margin.
inline double penalty_individual(const NamModel& m, const PenaltyConfig& cfg) {
  cfg.validate(m.spec);
  double h1 = 0.0;
  for (const auto& c : m.spec.monotone_features) {
    const auto& net = m.nets[c.feature];
    for (double t : cfg.feature_points[c.feature]) {
      const double a = cfg.margin - input_derivative(net, t);
      if (a > 0.0) h1 += a * a;
    }
  }
  return h1;
}

// h2 = sum over pairs, sum over shared points, of
// max(0, margin - (f'_dominant - f'_dominated))^2.
inline double penalty_pairwise(const NamModel& m, const PenaltyConfig& cfg) {
  cfg.validate(m.spec);
  double h2 = 0.0;
  for (std::size_t j = 0; j < m.spec.pairwise_constraints.size(); ++j) {
    const auto& pc = m.spec.pairwise_constraints[j];
    const auto& mu = m.spec.features[pc.dominant];
    const auto& mv = m.spec.features[pc.dominated];
    if (mu.max < mv.min || mv.max < mu.min)
      throw SpecError("pairwise constraint (" + mu.name + " over " + mv.name +
                      ") has disjoint observed ranges; no comparable domain");
    for (double t : cfg.pair_points[j]) {
      const double gap = input_derivative(m.nets[pc.dominant], t) -
                         input_derivative(m.nets[pc.dominated], t);
      const double a = cfg.margin - gap;
      if (a > 0.0) h2 += a * a;
    }
  }
  return h2;
}

// Gradient holder shaped like the model's parameters.
struct ModelGradient {
  double intercept = 0.0;
  std::vector<NetGradient> nets;

  explicit ModelGradient(std::size_t features) : nets(features, NetGradient{}) {}
};

// Exact gradient of lambda*h1 + eta*h2. The intercept and every
// unconstrained feature's parameters get zero.
inline ModelGradient penalty_gradient(const NamModel& m,
                                      const PenaltyConfig& cfg) {
  cfg.validate(m.spec);
  ModelGradient grad(m.nets.size());
  if (cfg.lambda > 0.0) {
    for (const auto& c : m.spec.monotone_features) {
      const auto& net = m.nets[c.feature];
      auto& g = grad.nets[c.feature];
      for (double t : cfg.feature_points[c.feature]) {
        const double a = cfg.margin - input_derivative(net, t);
        if (a <= 0.0) continue;
        const NetGradient mg = mixed_gradient(net, t);
        const double coef = -2.0 * cfg.lambda * a;
        for (std::size_t i = 0; i < kFeatureNetParamCount; ++i)
          g[i] += coef * mg[i];
      }
    }
  }
  if (cfg.eta > 0.0) {
    for (std::size_t j = 0; j < m.spec.pairwise_constraints.size(); ++j) {
      const auto& pc = m.spec.pairwise_constraints[j];
      auto& gu = grad.nets[pc.dominant];
      auto& gv = grad.nets[pc.dominated];
      for (double t : cfg.pair_points[j]) {
        const double gap = input_derivative(m.nets[pc.dominant], t) -
                           input_derivative(m.nets[pc.dominated], t);
        const double a = cfg.margin - gap;
        if (a <= 0.0) continue;
        const NetGradient mu = mixed_gradient(m.nets[pc.dominant], t);
        const NetGradient mv = mixed_gradient(m.nets[pc.dominated], t);
        const double coef = 2.0 * cfg.eta * a;
        for (std::size_t i = 0; i < kFeatureNetParamCount; ++i) {
          gu[i] -= coef * mu[i];
          gv[i] += coef * mv[i];
        }
      }
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Grid certification

struct IndividualCertification {
  int feature = -1;
  std::string name;
  double min_derivative = 0.0;
  double argmin = 0.0;
  double grid_lo = 0.0, grid_hi = 0.0;
  bool pass = false;
  bool degenerate_range = false;  // min == max collapsed to one point
  std::vector<double> violations;  // grid points with a negative slope
};

struct PairwiseCertification {
  int dominant = -1;
  int dominated = -1;
  std::string dominant_name, dominated_name;
  double min_gap = 0.0;
  double argmin = 0.0;
  double grid_lo = 0.0, grid_hi = 0.0;
  bool pass = false;
  std::vector<double> violations;  // grid points with a negative slope gap
};

struct CertificationReport {
  std::vector<IndividualCertification> individual;
  std::vector<PairwiseCertification> pairwise;
  int resolution = 0;

  bool all_pass() const {
    for (const auto& c : individual)
      if (!c.pass) return false;
    for (const auto& c : pairwise)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::vector<double> certification_grid(double lo, double hi,
                                              int resolution,
                                              const std::vector<double>& extra) {
  std::vector<double> grid;
  if (hi > lo) {
    grid.reserve(static_cast<std::size_t>(resolution) + extra.size());
    for (int i = 0; i < resolution; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(resolution - 1));
  } else {
    grid.push_back(lo);
  }
  for (double t : extra)
    if (t >= lo && t <= hi) grid.push_back(t);
  return sorted_unique(std::move(grid));
}

}

// Evaluates each constrained slope (and each pairwise slope gap) over a
// uniform grid spanning the observed range, augmented with the supplied
// training values. Pass means the minimum over the grid is >= 0; the raw
// threshold is deliberately stricter than nothing and looser than the
// training margin, so a certified model stays certified under grid
// refinement. Soundness is grid-limited: pass asserts the sign at every
// evaluated point, not over the continuum.
inline CertificationReport certify(const NamModel& m, int resolution,
                                   const PenaltyConfig& cfg) {
  m.validate();
  if (resolution < 2) throw SpecError("certification grid needs >= 2 points");
  if (!m.spec.has_constraints())
    throw SpecError("certify called on a spec without constraints");
  CertificationReport report;
  report.resolution = resolution;

  for (const auto& c : m.spec.monotone_features) {
    const FeatureMeta& meta = m.spec.features[c.feature];
    IndividualCertification cert;
    cert.feature = c.feature;
    cert.name = meta.name;
    cert.grid_lo = meta.min;
    cert.grid_hi = meta.max;
    cert.degenerate_range = !(meta.max > meta.min);
    const auto grid = detail::certification_grid(
        meta.min, meta.max, resolution, cfg.feature_points[c.feature]);
    double best = std::numeric_limits<double>::infinity();
    double arg = grid.front();
    for (double t : grid) {
      const double d = input_derivative(m.nets[c.feature], t);
      if (d < best) {
        best = d;
        arg = t;
      }
      if (d < 0.0) cert.violations.push_back(t);
    }
    cert.min_derivative = best;
    cert.argmin = arg;
    cert.pass = best >= 0.0;
    report.individual.push_back(std::move(cert));
  }

  for (std::size_t j = 0; j < m.spec.pairwise_constraints.size(); ++j) {
    const auto& pc = m.spec.pairwise_constraints[j];
    const FeatureMeta& mu = m.spec.features[pc.dominant];
    const FeatureMeta& mv = m.spec.features[pc.dominated];
    PairwiseCertification cert;
    cert.dominant = pc.dominant;
    cert.dominated = pc.dominated;
    cert.dominant_name = mu.name;
    cert.dominated_name = mv.name;
    cert.grid_lo = std::min(mu.min, mv.min);
    cert.grid_hi = std::max(mu.max, mv.max);
    const auto grid = detail::certification_grid(cert.grid_lo, cert.grid_hi,
                                                 resolution, cfg.pair_points[j]);
    double best = std::numeric_limits<double>::infinity();
    double arg = grid.front();
    for (double t : grid) {
      const double gap = input_derivative(m.nets[pc.dominant], t) -
                         input_derivative(m.nets[pc.dominated], t);
      if (gap < best) {
        best = gap;
        arg = t;
      }
      if (gap < 0.0) cert.violations.push_back(t);
    }
    cert.min_gap = best;
    cert.argmin = arg;
    cert.pass = best >= 0.0;
    report.pairwise.push_back(std::move(cert));
  }
  return report;
}

}
