#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/simulation.hpp"
#include "mnam/types.hpp"

namespace mnam {

// Classification error, AUC, and the 2x2 confusion matrix ("yes" is the
// positive class). AUC is the exact rank statistic: the probability that a
// random positive outranks a random negative, ties counted one half. It is
// undefined (absent) when only one class appears.
struct MetricsReport {
  double error = 0.0;
  std::optional<double> auc;
  long tp = 0, fn = 0, fp = 0, tn = 0;
  double threshold = 0.5;
  std::size_t n = 0;
};

inline MetricsReport metrics(std::span<const double> probabilities,
                             std::span<const double> labels,
                             double threshold = 0.5) {
  if (probabilities.size() != labels.size())
    throw DataError("metrics: probabilities and labels differ in length");
  if (probabilities.empty()) throw DataError("metrics: empty input");
  MetricsReport rep;
  rep.threshold = threshold;
  rep.n = probabilities.size();
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    const double y = labels[i];
    if (y != 0.0 && y != 1.0)
      throw DataError("metrics: label at row " + std::to_string(i) +
                      " is not 0/1");
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError("metrics: probability at row " + std::to_string(i) +
                      " outside [0,1]");
    const bool predicted_yes = p >= threshold;  // ties go to the positive class
    if (predicted_yes)
      y == 1.0 ? ++rep.tp : ++rep.fp;
    else
      y == 1.0 ? ++rep.fn : ++rep.tn;
  }
  rep.error = static_cast<double>(rep.fp + rep.fn) / static_cast<double>(rep.n);

  const std::size_t n_pos = static_cast<std::size_t>(rep.tp + rep.fn);
  const std::size_t n_neg = rep.n - n_pos;
  if (n_pos == 0 || n_neg == 0) return rep;  // AUC undefined

  // Midrank formulation of the Mann-Whitney statistic.
  std::vector<std::size_t> idx(rep.n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return probabilities[a] < probabilities[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < rep.n) {
    std::size_t j = i;
    while (j + 1 < rep.n &&
           probabilities[idx[j + 1]] == probabilities[idx[i]])
      ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[idx[k]] == 1.0) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_pos + 1);
  rep.auc = u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical monotonicity audit: the marginal conditional curve of the label
// against each requested feature, with per-step violation flags, histogram
// counts, and discrete increment comparisons for declared pairs. Runs on
// prepared (pre-standardization) data; features must be integer-valued.

struct AuditStep {
  long from = 0;
  long to = 0;  // next occupied level; gaps are bridged
  double delta = 0.0;
  bool decreasing = false;
};

struct AuditFeature {
  int feature = -1;
  std::string name;
  MarginalCurve curve;  // over the contiguous integer range [min, max]
  std::vector<AuditStep> steps;
  bool violated = false;
  bool vacuous = false;
};

struct AuditIncrement {
  long from = 0;
  long to = 0;
  double increment_dominant = 0.0;
  double increment_dominated = 0.0;
  bool violated = false;
};

struct AuditPair {
  int dominant = -1;
  int dominated = -1;
  std::string dominant_name, dominated_name;
  std::vector<AuditIncrement> increments;
  bool violated = false;
};

struct AuditReport {
  std::vector<AuditFeature> features;
  std::vector<AuditPair> pairs;
};

namespace detail {

inline MarginalCurve audit_curve(const Dataset& data, int feature) {
  const auto& col = data.columns[feature];
  long lo = 0, hi = 0;
  bool first = true;
  for (double v : col) {
    if (v != std::floor(v))
      throw DataError("audit: feature '" + data.meta[feature].name +
                      "' is not integer-valued; bin it first");
    const long lv = static_cast<long>(v);
    lo = first ? lv : std::min(lo, lv);
    hi = first ? lv : std::max(hi, lv);
    first = false;
  }
  if (lo == hi)
    throw DataError("audit: feature '" + data.meta[feature].name +
                    "' has a single observed level");
  std::vector<long> levels;
  for (long v = lo; v <= hi; ++v) levels.push_back(v);
  return marginal_curve_at_levels(col, data.labels, levels);
}

}  // namespace detail

inline AuditReport audit_monotonicity(
    const Dataset& data, std::span<const int> features,
    std::span<const PairwiseConstraint> pairs = {}) {
  data.validate();
  AuditReport report;
  for (int f : features) {
    if (f < 0 || f >= static_cast<int>(data.n_features()))
      throw SpecError("audit: feature index " + std::to_string(f) +
                      " out of range");
    AuditFeature af;
    af.feature = f;
    af.name = data.meta[f].name;
    af.curve = detail::audit_curve(data, f);
    const MarginalCell* prev = nullptr;
    for (const auto& cell : af.curve) {
      if (!cell.present()) continue;
      if (prev) {
        AuditStep step;
        step.from = prev->x;
        step.to = cell.x;
        step.delta = cell.mean - prev->mean;
        step.decreasing = cell.mean < prev->mean;
        if (step.decreasing) af.violated = true;
        af.steps.push_back(step);
      }
      prev = &cell;
    }
    af.vacuous = af.steps.empty();
    report.features.push_back(std::move(af));
  }

  for (const auto& pc : pairs) {
    AuditPair ap;
    ap.dominant = pc.dominant;
    ap.dominated = pc.dominated;
    ap.dominant_name = data.meta[pc.dominant].name;
    ap.dominated_name = data.meta[pc.dominated].name;
    const auto cu = detail::audit_curve(data, pc.dominant);
    const auto cv = detail::audit_curve(data, pc.dominated);
    auto find = [](const MarginalCurve& c, long x) -> const MarginalCell* {
      for (const auto& cell : c)
        if (cell.x == x && cell.present()) return &cell;
      return nullptr;
    };
    const long lo = std::min(cu.front().x, cv.front().x);
    const long hi = std::max(cu.back().x, cv.back().x);
    for (long x = lo; x < hi; ++x) {
      const auto* u0 = find(cu, x);
      const auto* u1 = find(cu, x + 1);
      const auto* v0 = find(cv, x);
      const auto* v1 = find(cv, x + 1);
      if (!u0 || !u1 || !v0 || !v1) continue;
      AuditIncrement inc;
      inc.from = x;
      inc.to = x + 1;
      inc.increment_dominant = u1->mean - u0->mean;
      inc.increment_dominated = v1->mean - v0->mean;
      inc.violated = inc.increment_dominant < inc.increment_dominated;
      if (inc.violated) ap.violated = true;
      ap.increments.push_back(inc);
    }
    report.pairs.push_back(std::move(ap));
  }
  return report;
}

}
