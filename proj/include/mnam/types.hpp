#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mnam/errors.hpp"

namespace mnam {

enum class Task { kRegression, kClassification };

enum class FeatureKind { kNumeric, kBinary, kOrdinal };

enum class Direction { kIncreasing, kDecreasing };

// Record of what preprocessing did to a column. Enough to map a raw value
// into model space deterministically (and back, for reporting).
struct ColumnTransforms {
  bool negated = false;
  std::optional<double> cap;  // upper truncation, applied before negation
  bool wants_standardize = false;
  std::optional<double> standardize_mean;
  std::optional<double> standardize_sd;
  std::size_t imputed_count = 0;  // sentinel cells replaced during preparation

  bool standardized() const {
    return standardize_mean.has_value() && standardize_sd.has_value();
  }

  double to_model_space(double raw) const {
    double v = raw;
    if (cap && v > *cap) v = *cap;
    if (negated) v = -v;
    if (standardized()) v = (v - *standardize_mean) / *standardize_sd;
    return v;
  }

  double to_raw_space(double model) const {
    double v = model;
    if (standardized()) v = v * *standardize_sd + *standardize_mean;
    if (negated) v = -v;
    return v;  // caps are not invertible; callers get the truncated value
  }
};

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  double min = 0.0;  // observed range in model space
  double max = 0.0;
  ColumnTransforms transforms;
};

struct MonotoneConstraint {
  int feature = -1;
  Direction direction = Direction::kIncreasing;
};

// "dominant over dominated": the dominant feature's shape function must be
// at least as steep everywhere the pair is evaluated.
struct PairwiseConstraint {
  int dominant = -1;
  int dominated = -1;
};

struct ModelSpec {
  std::vector<FeatureMeta> features;
  Task task = Task::kRegression;
  std::vector<MonotoneConstraint> monotone_features;
  std::vector<PairwiseConstraint> pairwise_constraints;

  std::size_t feature_count() const { return features.size(); }

  bool is_monotone(int feature) const {
    for (const auto& c : monotone_features)
      if (c.feature == feature) return true;
    return false;
  }

  bool has_constraints() const {
    return !monotone_features.empty() || !pairwise_constraints.empty();
  }

  // Throws SpecError when indices are out of range, a pair repeats or
  // self-references, or a paired feature lacks its individual constraint.
  void validate() const {
    const int p = static_cast<int>(features.size());
    for (const auto& c : monotone_features) {
      if (c.feature < 0 || c.feature >= p)
        throw SpecError("monotone constraint references feature " +
                        std::to_string(c.feature) + " outside 0.." +
                        std::to_string(p - 1));
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& c : pairwise_constraints) {
      if (c.dominant < 0 || c.dominant >= p || c.dominated < 0 ||
          c.dominated >= p)
        throw SpecError("pairwise constraint references a feature outside 0.." +
                        std::to_string(p - 1));
      if (c.dominant == c.dominated)
        throw SpecError("pairwise constraint pairs feature " +
                        std::to_string(c.dominant) + " with itself");
      if (!seen.insert({c.dominant, c.dominated}).second)
        throw SpecError("duplicate pairwise constraint (" +
                        std::to_string(c.dominant) + ", " +
                        std::to_string(c.dominated) + ")");
      if (!is_monotone(c.dominant) || !is_monotone(c.dominated))
        throw SpecError("pairwise constraint (" + std::to_string(c.dominant) +
                        ", " + std::to_string(c.dominated) +
                        ") requires both features to carry an individual "
                        "monotone constraint");
    }
  }
};

// Column-major feature matrix plus labels and per-column metadata.
// Immutable once prepared; training code never mutates a Dataset.
struct Dataset {
  std::vector<std::vector<double>> columns;
  std::vector<double> labels;
  std::vector<FeatureMeta> meta;

  std::size_t n_rows() const { return labels.size(); }
  std::size_t n_features() const { return columns.size(); }

  double value(std::size_t row, std::size_t col) const {
    return columns[col][row];
  }

  std::vector<double> row(std::size_t r) const {
    std::vector<double> out(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) out[c] = columns[c][r];
    return out;
  }

  void validate() const {
    if (columns.size() != meta.size())
      throw DataError("column count does not match metadata count");
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].size() != labels.size())
        throw DataError("column '" + meta[c].name + "' has " +
                        std::to_string(columns[c].size()) + " rows, labels have " +
                        std::to_string(labels.size()));
      for (double v : columns[c])
        if (!std::isfinite(v))
          throw DataError("non-finite value in column '" + meta[c].name + "'");
    }
    for (double y : labels)
      if (!std::isfinite(y)) throw DataError("non-finite label");
  }

  // Refresh per-column observed min/max from the stored values.
  void refresh_ranges() {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].empty()) continue;
      double lo = columns[c][0], hi = columns[c][0];
      for (double v : columns[c]) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      meta[c].min = lo;
      meta[c].max = hi;
    }
  }
};

inline const char* to_string(Task t) {
  return t == Task::kRegression ? "regression" : "classification";
}

inline const char* to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::kNumeric: return "numeric";
    case FeatureKind::kBinary: return "binary";
    default: return "ordinal";
  }
}

inline const char* to_string(Direction d) {
  return d == Direction::kIncreasing ? "increasing" : "decreasing";
}

}
