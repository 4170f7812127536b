#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/feature_net.hpp"
#include "mnam/types.hpp"

namespace mnam {

inline constexpr double kProbClamp = 1e-12;

// The additive model: g(E[y|x]) = intercept + sum_i f_i(x_i).
// Regression uses the identity link, classification the logit link
// (predictions pass through the logistic function).
struct NamModel {
  double intercept = 0.0;
  std::vector<FeatureNetParams> nets;
  ModelSpec spec;

  std::size_t feature_count() const { return nets.size(); }
  std::size_t parameter_count() const {
    return 1 + kFeatureNetParamCount * nets.size();
  }

  void validate() const {
    if (nets.size() != spec.features.size())
      throw SpecError("model has " + std::to_string(nets.size()) +
                      " nets for " + std::to_string(spec.features.size()) +
                      " features");
    spec.validate();
  }
};

inline NamModel init_nam(const ModelSpec& spec, SplitRng& rng) {
  NamModel m;
  m.spec = spec;
  m.nets.reserve(spec.features.size());
  for (std::size_t i = 0; i < spec.features.size(); ++i)
    m.nets.push_back(random_feature_net(rng));
  return m;
}

inline void check_dimension(const NamModel& m, std::span<const double> x) {
  if (x.size() != m.nets.size())
    throw SpecError("input has " + std::to_string(x.size()) +
                    " entries, model expects " + std::to_string(m.nets.size()));
}

// Linear predictor before the link. Summation order is fixed (intercept
// first, then features in index order) so results are reproducible bit for
// bit.
inline double predict_raw(const NamModel& m, std::span<const double> x) {
  check_dimension(m, x);
  double acc = m.intercept;
  for (std::size_t i = 0; i < m.nets.size(); ++i)
    acc += forward(m.nets[i], x[i]);
  return acc;
}

inline double predict(const NamModel& m, std::span<const double> x) {
  const double raw = predict_raw(m, x);
  return m.spec.task == Task::kClassification ? logistic(raw) : raw;
}

// Mean squared error for regression; mean negative log-likelihood for
// classification with probabilities clamped away from 0 and 1.
inline double loss(const NamModel& m, const Dataset& data) {
  const std::size_t n = data.n_rows();
  if (n == 0) throw DataError("loss over an empty dataset");
  if (data.n_features() != m.nets.size())
    throw SpecError("dataset has " + std::to_string(data.n_features()) +
                    " features, model expects " + std::to_string(m.nets.size()));
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double raw = m.intercept;
    for (std::size_t c = 0; c < data.n_features(); ++c)
      raw += forward(m.nets[c], data.columns[c][r]);
    const double y = data.labels[r];
    if (m.spec.task == Task::kRegression) {
      const double e = y - raw;
      acc += e * e;
    } else {
      if (y != 0.0 && y != 1.0)
        throw DataError("classification label " + std::to_string(y) +
                        " at row " + std::to_string(r) + " is not 0/1");
      double p = logistic(raw);
      p = std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
      acc += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
  }
  return acc / static_cast<double>(n);
}

struct ShapePoint {
  double x = 0.0;        // model-space input
  double value = 0.0;    // f_i(x) minus the grid mean
  bool extrapolated = false;
};

// Centered shape function on a caller-supplied grid. Centering removes the
// redundancy between each net's output bias and the global intercept.
// Points outside the feature's observed range are flagged, not rejected.
inline std::vector<ShapePoint> shape_function(const NamModel& m, int feature,
                                              std::span<const double> grid) {
  if (feature < 0 || feature >= static_cast<int>(m.nets.size()))
    throw SpecError("shape_function: feature index " + std::to_string(feature) +
                    " out of range");
  if (grid.empty()) throw SpecError("shape_function: empty grid");
  const FeatureMeta& meta = m.spec.features[feature];
  std::vector<ShapePoint> out(grid.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i].x = grid[i];
    out[i].value = forward(m.nets[feature], grid[i]);
    out[i].extrapolated = grid[i] < meta.min || grid[i] > meta.max;
    mean += out[i].value;
  }
  mean /= static_cast<double>(grid.size());
  for (auto& pt : out) pt.value -= mean;
  return out;
}

// ---------------------------------------------------------------------------
// Fully connected baseline: one hidden layer of width 2p with logistic
// activation, same link and loss semantics as the additive model. With 2p
// hidden units its parameter count (2p^2 + 4p + 1) is the dense counterpart
// of the additive model's 7p + 1; both counts are reported by the CLI.

struct FcnnModel {
  std::size_t input_dim = 0;
  std::vector<double> hidden_weights;  // row-major [hidden][input]
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  double output_bias = 0.0;
  Task task = Task::kRegression;

  std::size_t hidden_dim() const { return hidden_bias.size(); }
  std::size_t parameter_count() const {
    return hidden_weights.size() + hidden_bias.size() + output_weights.size() +
           1;
  }
};

inline FcnnModel init_fcnn(std::size_t input_dim, Task task, SplitRng& rng) {
  FcnnModel m;
  m.input_dim = input_dim;
  m.task = task;
  const std::size_t h = 2 * input_dim;
  m.hidden_weights.resize(h * input_dim);
  for (auto& w : m.hidden_weights) w = rng.uniform(-1.0, 1.0);
  m.hidden_bias.assign(h, 0.0);
  m.output_weights.resize(h);
  for (auto& w : m.output_weights) w = rng.uniform(-1.0, 1.0);
  return m;
}

inline double fcnn_raw(const FcnnModel& m, std::span<const double> x) {
  if (x.size() != m.input_dim)
    throw SpecError("input has " + std::to_string(x.size()) +
                    " entries, network expects " + std::to_string(m.input_dim));
  double out = m.output_bias;
  const std::size_t h = m.hidden_dim();
  for (std::size_t k = 0; k < h; ++k) {
    double z = m.hidden_bias[k];
    for (std::size_t i = 0; i < m.input_dim; ++i)
      z += m.hidden_weights[k * m.input_dim + i] * x[i];
    out += m.output_weights[k] * logistic(z);
  }
  return out;
}

inline double fcnn_forward(const FcnnModel& m, std::span<const double> x) {
  const double raw = fcnn_raw(m, x);
  return m.task == Task::kClassification ? logistic(raw) : raw;
}

inline double fcnn_loss(const FcnnModel& m, const Dataset& data) {
  const std::size_t n = data.n_rows();
  if (n == 0) throw DataError("loss over an empty dataset");
  double acc = 0.0;
  std::vector<double> x(data.n_features());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < data.n_features(); ++c)
      x[c] = data.columns[c][r];
    const double raw = fcnn_raw(m, x);
    const double y = data.labels[r];
    if (m.task == Task::kRegression) {
      const double e = y - raw;
      acc += e * e;
    } else {
      if (y != 0.0 && y != 1.0)
        throw DataError("classification label " + std::to_string(y) +
                        " at row " + std::to_string(r) + " is not 0/1");
      double p = logistic(raw);
      p = std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
      acc += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
  }
  return acc / static_cast<double>(n);
}

}
