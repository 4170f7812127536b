#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/model.hpp"
#include "mnam/monotonicity.hpp"
#include "mnam/rng.hpp"

namespace mnam {

enum class OptimizerKind { kGradientDescent, kAdam };

struct TrainConfig {
  std::uint64_t seed = 1;
  int epochs = 2000;           // per stage
  int batch_size = 0;          // 0 = full batch
  double step_size = 1e-2;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double lambda_init = 0.1;
  double eta_init = 0.1;
  double escalation_factor = 10.0;
  int max_escalations = 12;
  double margin = 1e-3;        // strictness epsilon for the hinge penalties
  // The escalation loop trains against margin + margin_headroom and tests
  // h1/h2 at margin, so the optimizer parks slopes safely above the line it
  // must clear; each round also shrinks the step size by stage_step_decay
  // (floored at 1% of step_size) to kill boundary oscillation at high
  // penalty weights.
  double margin_headroom = 1e-3;
  double stage_step_decay = 0.7;
  double tolerance = 0.0;      // stop a stage early when the objective moves
                               // less than this between epochs; 0 disables
  bool warm_start = true;      // reuse the previous stage's parameters
  int certify_resolution = 1000;

  void validate() const {
    if (step_size <= 0.0) throw SpecError("step size must be positive");
    if (escalation_factor <= 1.0)
      throw SpecError("escalation factor must exceed 1");
    if (max_escalations < 1) throw SpecError("max_escalations must be >= 1");
    if (epochs < 1) throw SpecError("epochs must be >= 1");
  }
};

struct EscalationRound {
  int round = 0;
  double lambda = 0.0;
  double eta = 0.0;
  double loss = 0.0;  // unpenalized data loss after the round's training
  double h1 = 0.0;
  double h2 = 0.0;
};

struct EscalationLog {
  std::vector<EscalationRound> rounds;
};

// Thrown when the escalation budget runs out with constraints still
// violated; carries the full log for post-mortems.
struct EscalationExhausted : TrainingError {
  EscalationLog log;
  EscalationExhausted(const std::string& what, EscalationLog l)
      : TrainingError(what), log(std::move(l)) {}
};

struct MnamResult {
  NamModel model;
  EscalationLog log;
  PenaltyConfig penalty;  // evaluation points actually enforced
  CertificationReport certification;
};

// ---------------------------------------------------------------------------
// Flat parameter views. Order: intercept, then each net's seven parameters.

inline std::vector<double> pack(const NamModel& m) {
  std::vector<double> v;
  v.reserve(m.parameter_count());
  v.push_back(m.intercept);
  for (const auto& net : m.nets)
    for (std::size_t i = 0; i < kFeatureNetParamCount; ++i)
      v.push_back(get_param(net, i));
  return v;
}

inline void unpack(NamModel& m, const std::vector<double>& v) {
  m.intercept = v[0];
  std::size_t at = 1;
  for (auto& net : m.nets)
    for (std::size_t i = 0; i < kFeatureNetParamCount; ++i)
      set_param(net, i, v[at++]);
}

// FCNN order: hidden weights row-major, hidden biases, output weights,
// output bias.
inline std::vector<double> pack(const FcnnModel& m) {
  std::vector<double> v;
  v.reserve(m.parameter_count());
  v.insert(v.end(), m.hidden_weights.begin(), m.hidden_weights.end());
  v.insert(v.end(), m.hidden_bias.begin(), m.hidden_bias.end());
  v.insert(v.end(), m.output_weights.begin(), m.output_weights.end());
  v.push_back(m.output_bias);
  return v;
}

inline void unpack(FcnnModel& m, const std::vector<double>& v) {
  std::size_t at = 0;
  for (auto& w : m.hidden_weights) w = v[at++];
  for (auto& b : m.hidden_bias) b = v[at++];
  for (auto& w : m.output_weights) w = v[at++];
  m.output_bias = v[at];
}

namespace detail {

struct Objective {
  double penalized = 0.0;
  double loss = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

// Data loss + its gradient over the given rows, accumulated into grad
// (which must be zeroed by the caller). Returns the mean loss over the rows.
inline double nam_loss_gradient(const NamModel& m, const Dataset& data,
                                const std::vector<std::size_t>& rows,
                                std::vector<double>& grad) {
  const std::size_t p = m.nets.size();
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double total = 0.0;
  std::vector<double> sig(2 * p);
  for (std::size_t r : rows) {
    double raw = m.intercept;
    for (std::size_t c = 0; c < p; ++c) {
      const auto& net = m.nets[c];
      const double x = data.columns[c][r];
      const double s0 = logistic(net.w1[0] * x + net.b1[0]);
      const double s1 = logistic(net.w1[1] * x + net.b1[1]);
      sig[2 * c] = s0;
      sig[2 * c + 1] = s1;
      raw += net.w2[0] * s0 + net.w2[1] * s1 + net.b2;
    }
    const double y = data.labels[r];
    double rf;  // d(mean loss)/d(raw) for this row
    if (m.spec.task == Task::kRegression) {
      const double e = raw - y;
      total += e * e;
      rf = 2.0 * e * inv_n;
    } else {
      if (y != 0.0 && y != 1.0)
        throw DataError("classification label " + std::to_string(y) +
                        " at row " + std::to_string(r) + " is not 0/1");
      const double prob = logistic(raw);
      const double pc = std::min(1.0 - kProbClamp, std::max(kProbClamp, prob));
      total += -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
      rf = (prob - y) * inv_n;
    }
    grad[0] += rf;
    for (std::size_t c = 0; c < p; ++c) {
      const auto& net = m.nets[c];
      const double x = data.columns[c][r];
      double* g = grad.data() + 1 + c * kFeatureNetParamCount;
      for (int k = 0; k < 2; ++k) {
        const double s = sig[2 * c + k];
        const double sp = s * (1.0 - s);
        g[0 + k] += rf * net.w2[k] * sp * x;  // w1_k
        g[2 + k] += rf * net.w2[k] * sp;      // b1_k
        g[4 + k] += rf * s;                   // w2_k
      }
      g[6] += rf;  // b2
    }
  }
  return total * inv_n;
}

inline void add_penalty_gradient(const NamModel& m, const PenaltyConfig& pen,
                                 std::vector<double>& grad) {
  if (pen.lambda <= 0.0 && pen.eta <= 0.0) return;
  const ModelGradient pg = penalty_gradient(m, pen);
  for (std::size_t c = 0; c < m.nets.size(); ++c) {
    double* g = grad.data() + 1 + c * kFeatureNetParamCount;
    for (std::size_t i = 0; i < kFeatureNetParamCount; ++i)
      g[i] += pg.nets[c][i];
  }
}

inline Objective nam_objective(const NamModel& m, const Dataset& data,
                               const PenaltyConfig& pen) {
  Objective obj;
  obj.loss = loss(m, data);
  obj.h1 = penalty_individual(m, pen);
  obj.h2 = penalty_pairwise(m, pen);
  obj.penalized = obj.loss + pen.lambda * obj.h1 + pen.eta * obj.h2;
  return obj;
}

struct OptimizerState {
  std::vector<double> m1, m2;
  long step = 0;

  explicit OptimizerState(std::size_t n) : m1(n, 0.0), m2(n, 0.0) {}
};

inline void apply_update(const TrainConfig& cfg, OptimizerState& st,
                         std::vector<double>& params,
                         const std::vector<double>& grad) {
  if (cfg.optimizer == OptimizerKind::kGradientDescent) {
    for (std::size_t i = 0; i < params.size(); ++i)
      params[i] -= cfg.step_size * grad[i];
    return;
  }
  ++st.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    st.m1[i] = cfg.beta1 * st.m1[i] + (1.0 - cfg.beta1) * grad[i];
    st.m2[i] = cfg.beta2 * st.m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    params[i] -=
        cfg.step_size * (st.m1[i] / bc1) / (std::sqrt(st.m2[i] / bc2) + cfg.adam_epsilon);
  }
}

inline void check_finite(double objective, int epoch) {
  if (!std::isfinite(objective))
    throw TrainingError(
        "objective became non-finite at epoch " + std::to_string(epoch) +
        "; the step size is likely too large for this problem");
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace detail

// One optimization stage of the penalized objective, mutating the model in
// place. Deterministic given the stage RNG (used only for mini-batch
// shuffling). Returns the final objective breakdown.
inline detail::Objective train_nam_stage(NamModel& model, const Dataset& data,
                                         const TrainConfig& cfg,
                                         const PenaltyConfig& pen,
                                         SplitRng rng) {
  cfg.validate();
  data.validate();
  if (data.n_rows() == 0) throw DataError("cannot train on an empty dataset");
  std::vector<double> params = pack(model);
  detail::OptimizerState st(params.size());
  std::vector<double> grad(params.size());
  const std::size_t n = data.n_rows();
  const bool full_batch =
      cfg.batch_size <= 0 || static_cast<std::size_t>(cfg.batch_size) >= n;
  std::vector<std::size_t> order = detail::all_rows(n);
  double prev = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double epoch_obj;
    if (full_batch) {
      std::fill(grad.begin(), grad.end(), 0.0);
      const double l = detail::nam_loss_gradient(model, data, order, grad);
      const double h1 = penalty_individual(model, pen);
      const double h2 = penalty_pairwise(model, pen);
      detail::add_penalty_gradient(model, pen, grad);
      epoch_obj = l + pen.lambda * h1 + pen.eta * h2;
      detail::check_finite(epoch_obj, epoch);
      detail::apply_update(cfg, st, params, grad);
      unpack(model, params);
    } else {
      // seeded shuffle, then batches in order; the penalty terms ride along
      // with every batch
      for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
      double loss_sum = 0.0;
      std::vector<std::size_t> batch;
      for (std::size_t at = 0; at < n; at += cfg.batch_size) {
        batch.assign(order.begin() + at,
                     order.begin() + std::min(n, at + cfg.batch_size));
        std::fill(grad.begin(), grad.end(), 0.0);
        loss_sum += detail::nam_loss_gradient(model, data, batch, grad) *
                    static_cast<double>(batch.size());
        detail::add_penalty_gradient(model, pen, grad);
        detail::apply_update(cfg, st, params, grad);
        unpack(model, params);
      }
      epoch_obj = loss_sum / static_cast<double>(n) +
                  pen.lambda * penalty_individual(model, pen) +
                  pen.eta * penalty_pairwise(model, pen);
      detail::check_finite(epoch_obj, epoch);
    }
    if (cfg.tolerance > 0.0 && std::abs(epoch_obj - prev) < cfg.tolerance)
      break;
    prev = epoch_obj;
  }
  return detail::nam_objective(model, data, pen);
}

// Fresh-start training of the additive model at fixed penalty weights.
inline NamModel train_nam(const Dataset& data, const ModelSpec& spec,
                          const TrainConfig& cfg, double lambda, double eta) {
  spec.validate();
  SplitRng root(cfg.seed);
  auto init_rng = root.split(0);
  NamModel model = init_nam(spec, init_rng);
  PenaltyConfig pen = build_penalty_config(data, spec, lambda, eta, cfg.margin);
  train_nam_stage(model, data, cfg, pen, root.split(1));
  return model;
}

// Two-step escalation: train unpenalized, then raise lambda (while h1 > 0)
// and eta (while h2 > 0) geometrically, retraining each round, until both
// penalties vanish at the margin and grid certification passes. Retraining
// warm-starts from the previous round by default.
//
// If certification finds a negative slope between evaluation points while
// the penalties read zero, the violating grid points are appended to the
// evaluation sets so the next round's penalty sees them; escalation then
// proceeds as usual.
inline MnamResult train_mnam(const Dataset& data, const ModelSpec& spec,
                             const TrainConfig& cfg) {
  spec.validate();
  cfg.validate();
  MnamResult result;
  if (!spec.has_constraints()) {
    result.model = train_nam(data, spec, cfg, 0.0, 0.0);
    result.penalty = build_penalty_config(data, spec, 0.0, 0.0, cfg.margin);
    result.log.rounds.push_back(
        {0, 0.0, 0.0, loss(result.model, data), 0.0, 0.0});
    return result;
  }

  SplitRng root(cfg.seed);
  auto init_rng = root.split(0);
  NamModel model = init_nam(spec, init_rng);
  // train against a raised hinge, test against the contractual margin
  PenaltyConfig pen_train =
      build_penalty_config(data, spec, 0.0, 0.0, cfg.margin + cfg.margin_headroom);
  PenaltyConfig pen = pen_train;
  pen.margin = cfg.margin;
  double lambda = 0.0, eta = 0.0;

  for (int round = 0; round <= cfg.max_escalations; ++round) {
    if (!cfg.warm_start && round > 0) {
      auto fresh = root.split(0);
      model = init_nam(spec, fresh);
    }
    pen_train.lambda = pen.lambda = lambda;
    pen_train.eta = pen.eta = eta;
    TrainConfig stage_cfg = cfg;
    stage_cfg.step_size = std::max(
        cfg.step_size * std::pow(cfg.stage_step_decay, round),
        cfg.step_size * 0.01);
    const auto stats =
        train_nam_stage(model, data, stage_cfg, pen_train, root.split(1 + round));
    double h1 = penalty_individual(model, pen);
    double h2 = penalty_pairwise(model, pen);
    result.log.rounds.push_back({round, lambda, eta, stats.loss, h1, h2});

    CertificationReport cert = certify(model, cfg.certify_resolution, pen);
    if (h1 == 0.0 && h2 == 0.0 && cert.all_pass()) {
      result.model = std::move(model);
      result.penalty = pen;
      result.certification = std::move(cert);
      return result;
    }

    // Feed certification misses back into the evaluation sets.
    bool augmented = false;
    for (const auto& c : cert.individual) {
      if (c.pass || c.violations.empty()) continue;
      auto& pts = pen.feature_points[c.feature];
      pts.insert(pts.end(), c.violations.begin(), c.violations.end());
      pts = sorted_unique(std::move(pts));
      pen_train.feature_points[c.feature] = pts;
      augmented = true;
    }
    for (std::size_t j = 0; j < cert.pairwise.size(); ++j) {
      const auto& c = cert.pairwise[j];
      if (c.pass || c.violations.empty()) continue;
      auto& pts = pen.pair_points[j];
      pts.insert(pts.end(), c.violations.begin(), c.violations.end());
      pts = sorted_unique(std::move(pts));
      pen_train.pair_points[j] = pts;
      augmented = true;
    }
    if (augmented) {
      h1 = penalty_individual(model, pen);
      h2 = penalty_pairwise(model, pen);
    }
    if (h1 > 0.0) lambda = lambda == 0.0 ? cfg.lambda_init : lambda * cfg.escalation_factor;
    if (h2 > 0.0) eta = eta == 0.0 ? cfg.eta_init : eta * cfg.escalation_factor;
  }
  throw EscalationExhausted(
      "constraints still violated after " + std::to_string(cfg.max_escalations) +
      " escalations (lambda=" + std::to_string(lambda) +
      ", eta=" + std::to_string(eta) + ")",
      result.log);
}

// ---------------------------------------------------------------------------
// FCNN baseline training (no penalties).

namespace detail {

inline double fcnn_loss_gradient(const FcnnModel& m, const Dataset& data,
                                 const std::vector<std::size_t>& rows,
                                 std::vector<double>& grad) {
  const std::size_t p = m.input_dim;
  const std::size_t h = m.hidden_dim();
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double total = 0.0;
  std::vector<double> x(p), act(h);
  double* ghw = grad.data();
  double* ghb = grad.data() + h * p;
  double* gow = grad.data() + h * p + h;
  double* gob = grad.data() + h * p + 2 * h;
  for (std::size_t r : rows) {
    for (std::size_t c = 0; c < p; ++c) x[c] = data.columns[c][r];
    double raw = m.output_bias;
    for (std::size_t k = 0; k < h; ++k) {
      double z = m.hidden_bias[k];
      for (std::size_t i = 0; i < p; ++i) z += m.hidden_weights[k * p + i] * x[i];
      act[k] = logistic(z);
      raw += m.output_weights[k] * act[k];
    }
    const double y = data.labels[r];
    double rf;
    if (m.task == Task::kRegression) {
      const double e = raw - y;
      total += e * e;
      rf = 2.0 * e * inv_n;
    } else {
      if (y != 0.0 && y != 1.0)
        throw DataError("classification label " + std::to_string(y) +
                        " at row " + std::to_string(r) + " is not 0/1");
      const double prob = logistic(raw);
      const double pc = std::min(1.0 - kProbClamp, std::max(kProbClamp, prob));
      total += -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
      rf = (prob - y) * inv_n;
    }
    *gob += rf;
    for (std::size_t k = 0; k < h; ++k) {
      gow[k] += rf * act[k];
      const double dz = rf * m.output_weights[k] * act[k] * (1.0 - act[k]);
      ghb[k] += dz;
      for (std::size_t i = 0; i < p; ++i) ghw[k * p + i] += dz * x[i];
    }
  }
  return total * inv_n;
}

}  // namespace detail

inline FcnnModel train_fcnn(const Dataset& data, Task task,
                            const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.n_rows() == 0) throw DataError("cannot train on an empty dataset");
  SplitRng root(cfg.seed);
  auto init_rng = root.split(0);
  FcnnModel model = init_fcnn(data.n_features(), task, init_rng);
  auto rng = root.split(1);

  std::vector<double> params = pack(model);
  detail::OptimizerState st(params.size());
  std::vector<double> grad(params.size());
  const std::size_t n = data.n_rows();
  const bool full_batch =
      cfg.batch_size <= 0 || static_cast<std::size_t>(cfg.batch_size) >= n;
  std::vector<std::size_t> order = detail::all_rows(n);
  double prev = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double epoch_loss;
    if (full_batch) {
      std::fill(grad.begin(), grad.end(), 0.0);
      epoch_loss = detail::fcnn_loss_gradient(model, data, order, grad);
      detail::check_finite(epoch_loss, epoch);
      detail::apply_update(cfg, st, params, grad);
      unpack(model, params);
    } else {
      for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
      double loss_sum = 0.0;
      std::vector<std::size_t> batch;
      for (std::size_t at = 0; at < n; at += cfg.batch_size) {
        batch.assign(order.begin() + at,
                     order.begin() + std::min(n, at + cfg.batch_size));
        std::fill(grad.begin(), grad.end(), 0.0);
        loss_sum += detail::fcnn_loss_gradient(model, data, batch, grad) *
                    static_cast<double>(batch.size());
        detail::apply_update(cfg, st, params, grad);
        unpack(model, params);
      }
      epoch_loss = loss_sum / static_cast<double>(n);
      detail::check_finite(epoch_loss, epoch);
    }
    if (cfg.tolerance > 0.0 && std::abs(epoch_loss - prev) < cfg.tolerance)
      break;
    prev = epoch_loss;
  }
  return model;
}

}
