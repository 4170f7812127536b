#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mnam/errors.hpp"
#include "mnam/eval.hpp"
#include "mnam/model.hpp"
#include "mnam/monotonicity.hpp"
#include "mnam/simulation.hpp"
#include "mnam/trainer.hpp"
#include "mnam/version.hpp"

namespace mnam {

using json = nlohmann::ordered_json;

// Shortest representation that parses back to the same double. All text
// artifacts (CSV, SVG, tables) go through this, so identical runs produce
// identical bytes.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Model serialization. One JSON document per model; doubles round-trip
// exactly, so save -> load is value-identical.

namespace detail {

inline json transforms_to_json(const ColumnTransforms& t) {
  json j;
  j["negated"] = t.negated;
  j["cap"] = t.cap ? json(*t.cap) : json(nullptr);
  j["wants_standardize"] = t.wants_standardize;
  j["standardize_mean"] =
      t.standardize_mean ? json(*t.standardize_mean) : json(nullptr);
  j["standardize_sd"] = t.standardize_sd ? json(*t.standardize_sd) : json(nullptr);
  j["imputed_count"] = t.imputed_count;
  return j;
}

inline ColumnTransforms transforms_from_json(const json& j) {
  ColumnTransforms t;
  t.negated = j.at("negated").get<bool>();
  if (!j.at("cap").is_null()) t.cap = j.at("cap").get<double>();
  t.wants_standardize = j.at("wants_standardize").get<bool>();
  if (!j.at("standardize_mean").is_null())
    t.standardize_mean = j.at("standardize_mean").get<double>();
  if (!j.at("standardize_sd").is_null())
    t.standardize_sd = j.at("standardize_sd").get<double>();
  t.imputed_count = j.at("imputed_count").get<std::size_t>();
  return t;
}

inline FeatureKind kind_from_string(const std::string& s) {
  if (s == "numeric") return FeatureKind::kNumeric;
  if (s == "binary") return FeatureKind::kBinary;
  if (s == "ordinal") return FeatureKind::kOrdinal;
  throw DataError("unknown feature kind '" + s + "'");
}

inline Task task_from_string(const std::string& s) {
  if (s == "regression") return Task::kRegression;
  if (s == "classification") return Task::kClassification;
  throw DataError("unknown task '" + s + "'");
}

}  // namespace detail

inline json spec_to_json(const ModelSpec& spec) {
  json j;
  j["task"] = to_string(spec.task);
  j["features"] = json::array();
  for (const auto& f : spec.features) {
    json jf;
    jf["name"] = f.name;
    jf["kind"] = to_string(f.kind);
    jf["min"] = f.min;
    jf["max"] = f.max;
    jf["transforms"] = detail::transforms_to_json(f.transforms);
    j["features"].push_back(jf);
  }
  j["monotone_features"] = json::array();
  for (const auto& c : spec.monotone_features)
    j["monotone_features"].push_back(
        {{"feature", c.feature}, {"direction", to_string(c.direction)}});
  j["pairwise_constraints"] = json::array();
  for (const auto& c : spec.pairwise_constraints)
    j["pairwise_constraints"].push_back(
        {{"dominant", c.dominant}, {"dominated", c.dominated}});
  return j;
}

inline ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.task = detail::task_from_string(j.at("task").get<std::string>());
  for (const auto& jf : j.at("features")) {
    FeatureMeta f;
    f.name = jf.at("name").get<std::string>();
    f.kind = detail::kind_from_string(jf.at("kind").get<std::string>());
    f.min = jf.at("min").get<double>();
    f.max = jf.at("max").get<double>();
    f.transforms = detail::transforms_from_json(jf.at("transforms"));
    spec.features.push_back(std::move(f));
  }
  for (const auto& jc : j.at("monotone_features")) {
    MonotoneConstraint c;
    c.feature = jc.at("feature").get<int>();
    c.direction = jc.at("direction").get<std::string>() == "decreasing"
                      ? Direction::kDecreasing
                      : Direction::kIncreasing;
    spec.monotone_features.push_back(c);
  }
  for (const auto& jc : j.at("pairwise_constraints"))
    spec.pairwise_constraints.push_back(
        {jc.at("dominant").get<int>(), jc.at("dominated").get<int>()});
  spec.validate();
  return spec;
}

// kind is "nam", "mnam", or "fcnn"; pen (optional) persists the enforced
// margin and evaluation points so a saved model can be re-certified
// faithfully.
inline json model_to_json(const NamModel& m, const std::string& kind,
                          const PenaltyConfig* pen = nullptr) {
  m.validate();
  json j;
  j["format"] = "mnam-model";
  j["version"] = kVersion;
  j["kind"] = kind;
  j["spec"] = spec_to_json(m.spec);
  j["intercept"] = m.intercept;
  j["nets"] = json::array();
  for (const auto& net : m.nets) {
    json jn;
    jn["w1"] = net.w1;
    jn["b1"] = net.b1;
    jn["w2"] = net.w2;
    jn["b2"] = net.b2;
    j["nets"].push_back(jn);
  }
  if (pen) {
    json jp;
    jp["margin"] = pen->margin;
    jp["lambda"] = pen->lambda;
    jp["eta"] = pen->eta;
    jp["feature_points"] = pen->feature_points;
    jp["pair_points"] = pen->pair_points;
    j["penalty"] = jp;
  }
  return j;
}

inline json model_to_json(const FcnnModel& m) {
  json j;
  j["format"] = "mnam-model";
  j["version"] = kVersion;
  j["kind"] = "fcnn";
  j["task"] = to_string(m.task);
  j["input_dim"] = m.input_dim;
  j["hidden_weights"] = m.hidden_weights;
  j["hidden_bias"] = m.hidden_bias;
  j["output_weights"] = m.output_weights;
  j["output_bias"] = m.output_bias;
  return j;
}

struct SavedModel {
  std::string kind;
  std::optional<NamModel> nam;
  std::optional<FcnnModel> fcnn;
  std::optional<PenaltyConfig> penalty;
};

inline SavedModel model_from_json(const json& j) {
  if (j.value("format", "") != "mnam-model")
    throw DataError("not a model document (missing format tag)");
  SavedModel out;
  out.kind = j.at("kind").get<std::string>();
  if (out.kind == "fcnn") {
    FcnnModel m;
    m.task = detail::task_from_string(j.at("task").get<std::string>());
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.hidden_weights = j.at("hidden_weights").get<std::vector<double>>();
    m.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
    m.output_weights = j.at("output_weights").get<std::vector<double>>();
    m.output_bias = j.at("output_bias").get<double>();
    out.fcnn = std::move(m);
    return out;
  }
  NamModel m;
  m.spec = spec_from_json(j.at("spec"));
  m.intercept = j.at("intercept").get<double>();
  for (const auto& jn : j.at("nets")) {
    FeatureNetParams net;
    net.w1 = jn.at("w1").get<std::array<double, 2>>();
    net.b1 = jn.at("b1").get<std::array<double, 2>>();
    net.w2 = jn.at("w2").get<std::array<double, 2>>();
    net.b2 = jn.at("b2").get<double>();
    m.nets.push_back(net);
  }
  m.validate();
  if (j.contains("penalty")) {
    PenaltyConfig pen;
    const auto& jp = j.at("penalty");
    pen.margin = jp.at("margin").get<double>();
    pen.lambda = jp.at("lambda").get<double>();
    pen.eta = jp.at("eta").get<double>();
    pen.feature_points =
        jp.at("feature_points").get<std::vector<std::vector<double>>>();
    pen.pair_points = jp.at("pair_points").get<std::vector<std::vector<double>>>();
    out.penalty = std::move(pen);
  }
  out.nam = std::move(m);
  return out;
}

inline void save_model_file(const std::string& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

inline SavedModel load_model_file(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  }
  return model_from_json(doc);
}

// ---------------------------------------------------------------------------
// Reports

inline json certification_to_json(const CertificationReport& rep) {
  json j;
  j["resolution"] = rep.resolution;
  j["pass"] = rep.all_pass();
  j["individual"] = json::array();
  for (const auto& c : rep.individual) {
    json jc;
    jc["feature"] = c.feature;
    jc["name"] = c.name;
    jc["min_derivative"] = c.min_derivative;
    jc["argmin"] = c.argmin;
    jc["grid"] = {{"lo", c.grid_lo}, {"hi", c.grid_hi}};
    jc["pass"] = c.pass;
    jc["degenerate_range"] = c.degenerate_range;
    jc["violation_count"] = c.violations.size();
    j["individual"].push_back(jc);
  }
  j["pairwise"] = json::array();
  for (const auto& c : rep.pairwise) {
    json jc;
    jc["dominant"] = c.dominant;
    jc["dominated"] = c.dominated;
    jc["dominant_name"] = c.dominant_name;
    jc["dominated_name"] = c.dominated_name;
    jc["min_gap"] = c.min_gap;
    jc["argmin"] = c.argmin;
    jc["grid"] = {{"lo", c.grid_lo}, {"hi", c.grid_hi}};
    jc["pass"] = c.pass;
    jc["violation_count"] = c.violations.size();
    j["pairwise"].push_back(jc);
  }
  return j;
}

inline std::string certification_to_table(const CertificationReport& rep) {
  std::ostringstream out;
  out << "certification (grid resolution " << rep.resolution << ")\n";
  for (const auto& c : rep.individual) {
    out << "  individual  " << c.name << "  min f' = "
        << format_double(c.min_derivative) << " at "
        << format_double(c.argmin) << "  [" << (c.pass ? "pass" : "FAIL")
        << "]";
    if (c.degenerate_range) out << "  (degenerate range: single-point check)";
    out << "\n";
  }
  for (const auto& c : rep.pairwise) {
    out << "  pairwise    " << c.dominant_name << " over " << c.dominated_name
        << "  min gap = " << format_double(c.min_gap) << " at "
        << format_double(c.argmin) << "  [" << (c.pass ? "pass" : "FAIL")
        << "]\n";
  }
  out << "  overall: " << (rep.all_pass() ? "pass" : "FAIL") << "\n";
  return out.str();
}

inline json metrics_to_json(const MetricsReport& rep) {
  json j;
  j["n"] = rep.n;
  j["threshold"] = rep.threshold;
  j["classification_error"] = rep.error;
  j["auc"] = rep.auc ? json(*rep.auc) : json(nullptr);
  j["confusion"] = {{"tp", rep.tp}, {"fn", rep.fn}, {"fp", rep.fp}, {"tn", rep.tn}};
  return j;
}

inline std::string metrics_to_table(const MetricsReport& rep) {
  std::ostringstream out;
  out << "classification error: " << format_double(rep.error * 100.0) << "%\n";
  out << "AUC: " << (rep.auc ? format_double(*rep.auc * 100.0) + "%" : "undefined (one class)")
      << "\n";
  out << "               Predicted: Yes  Predicted: No\n";
  out << "  Actual: Yes  " << rep.tp << "  " << rep.fn << "\n";
  out << "  Actual: No   " << rep.fp << "  " << rep.tn << "\n";
  return out.str();
}

inline std::string escalation_to_csv(const EscalationLog& log) {
  std::string csv = "round,lambda,eta,loss,h1,h2\n";
  for (const auto& r : log.rounds) {
    csv += std::to_string(r.round) + "," + format_double(r.lambda) + "," +
           format_double(r.eta) + "," + format_double(r.loss) + "," +
           format_double(r.h1) + "," + format_double(r.h2) + "\n";
  }
  return csv;
}

inline std::string sweep_to_csv(const std::vector<SweepCell>& cells,
                                const std::vector<SimResultIndividual>& results) {
  std::string csv =
      "group,alpha,c,poisson_rate,sigma,n_samples,n_reps,seed,ratio,std_error\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cfg = cells[i].config;
    const auto& est = results[i].violation;
    csv += cells[i].group + "," + format_double(cfg.alpha) + "," +
           format_double(cfg.c) + "," + format_double(cfg.poisson_rate) + "," +
           format_double(cfg.sigma) + "," + std::to_string(cfg.n_samples) + "," +
           std::to_string(cfg.n_reps) + "," + std::to_string(cfg.seed) + "," +
           format_double(est.ratio) + "," + format_double(est.std_error) + "\n";
  }
  return csv;
}

inline std::string pairwise_result_to_csv(const SimResultPairwise& r) {
  std::string csv =
      "quantity,ratio,std_error,n_reps\n"
      "individual_x1," +
      format_double(r.individual_x1.ratio) + "," +
      format_double(r.individual_x1.std_error) + "," + std::to_string(r.n_reps) +
      "\nindividual_x2," + format_double(r.individual_x2.ratio) + "," +
      format_double(r.individual_x2.std_error) + "," + std::to_string(r.n_reps) +
      "\npairwise," + format_double(r.pairwise.ratio) + "," +
      format_double(r.pairwise.std_error) + "," + std::to_string(r.n_reps) + "\n";
  return csv;
}

inline std::string audit_curves_to_csv(const AuditReport& rep) {
  std::string csv = "feature,x,mean_y,count\n";
  for (const auto& f : rep.features) {
    for (const auto& cell : f.curve) {
      csv += f.name + "," + std::to_string(cell.x) + ",";
      csv += cell.present() ? format_double(cell.mean) : std::string("");
      csv += "," + std::to_string(cell.count) + "\n";
    }
  }
  return csv;
}

inline std::string audit_histogram_to_csv(const AuditReport& rep) {
  std::string csv = "feature,x,count\n";
  for (const auto& f : rep.features)
    for (const auto& cell : f.curve)
      csv += f.name + "," + std::to_string(cell.x) + "," +
             std::to_string(cell.count) + "\n";
  return csv;
}

inline json audit_to_json(const AuditReport& rep) {
  json j;
  j["features"] = json::array();
  for (const auto& f : rep.features) {
    json jf;
    jf["feature"] = f.feature;
    jf["name"] = f.name;
    jf["violated"] = f.violated;
    jf["vacuous"] = f.vacuous;
    jf["steps"] = json::array();
    for (const auto& s : f.steps)
      jf["steps"].push_back({{"from", s.from},
                             {"to", s.to},
                             {"delta", s.delta},
                             {"decreasing", s.decreasing}});
    j["features"].push_back(jf);
  }
  j["pairs"] = json::array();
  for (const auto& p : rep.pairs) {
    json jp;
    jp["dominant"] = p.dominant;
    jp["dominated"] = p.dominated;
    jp["dominant_name"] = p.dominant_name;
    jp["dominated_name"] = p.dominated_name;
    jp["violated"] = p.violated;
    jp["increments"] = json::array();
    for (const auto& inc : p.increments)
      jp["increments"].push_back({{"from", inc.from},
                                  {"to", inc.to},
                                  {"increment_dominant", inc.increment_dominant},
                                  {"increment_dominated", inc.increment_dominated},
                                  {"violated", inc.violated}});
    j["pairs"].push_back(jp);
  }
  return j;
}

inline std::string shape_to_csv(const std::vector<ShapePoint>& shape,
                                const ColumnTransforms& transforms) {
  std::string csv = "x_raw,x_model,f_centered,extrapolated\n";
  for (const auto& pt : shape) {
    csv += format_double(transforms.to_raw_space(pt.x)) + "," +
           format_double(pt.x) + "," + format_double(pt.value) + "," +
           (pt.extrapolated ? "1" : "0") + "\n";
  }
  return csv;
}

}
