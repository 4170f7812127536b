// Batch entry point: training, certification, Monte Carlo studies, data
// audits, and shape export, driven by a JSON config with reproducible
// seeds. Every run writes a manifest (config echo, seed, tool version,
// input checksums) sufficient to reproduce its outputs byte for byte.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 training or certification failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mnam/cache.hpp"
#include "mnam/data.hpp"
#include "mnam/eval.hpp"
#include "mnam/io.hpp"
#include "mnam/manifest.hpp"
#include "mnam/model.hpp"
#include "mnam/monotonicity.hpp"
#include "mnam/simulation.hpp"
#include "mnam/svg.hpp"
#include "mnam/synthetic.hpp"
#include "mnam/trainer.hpp"
#include "mnam/version.hpp"

namespace {

namespace fs = std::filesystem;
using mnam::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;  // fixed default, never wall clock
  bool quiet = false;
  unsigned threads = 1;
  json config = json::object();

  bool seed_overridden = false;
  bool out_overridden = false;
};

void load_config(GlobalOptions& g) {
  if (!g.config_path.empty()) {
    g.config = json::parse(mnam::read_text_file(g.config_path));
    if (!g.config.is_object())
      throw mnam::SpecError("config root must be a JSON object");
  }
  // flags override top-level config scalars; config overrides defaults
  if (!g.seed_overridden && g.config.contains("seed"))
    g.seed = g.config["seed"].get<std::uint64_t>();
  if (!g.out_overridden && g.config.contains("out_dir"))
    g.out_dir = g.config["out_dir"].get<std::string>();
  if (g.config.contains("quiet") && !g.quiet)
    g.quiet = g.config["quiet"].get<bool>();
  if (g.config.contains("threads"))
    g.threads = g.config["threads"].get<unsigned>();
}

json section(const GlobalOptions& g, const std::string& name) {
  if (g.config.contains(name)) {
    if (!g.config.at(name).is_object())
      throw mnam::SpecError("config section '" + name + "' must be an object");
    return g.config.at(name);
  }
  return json::object();
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

void emit(const GlobalOptions& g, const std::string& text) {
  if (!g.quiet) std::cout << text;
}

fs::path ensure_out_dir(const GlobalOptions& g) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const GlobalOptions& g, const fs::path& dir,
                    const std::string& command, const json& effective,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json cfg;
  cfg["command"] = command;
  cfg["parameters"] = effective;
  auto manifest = mnam::make_manifest(cfg, g.seed, inputs, outputs);
  mnam::write_text_file((dir / "manifest.json").string(),
                        manifest.dump(2) + "\n");
}

mnam::TrainConfig train_config_from(const json& s, std::uint64_t seed) {
  mnam::TrainConfig cfg;
  cfg.seed = seed;
  cfg.epochs = get_or(s, "epochs", cfg.epochs);
  cfg.batch_size = get_or(s, "batch_size", cfg.batch_size);
  cfg.step_size = get_or(s, "step_size", cfg.step_size);
  const std::string opt = get_or<std::string>(s, "optimizer", "adam");
  if (opt == "adam")
    cfg.optimizer = mnam::OptimizerKind::kAdam;
  else if (opt == "gd" || opt == "gradient_descent")
    cfg.optimizer = mnam::OptimizerKind::kGradientDescent;
  else
    throw mnam::SpecError("unknown optimizer '" + opt + "'");
  cfg.beta1 = get_or(s, "beta1", cfg.beta1);
  cfg.beta2 = get_or(s, "beta2", cfg.beta2);
  cfg.adam_epsilon = get_or(s, "adam_epsilon", cfg.adam_epsilon);
  cfg.lambda_init = get_or(s, "lambda_init", cfg.lambda_init);
  cfg.eta_init = get_or(s, "eta_init", cfg.eta_init);
  cfg.escalation_factor = get_or(s, "escalation_factor", cfg.escalation_factor);
  cfg.max_escalations = get_or(s, "max_escalations", cfg.max_escalations);
  cfg.margin = get_or(s, "margin", cfg.margin);
  cfg.tolerance = get_or(s, "tolerance", cfg.tolerance);
  cfg.warm_start = get_or(s, "warm_start", cfg.warm_start);
  cfg.certify_resolution = get_or(s, "certify_resolution", cfg.certify_resolution);
  cfg.validate();
  return cfg;
}

json train_config_echo(const mnam::TrainConfig& cfg) {
  json j;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["step_size"] = cfg.step_size;
  j["optimizer"] =
      cfg.optimizer == mnam::OptimizerKind::kAdam ? "adam" : "gd";
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["adam_epsilon"] = cfg.adam_epsilon;
  j["lambda_init"] = cfg.lambda_init;
  j["eta_init"] = cfg.eta_init;
  j["escalation_factor"] = cfg.escalation_factor;
  j["max_escalations"] = cfg.max_escalations;
  j["margin"] = cfg.margin;
  j["tolerance"] = cfg.tolerance;
  j["warm_start"] = cfg.warm_start;
  j["certify_resolution"] = cfg.certify_resolution;
  return j;
}

std::vector<double> model_probabilities(const mnam::NamModel& m,
                                        const mnam::Dataset& d) {
  std::vector<double> out;
  out.reserve(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r)
    out.push_back(mnam::predict(m, d.row(r)));
  return out;
}

std::vector<double> model_probabilities(const mnam::FcnnModel& m,
                                        const mnam::Dataset& d) {
  std::vector<double> out;
  out.reserve(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r)
    out.push_back(mnam::fcnn_forward(m, d.row(r)));
  return out;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string recipe;
  std::string model = "mnam";
  double split_ratio = 0.8;
  double threshold = 0.5;
  bool cache_prepared = false;
};

int cmd_train(GlobalOptions& g, TrainArgs& args) {
  const json s = section(g, "train");
  if (args.data.empty()) args.data = get_or<std::string>(s, "data", "");
  if (args.recipe.empty()) args.recipe = get_or<std::string>(s, "recipe", "");
  args.model = get_or<std::string>(s, "model", args.model);
  args.split_ratio = get_or(s, "split_ratio", args.split_ratio);
  args.threshold = get_or(s, "threshold", args.threshold);
  if (args.data.empty() || args.recipe.empty())
    throw mnam::SpecError("train needs a data path and a recipe");
  if (args.model != "fcnn" && args.model != "nam" && args.model != "mnam")
    throw mnam::SpecError("model must be fcnn, nam, or mnam");
  const auto cfg = train_config_from(s, g.seed);

  args.cache_prepared = get_or(s, "cache_prepared", args.cache_prepared);

  const auto raw = mnam::load_csv(args.data, mnam::recipe_schema(args.recipe));
  auto prepared = mnam::prepare_recipe(args.recipe, raw);
  auto parts = mnam::split(prepared.data, args.split_ratio, g.seed);
  mnam::ModelSpec spec = prepared.spec;
  spec.features = parts.train.meta;

  const auto dir = ensure_out_dir(g);
  std::vector<std::string> outputs;
  if (args.cache_prepared) {
    mnam::write_prepared_cache(prepared, (dir / "prepared.csv").string(),
                               (dir / "prepared_meta.json").string());
    outputs.push_back("prepared.csv");
    outputs.push_back("prepared_meta.json");
  }
  json echo;
  echo["data"] = args.data;
  echo["recipe"] = args.recipe;
  echo["model"] = args.model;
  echo["split_ratio"] = args.split_ratio;
  echo["threshold"] = args.threshold;
  echo["train_config"] = train_config_echo(cfg);

  auto write_metrics = [&](const std::string& tag,
                           const std::vector<double>& probs,
                           const mnam::Dataset& d, std::size_t params) {
    auto rep = mnam::metrics(probs, d.labels, args.threshold);
    auto j = mnam::metrics_to_json(rep);
    j["parameter_count"] = params;
    mnam::write_text_file((dir / ("metrics_" + tag + ".json")).string(),
                          j.dump(2) + "\n");
    outputs.push_back("metrics_" + tag + ".json");
    emit(g, tag + " metrics\n" + mnam::metrics_to_table(rep));
  };

  if (args.model == "fcnn") {
    const auto model = mnam::train_fcnn(parts.train, spec.task, cfg);
    mnam::save_model_file((dir / "model.json").string(), mnam::model_to_json(model));
    outputs.push_back("model.json");
    write_metrics("train", model_probabilities(model, parts.train), parts.train,
                  model.parameter_count());
    write_metrics("test", model_probabilities(model, parts.test), parts.test,
                  model.parameter_count());
    write_manifest(g, dir, "train", echo, {args.data}, outputs);
    return kExitOk;
  }

  mnam::NamModel model;
  std::optional<mnam::PenaltyConfig> pen;
  std::optional<mnam::CertificationReport> cert;
  if (args.model == "nam") {
    model = mnam::train_nam(parts.train, spec, cfg, 0.0, 0.0);
    if (spec.has_constraints()) {
      pen = mnam::build_penalty_config(parts.train, spec, 0.0, 0.0, cfg.margin);
      cert = mnam::certify(model, cfg.certify_resolution, *pen);
    }
  } else {
    try {
      auto result = mnam::train_mnam(parts.train, spec, cfg);
      model = std::move(result.model);
      pen = std::move(result.penalty);
      if (spec.has_constraints()) cert = std::move(result.certification);
      mnam::write_text_file((dir / "escalation.csv").string(),
                            mnam::escalation_to_csv(result.log));
      outputs.push_back("escalation.csv");
      emit(g, mnam::escalation_to_csv(result.log));
    } catch (const mnam::EscalationExhausted& e) {
      mnam::write_text_file((dir / "escalation.csv").string(),
                            mnam::escalation_to_csv(e.log));
      std::cerr << "error: " << e.what() << "\n";
      write_manifest(g, dir, "train", echo, {args.data}, {"escalation.csv"});
      return kExitTraining;
    }
  }

  mnam::save_model_file(
      (dir / "model.json").string(),
      mnam::model_to_json(model, args.model, pen ? &*pen : nullptr));
  outputs.push_back("model.json");
  if (cert) {
    mnam::write_text_file((dir / "certification.json").string(),
                          mnam::certification_to_json(*cert).dump(2) + "\n");
    mnam::write_text_file((dir / "certification.txt").string(),
                          mnam::certification_to_table(*cert));
    outputs.push_back("certification.json");
    outputs.push_back("certification.txt");
    emit(g, mnam::certification_to_table(*cert));
  }
  write_metrics("train", model_probabilities(model, parts.train), parts.train,
                model.parameter_count());
  write_metrics("test", model_probabilities(model, parts.test), parts.test,
                model.parameter_count());
  write_manifest(g, dir, "train", echo, {args.data}, outputs);
  return kExitOk;
}

// --- certify -----------------------------------------------------------------

struct CertifyArgs {
  std::string model_path;
  int resolution = 1000;
};

int cmd_certify(GlobalOptions& g, CertifyArgs& args) {
  const json s = section(g, "certify");
  if (args.model_path.empty())
    args.model_path = get_or<std::string>(s, "model", "");
  args.resolution = get_or(s, "resolution", args.resolution);
  if (args.model_path.empty())
    throw mnam::SpecError("certify needs a model file");

  const auto saved = mnam::load_model_file(args.model_path);
  if (!saved.nam)
    throw mnam::SpecError("certification applies to additive models only");
  if (!saved.nam->spec.has_constraints())
    throw mnam::SpecError("model spec has no constraints to certify");
  mnam::PenaltyConfig pen;
  if (saved.penalty) {
    pen = *saved.penalty;
  } else {
    pen.feature_points.resize(saved.nam->spec.features.size());
    pen.pair_points.resize(saved.nam->spec.pairwise_constraints.size());
  }
  const auto report = mnam::certify(*saved.nam, args.resolution, pen);

  const auto dir = ensure_out_dir(g);
  mnam::write_text_file((dir / "certification.json").string(),
                        mnam::certification_to_json(report).dump(2) + "\n");
  mnam::write_text_file((dir / "certification.txt").string(),
                        mnam::certification_to_table(report));
  json echo;
  echo["model"] = args.model_path;
  echo["resolution"] = args.resolution;
  write_manifest(g, dir, "certify", echo, {args.model_path},
                 {"certification.json", "certification.txt"});
  emit(g, mnam::certification_to_table(report));
  return report.all_pass() ? kExitOk : kExitTraining;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string mode = "all";  // table1 | pairwise | all
};

int cmd_simulate(GlobalOptions& g, SimulateArgs& args) {
  const json s = section(g, "simulate");
  args.mode = get_or<std::string>(s, "mode", args.mode);
  const auto n_reps = get_or<std::size_t>(s, "n_reps", 1000);
  const auto n_samples = get_or<std::size_t>(s, "n_samples", 10000);

  const auto dir = ensure_out_dir(g);
  std::vector<std::string> outputs;
  std::string summary;

  if (args.mode == "table1" || args.mode == "all") {
    auto cells = mnam::individual_violation_sweep(g.seed, n_reps);
    std::vector<mnam::SimResultIndividual> results;
    results.reserve(cells.size());
    for (auto& cell : cells) {
      cell.config.n_samples = n_samples;
      results.push_back(mnam::simulate_individual(cell.config, g.threads));
    }
    mnam::write_text_file((dir / "table1.csv").string(),
                          mnam::sweep_to_csv(cells, results));
    outputs.push_back("table1.csv");
    summary += "individual violation sweep (" + std::to_string(n_reps) +
               " reps per cell)\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& cfg = cells[i].config;
      summary += "  " + cells[i].group + " c=" + mnam::format_double(cfg.c) +
                 " sigma=" + mnam::format_double(cfg.sigma) +
                 " rate=" + mnam::format_double(cfg.poisson_rate) + " -> " +
                 mnam::format_double(results[i].violation.ratio * 100.0) +
                 "% (se " +
                 mnam::format_double(results[i].violation.std_error * 100.0) +
                 "%)\n";
    }
  }

  if (args.mode == "pairwise" || args.mode == "all") {
    mnam::SimConfigPairwise cfg;
    cfg.alpha = get_or(s, "alpha", cfg.alpha);
    cfg.beta = get_or(s, "beta", cfg.beta);
    cfg.c = get_or(s, "c", cfg.c);
    cfg.rate1 = get_or(s, "rate1", cfg.rate1);
    cfg.rate2 = get_or(s, "rate2", cfg.rate2);
    cfg.sigma = get_or(s, "sigma", cfg.sigma);
    cfg.n_reps = n_reps;
    cfg.n_samples = n_samples;
    cfg.seed = mnam::SplitRng(g.seed).split(999).next_u64();
    const auto result = mnam::simulate_pairwise(cfg, g.threads);
    mnam::write_text_file((dir / "pairwise.csv").string(),
                          mnam::pairwise_result_to_csv(result));
    outputs.push_back("pairwise.csv");
    summary += "pairwise study: x1 " +
               mnam::format_double(result.individual_x1.ratio * 100.0) +
               "%, x2 " +
               mnam::format_double(result.individual_x2.ratio * 100.0) +
               "%, pairwise " +
               mnam::format_double(result.pairwise.ratio * 100.0) + "%\n";
  }

  if (outputs.empty())
    throw mnam::SpecError("simulate mode must be table1, pairwise, or all");
  mnam::write_text_file((dir / "summary.txt").string(), summary);
  outputs.push_back("summary.txt");
  json echo;
  echo["mode"] = args.mode;
  echo["n_reps"] = n_reps;
  echo["n_samples"] = n_samples;
  write_manifest(g, dir, "simulate", echo, {}, outputs);
  emit(g, summary);
  return kExitOk;
}

// --- audit ---------------------------------------------------------------------

struct AuditArgs {
  std::string data;
  std::string recipe;
};

int cmd_audit(GlobalOptions& g, AuditArgs& args) {
  const json s = section(g, "audit");
  if (args.data.empty()) args.data = get_or<std::string>(s, "data", "");
  if (args.recipe.empty()) args.recipe = get_or<std::string>(s, "recipe", "");
  if (args.data.empty() || args.recipe.empty())
    throw mnam::SpecError("audit needs a data path and a recipe");

  const auto raw = mnam::load_csv(args.data, mnam::recipe_schema(args.recipe));
  const auto prepared = mnam::prepare_recipe(args.recipe, raw);

  // default: audit every constrained feature and declared pair whose values
  // are integer-valued (marginal curves need discrete levels)
  std::vector<int> features;
  if (s.contains("features")) {
    features = s.at("features").get<std::vector<int>>();
  } else {
    for (const auto& c : prepared.spec.monotone_features) {
      bool integral = true;
      for (double v : prepared.data.columns[c.feature])
        integral = integral && v == std::floor(v);
      if (integral) features.push_back(c.feature);
    }
  }
  std::vector<mnam::PairwiseConstraint> pairs;
  for (const auto& pc : prepared.spec.pairwise_constraints) {
    const bool both = std::find(features.begin(), features.end(), pc.dominant) !=
                          features.end() &&
                      std::find(features.begin(), features.end(),
                                pc.dominated) != features.end();
    if (both) pairs.push_back(pc);
  }

  const auto report = mnam::audit_monotonicity(prepared.data, features, pairs);
  const auto dir = ensure_out_dir(g);
  mnam::write_text_file((dir / "curves.csv").string(),
                        mnam::audit_curves_to_csv(report));
  mnam::write_text_file((dir / "histogram.csv").string(),
                        mnam::audit_histogram_to_csv(report));
  mnam::write_text_file((dir / "audit.json").string(),
                        mnam::audit_to_json(report).dump(2) + "\n");
  json echo;
  echo["data"] = args.data;
  echo["recipe"] = args.recipe;
  echo["features"] = features;
  write_manifest(g, dir, "audit", echo, {args.data},
                 {"curves.csv", "histogram.csv", "audit.json"});

  std::string summary;
  for (const auto& f : report.features)
    summary += "feature " + f.name + ": " +
               (f.violated ? "violations found" : "no violations") + "\n";
  for (const auto& p : report.pairs)
    summary += "pair " + p.dominant_name + " over " + p.dominated_name + ": " +
               (p.violated ? "violations found" : "no violations") + "\n";
  emit(g, summary);
  return kExitOk;
}

// --- export-shapes ----------------------------------------------------------

struct ExportArgs {
  std::string model_path;
  std::string overlay_path;
  int grid = 101;
};

int cmd_export_shapes(GlobalOptions& g, ExportArgs& args) {
  const json s = section(g, "export_shapes");
  if (args.model_path.empty())
    args.model_path = get_or<std::string>(s, "model", "");
  if (args.overlay_path.empty())
    args.overlay_path = get_or<std::string>(s, "overlay", "");
  args.grid = get_or(s, "grid", args.grid);
  if (args.model_path.empty())
    throw mnam::SpecError("export-shapes needs a model file");
  if (args.grid < 2) throw mnam::SpecError("grid needs at least 2 points");

  const auto saved = mnam::load_model_file(args.model_path);
  if (!saved.nam)
    throw mnam::SpecError("shape export applies to additive models only");
  std::optional<mnam::SavedModel> overlay;
  if (!args.overlay_path.empty()) {
    overlay = mnam::load_model_file(args.overlay_path);
    if (!overlay->nam)
      throw mnam::SpecError("overlay model must be an additive model");
    if (overlay->nam->feature_count() != saved.nam->feature_count())
      throw mnam::SpecError("overlay model has a different feature count");
  }

  const auto dir = ensure_out_dir(g);
  std::vector<std::string> outputs;
  const auto& m = *saved.nam;
  for (std::size_t f = 0; f < m.feature_count(); ++f) {
    const auto& meta = m.spec.features[f];
    std::vector<double> grid(args.grid);
    const double lo = meta.min, hi = meta.max;
    for (int i = 0; i < args.grid; ++i)
      grid[i] = hi > lo ? lo + (hi - lo) * i / (args.grid - 1.0) : lo;
    const auto shape = mnam::shape_function(m, static_cast<int>(f), grid);
    const std::string base = "shape_" + meta.name;
    mnam::write_text_file((dir / (base + ".csv")).string(),
                          mnam::shape_to_csv(shape, meta.transforms));
    outputs.push_back(base + ".csv");

    mnam::SvgSeries series;
    series.label = saved.kind;
    for (const auto& pt : shape)
      series.points.push_back({meta.transforms.to_raw_space(pt.x), pt.value});
    std::vector<mnam::SvgSeries> all = {series};
    if (overlay) {
      const auto oshape =
          mnam::shape_function(*overlay->nam, static_cast<int>(f), grid);
      mnam::SvgSeries os;
      os.label = overlay->kind;
      os.color = "#c44e52";
      for (const auto& pt : oshape)
        os.points.push_back({meta.transforms.to_raw_space(pt.x), pt.value});
      all.push_back(os);
    }
    mnam::write_text_file((dir / (base + ".svg")).string(),
                          mnam::svg_line_chart(meta.name, all));
    outputs.push_back(base + ".svg");
  }
  json echo;
  echo["model"] = args.model_path;
  if (overlay) echo["overlay"] = args.overlay_path;
  echo["grid"] = args.grid;
  std::vector<std::string> inputs = {args.model_path};
  if (overlay) inputs.push_back(args.overlay_path);
  write_manifest(g, dir, "export-shapes", echo, inputs, outputs);
  emit(g, "wrote " + std::to_string(outputs.size()) + " shape files\n");
  return kExitOk;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string recipe;
  std::string path;
  std::size_t rows = 2000;
};

int cmd_synth(GlobalOptions& g, SynthArgs& args) {
  const json s = section(g, "synth");
  if (args.recipe.empty()) args.recipe = get_or<std::string>(s, "recipe", "");
  if (args.path.empty()) args.path = get_or<std::string>(s, "path", "");
  args.rows = get_or(s, "rows", args.rows);
  if (args.recipe.empty() || args.path.empty())
    throw mnam::SpecError("synth needs a recipe and an output path");
  mnam::write_synthetic_csv(args.recipe, args.path, args.rows, g.seed);
  emit(g, "wrote " + args.path + " (" + std::to_string(args.rows) + " rows)\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monotonic neural additive model toolkit"};
  app.set_version_flag("--version", mnam::kVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", g.seed, "run seed");
  auto* out_opt = app.add_option("--out", g.out_dir, "artifact directory");
  app.add_flag("--quiet", g.quiet, "suppress console output");
  app.add_option("--threads", g.threads, "worker threads for simulations");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train fcnn/nam/mnam on a dataset");
  train->add_option("--data", train_args.data, "CSV path");
  train->add_option("--recipe", train_args.recipe, "compas|law|thoracic|fico");
  train->add_option("--model", train_args.model, "fcnn|nam|mnam");
  train->add_option("--split-ratio", train_args.split_ratio, "train fraction");
  train->add_option("--threshold", train_args.threshold, "decision threshold");
  train->add_flag("--cache-prepared", train_args.cache_prepared,
                  "write the prepared dataset and its sidecar");

  CertifyArgs certify_args;
  auto* certify = app.add_subcommand("certify", "verify a saved model's constraints");
  certify->add_option("--model", certify_args.model_path, "model JSON");
  certify->add_option("--resolution", certify_args.resolution, "grid points");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo violation studies");
  simulate->add_option("--mode", sim_args.mode, "table1|pairwise|all");

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "empirical monotonicity audit of a dataset");
  audit->add_option("--data", audit_args.data, "CSV path");
  audit->add_option("--recipe", audit_args.recipe, "compas|law|thoracic|fico");

  ExportArgs export_args;
  auto* export_shapes =
      app.add_subcommand("export-shapes", "write per-feature shape CSV/SVG");
  export_shapes->add_option("--model", export_args.model_path, "model JSON");
  export_shapes->add_option("--overlay", export_args.overlay_path,
                            "second model for comparison");
  export_shapes->add_option("--grid", export_args.grid, "grid points");

  SynthArgs synth_args;
  auto* synth =
      app.add_subcommand("synth", "generate schema-compatible synthetic data");
  synth->add_option("--recipe", synth_args.recipe, "compas|law|thoracic|fico");
  synth->add_option("--path", synth_args.path, "output CSV path");
  synth->add_option("--rows", synth_args.rows, "row count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    g.seed_overridden = seed_opt->count() > 0;
    g.out_overridden = out_opt->count() > 0;
    load_config(g);
    if (train->parsed()) return cmd_train(g, train_args);
    if (certify->parsed()) return cmd_certify(g, certify_args);
    if (simulate->parsed()) return cmd_simulate(g, sim_args);
    if (audit->parsed()) return cmd_audit(g, audit_args);
    if (export_shapes->parsed()) return cmd_export_shapes(g, export_args);
    if (synth->parsed()) return cmd_synth(g, synth_args);
    return kExitUsage;
  } catch (const mnam::EscalationExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const mnam::TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const mnam::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const mnam::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
