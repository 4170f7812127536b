#include "mnam/io.hpp"

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "mnam/cache.hpp"
#include "mnam/manifest.hpp"
#include "mnam/svg.hpp"
#include "mnam/synthetic.hpp"
#include "mnam/trainer.hpp"
#include "test_support.hpp"

using namespace mnam;
using test_support::random_net;
using test_support::TempDir;

namespace {

std::string slurp_file(const std::string& path) { return read_text_file(path); }

}  // namespace

TEST_CASE("format_double writes the shortest exact representation") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  for (double v : {0.1, 1.0 / 3.0, 1e300, -7.25, 3.141592653589793}) {
    const double back = std::stod(format_double(v));
    CHECK(back == v);
  }
}

TEST_CASE("model json round-trips value-identically") {
  auto prob = synth_constrained_regression(60, 2, false, true, 5);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.seed = 9;
  const auto result = train_mnam(prob.data, prob.spec, cfg);

  const auto doc = model_to_json(result.model, "mnam", &result.penalty);
  const auto text = doc.dump(2);
  const auto loaded = model_from_json(json::parse(text));

  REQUIRE(loaded.nam.has_value());
  CHECK(loaded.kind == "mnam");
  CHECK(pack(*loaded.nam) == pack(result.model));
  CHECK(loaded.nam->spec.monotone_features.size() ==
        result.model.spec.monotone_features.size());
  CHECK(loaded.nam->spec.features[0].name ==
        result.model.spec.features[0].name);
  REQUIRE(loaded.penalty.has_value());
  CHECK(loaded.penalty->margin == result.penalty.margin);
  CHECK(loaded.penalty->feature_points == result.penalty.feature_points);
  CHECK(loaded.penalty->pair_points == result.penalty.pair_points);

  // serialize -> parse -> serialize is a fixed point
  const auto text2 = model_to_json(*loaded.nam, loaded.kind,
                                   &*loaded.penalty)
                         .dump(2);
  CHECK(text2 == text);
}

TEST_CASE("fcnn json round-trips value-identically") {
  SplitRng rng(77);
  const auto m = init_fcnn(3, Task::kClassification, rng);
  const auto doc = model_to_json(m);
  const auto loaded = model_from_json(json::parse(doc.dump()));
  REQUIRE(loaded.fcnn.has_value());
  CHECK(pack(*loaded.fcnn) == pack(m));
  CHECK(loaded.fcnn->task == Task::kClassification);
}

TEST_CASE("model files reject foreign documents") {
  TempDir dir("io");
  const auto path = dir.file("notamodel.json");
  write_text_file(path, "{\"hello\": 1}\n");
  CHECK_THROWS_AS(load_model_file(path), DataError);
  const auto bad = dir.file("broken.json");
  write_text_file(bad, "{not json");
  CHECK_THROWS_AS(load_model_file(bad), DataError);
}

TEST_CASE("transforms survive the json round trip") {
  ColumnTransforms t;
  t.negated = true;
  t.cap = 3.0;
  t.wants_standardize = true;
  t.standardize_mean = 1.5;
  t.standardize_sd = 0.25;
  t.imputed_count = 7;
  const auto j = detail::transforms_to_json(t);
  const auto back = detail::transforms_from_json(j);
  CHECK(back.negated == t.negated);
  CHECK(back.cap == t.cap);
  CHECK(back.standardize_mean == t.standardize_mean);
  CHECK(back.standardize_sd == t.standardize_sd);
  CHECK(back.imputed_count == t.imputed_count);
}

TEST_CASE("escalation log renders the contract columns") {
  EscalationLog log;
  log.rounds = {{0, 0.0, 0.0, 0.5, 0.25, 0.0}, {1, 0.1, 0.0, 0.51, 0.0, 0.0}};
  const auto csv = escalation_to_csv(log);
  CHECK(csv ==
        "round,lambda,eta,loss,h1,h2\n"
        "0,0,0,0.5,0.25,0\n"
        "1,0.1,0,0.51,0,0\n");
}

TEST_CASE("certification report renders json and a table") {
  NamModel m;
  ModelSpec spec;
  spec.task = Task::kRegression;
  FeatureMeta meta;
  meta.name = "x0";
  meta.min = -1.0;
  meta.max = 1.0;
  spec.features = {meta};
  spec.monotone_features = {{0, Direction::kIncreasing}};
  m.spec = spec;
  FeatureNetParams net;
  net.w1 = {1.0, 0.0};
  net.w2 = {1.0, 0.0};
  m.nets = {net};
  PenaltyConfig pen;
  pen.feature_points = {{0.0}};
  const auto rep = certify(m, 100, pen);
  const auto j = certification_to_json(rep);
  CHECK(j["pass"] == true);
  CHECK(j["individual"].size() == 1);
  CHECK(j["individual"][0]["name"] == "x0");
  const auto table = certification_to_table(rep);
  CHECK(table.find("individual  x0") != std::string::npos);
  CHECK(table.find("pass") != std::string::npos);
}

TEST_CASE("metrics report renders the confusion-matrix table") {
  MetricsReport rep;
  rep.n = 6;
  rep.error = 1.0 / 3.0;
  rep.auc = 8.0 / 9.0;
  rep.tp = 2;
  rep.fn = 1;
  rep.fp = 1;
  rep.tn = 2;
  const auto j = metrics_to_json(rep);
  CHECK(j["confusion"]["tp"] == 2);
  const auto table = metrics_to_table(rep);
  CHECK(table.find("Predicted: Yes") != std::string::npos);
  CHECK(table.find("Actual: No") != std::string::npos);
}

TEST_CASE("sweep csv carries one row per cell") {
  const auto cells = individual_violation_sweep(3, 10);
  std::vector<SimResultIndividual> results;
  for (const auto& cell : cells) {
    SimConfigIndividual small = cell.config;
    small.n_samples = 200;
    results.push_back(simulate_individual(small));
  }
  const auto csv = sweep_to_csv(cells, results);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n' ? 1 : 0;
  CHECK(lines == 13);  // header + 12 cells
  CHECK(csv.rfind("group,alpha,c,poisson_rate,sigma", 0) == 0);
}

TEST_CASE("svg chart is a well-formed polyline plot") {
  SvgSeries s;
  s.label = "shape";
  s.points = {{0.0, 0.0}, {1.0, 0.5}, {2.0, 0.25}};
  const auto svg = svg_line_chart("demo", {s});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("sha256 matches the reference vector") {
  TempDir dir("sha");
  const auto path = dir.file("abc.txt");
  write_text_file(path, "abc");
  CHECK(sha256_file(path) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("prepared-dataset cache round-trips and verifies its checksum") {
  TempDir dir("cache");
  const auto csv = dir.file("source.csv");
  mnam::write_synthetic_compas_csv(csv, 300, 13);
  const auto prepared =
      mnam::prepare_compas(mnam::load_csv(csv, mnam::compas_schema()));

  const auto cache_csv = dir.file("prepared.csv");
  const auto sidecar = dir.file("prepared_meta.json");
  write_prepared_cache(prepared, cache_csv, sidecar);

  const auto loaded = load_prepared_cache(cache_csv, sidecar);
  CHECK(loaded.data.columns == prepared.data.columns);
  CHECK(loaded.data.labels == prepared.data.labels);
  CHECK(loaded.spec.monotone_features.size() ==
        prepared.spec.monotone_features.size());
  CHECK(loaded.spec.pairwise_constraints.size() ==
        prepared.spec.pairwise_constraints.size());
  CHECK(loaded.data.meta[1].transforms.cap == 3.0);  // markers intact

  // tampering with the cached bytes is caught
  auto text = slurp_file(cache_csv);
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  write_text_file(cache_csv, text);
  CHECK_THROWS_AS(load_prepared_cache(cache_csv, sidecar), mnam::DataError);
}

TEST_CASE("manifest pins config, seed, and input hashes") {
  TempDir dir("manifest");
  const auto input = dir.file("in.csv");
  write_text_file(input, "x,y\n1,2\n");
  json cfg;
  cfg["epochs"] = 10;
  const auto m = make_manifest(cfg, 42, {input}, {"model.json"});
  CHECK(m["seed"] == 42);
  CHECK(m["config"]["epochs"] == 10);
  CHECK(m["inputs"][input] == sha256_file(input));
  CHECK(m["outputs"][0] == "model.json");
  CHECK(m.contains("tool_version"));
}
