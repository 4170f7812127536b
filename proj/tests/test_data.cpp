#include "mnam/data.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "mnam/synthetic.hpp"
#include "test_support.hpp"

using namespace mnam;
using test_support::TempDir;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("csv loading returns exact values") {
  TempDir dir("csv");
  const auto path = dir.file("t.csv");
  write_file(path, "a,b,y\n1.5,2,0\n-3.25,4,1\n0,6,0\n");
  const Schema schema = {{"a", FeatureKind::kNumeric},
                         {"b", FeatureKind::kNumeric},
                         {"y", FeatureKind::kBinary}};
  const auto table = load_csv(path, schema);
  CHECK(table.n_rows() == 3);
  CHECK(table.column("a") == std::vector<double>{1.5, -3.25, 0.0});
  CHECK(table.column("b") == std::vector<double>{2.0, 4.0, 6.0});
  CHECK(table.column("y") == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("boolean tokens normalize to zero and one") {
  TempDir dir("csvbool");
  const auto path = dir.file("t.csv");
  write_file(path, "flag,y\nT,1\nF,0\ntrue,1\nFALSE,0\n");
  const auto table = load_csv(
      path, {{"flag", FeatureKind::kBinary}, {"y", FeatureKind::kBinary}});
  CHECK(table.column("flag") == std::vector<double>{1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("ordinal code tokens map to their trailing integers") {
  TempDir dir("csvcode");
  const auto path = dir.file("t.csv");
  write_file(path, "size,y\nOC11,0\nOC14,1\nOC12,0\n");
  const auto table =
      load_csv(path, {{"size", FeatureKind::kOrdinal}, {"y", FeatureKind::kBinary}});
  CHECK(table.column("size") == std::vector<double>{11.0, 14.0, 12.0});
  CHECK(table.column("size")[0] < table.column("size")[1]);  // OC11 < OC14
}

TEST_CASE("csv errors carry row and column context") {
  TempDir dir("csverr");
  const auto good_schema =
      Schema{{"a", FeatureKind::kNumeric}, {"y", FeatureKind::kBinary}};

  const auto missing = dir.file("missing.csv");
  write_file(missing, "b,y\n1,0\n");
  CHECK_THROWS_WITH(load_csv(missing, good_schema),
                    Catch::Matchers::ContainsSubstring("missing column 'a'"));

  const auto bad_cell = dir.file("bad.csv");
  write_file(bad_cell, "a,y\n1,0\nfoo,1\n");
  CHECK_THROWS_WITH(load_csv(bad_cell, good_schema),
                    Catch::Matchers::ContainsSubstring("row 2") &&
                        Catch::Matchers::ContainsSubstring("'foo'"));

  const auto empty = dir.file("empty.csv");
  write_file(empty, "");
  CHECK_THROWS_AS(load_csv(empty, good_schema), DataError);

  const auto headers_only = dir.file("headers.csv");
  write_file(headers_only, "a,y\n");
  CHECK_THROWS_AS(load_csv(headers_only, good_schema), DataError);

  const auto ragged = dir.file("ragged.csv");
  write_file(ragged, "a,y\n1,0,9\n");
  CHECK_THROWS_AS(load_csv(ragged, good_schema), DataError);
}

TEST_CASE("csv tolerates CRLF, quotes, and extra columns") {
  TempDir dir("csvcrlf");
  const auto path = dir.file("t.csv");
  write_file(path, "a,junk,y\r\n\"1.5\",ignored,0\r\n2.5,\"x,y\",1\r\n");
  const auto table = load_csv(
      path, {{"a", FeatureKind::kNumeric}, {"y", FeatureKind::kBinary}});
  CHECK(table.column("a") == std::vector<double>{1.5, 2.5});
}

TEST_CASE("split is deterministic, disjoint, and sized by the ratio") {
  Dataset d;
  d.columns.resize(1);
  FeatureMeta meta;
  meta.name = "x0";
  d.meta = {meta};
  for (int i = 0; i < 10; ++i) {
    d.columns[0].push_back(static_cast<double>(i));
    d.labels.push_back(static_cast<double>(i));
  }
  d.refresh_ranges();

  const auto s = split(d, 0.8, 17);
  CHECK(s.train.n_rows() == 8);
  CHECK(s.test.n_rows() == 2);
  std::set<double> seen;
  for (double v : s.train.columns[0]) seen.insert(v);
  for (double v : s.test.columns[0]) seen.insert(v);
  CHECK(seen.size() == 10);  // a permutation: no loss, no overlap

  const auto again = split(d, 0.8, 17);
  CHECK(again.train.columns[0] == s.train.columns[0]);
  CHECK(again.test.labels == s.test.labels);

  const auto other = split(d, 0.8, 18);
  CHECK(other.train.columns[0] != s.train.columns[0]);

  CHECK_THROWS_AS(split(d, 0.0, 1), SpecError);
  CHECK_THROWS_AS(split(d, 1.0, 1), SpecError);
}

TEST_CASE("standardization is fit on train only and round-trips") {
  SplitRng rng(23);
  Dataset d;
  d.columns.resize(2);
  FeatureMeta m0;
  m0.name = "x0";
  m0.transforms.wants_standardize = true;
  FeatureMeta m1;
  m1.name = "x1";
  m1.kind = FeatureKind::kBinary;  // untouched
  d.meta = {m0, m1};
  std::vector<double> raw;
  for (int i = 0; i < 500; ++i) {
    const double v = 40.0 + rng.normal(0.0, 7.0);
    raw.push_back(v);
    d.columns[0].push_back(v);
    d.columns[1].push_back(i % 2 ? 1.0 : 0.0);
    d.labels.push_back(0.0);
  }
  d.refresh_ranges();

  const auto s = split(d, 0.8, 5);
  double mean = 0.0, var = 0.0;
  for (double v : s.train.columns[0]) mean += v;
  mean /= s.train.n_rows();
  for (double v : s.train.columns[0]) var += v * v;
  CHECK(std::abs(mean) < 1e-9);
  CHECK(var / s.train.n_rows() == Catch::Approx(1.0).epsilon(1e-9));

  // binary column untouched
  for (double v : s.train.columns[1]) CHECK((v == 0.0 || v == 1.0));

  // de-standardizing recovers raw values
  const auto& t = s.train.meta[0].transforms;
  REQUIRE(t.standardized());
  for (std::size_t i = 0; i < s.train.n_rows(); ++i) {
    const double back = t.to_raw_space(s.train.columns[0][i]);
    bool found = false;
    for (double r : raw)
      if (std::abs(r - back) < 1e-9) found = true;
    CHECK(found);
  }

  // double application is detected and refused
  CHECK_THROWS_AS(split(s.train, 0.5, 1), DataError);
}

TEST_CASE("test-split label prevalence stays near the full-data prevalence") {
  TempDir dir("prev");
  const auto path = dir.file("compas.csv");
  write_synthetic_compas_csv(path, 7214, 2024);
  const auto prepared = prepare_compas(load_csv(path, compas_schema()));
  double full = 0.0;
  for (double y : prepared.data.labels) full += y;
  full /= prepared.data.n_rows();

  int within = 0;
  double total_dev = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto s = split(prepared.data, 0.8, seed);
    double prev = 0.0;
    for (double y : s.test.labels) prev += y;
    prev /= s.test.n_rows();
    const double dev = std::abs(prev - full);
    total_dev += dev;
    if (dev <= 0.03) ++within;
  }
  CHECK(within >= 95);
  CHECK(total_dev / 100.0 < 0.015);
}

TEST_CASE("compas recipe applies the documented preprocessing") {
  TempDir dir("compas");
  const auto path = dir.file("compas.csv");
  write_synthetic_compas_csv(path, 1500, 7);
  const auto raw = load_csv(path, compas_schema());
  const auto prepared = prepare_compas(raw);

  CHECK(prepared.data.n_features() == 6);  // race, sex, score removed
  CHECK(prepared.spec.task == Task::kClassification);
  // truncation at three juvenile charges
  for (std::size_t c : {std::size_t{1}, std::size_t{2}}) {
    for (double v : prepared.data.columns[c]) CHECK(v <= 3.0);
    CHECK(prepared.data.meta[c].transforms.cap == 3.0);
  }
  // a row with seven juvenile felonies is stored as three
  RawTable seven = raw;
  for (std::size_t i = 0; i < seven.names.size(); ++i)
    seven.columns[i] = {seven.columns[i][0]};
  for (std::size_t i = 0; i < seven.names.size(); ++i)
    if (seven.names[i] == "x4") seven.columns[i][0] = 7.0;
  const auto capped = prepare_compas(seven);
  CHECK(capped.data.columns[1][0] == 3.0);

  REQUIRE(prepared.spec.pairwise_constraints.size() == 1);
  CHECK(prepared.spec.features[prepared.spec.pairwise_constraints[0].dominant]
            .name == "x4");
  CHECK(prepared.spec.features[prepared.spec.pairwise_constraints[0].dominated]
            .name == "x5");
  CHECK(prepared.spec.monotone_features.size() == 4);
  for (const auto& c : prepared.spec.monotone_features)
    CHECK(c.direction == Direction::kIncreasing);
}

TEST_CASE("law recipe spec and LGPA scaling") {
  TempDir dir("law");
  const auto path = dir.file("law.csv");
  write_synthetic_law_csv(path, 2000, 3);
  const auto prepared = prepare_law(load_csv(path, law_schema()));

  CHECK(prepared.data.n_features() == 9);  // race and sex removed
  CHECK(prepared.spec.monotone_features.size() == 6);
  REQUIRE(prepared.spec.pairwise_constraints.size() == 2);
  CHECK(prepared.spec.pairwise_constraints[0].dominant == 1);
  CHECK(prepared.spec.pairwise_constraints[0].dominated == 0);
  CHECK(prepared.spec.pairwise_constraints[1].dominant == 5);
  CHECK(prepared.spec.pairwise_constraints[1].dominated == 4);

  // the two LGPA columns land on a common scale after the split
  const auto s = split(prepared.data, 0.8, 11);
  for (std::size_t c : {std::size_t{4}, std::size_t{5}}) {
    double mean = 0.0;
    for (double v : s.train.columns[c]) mean += v;
    mean /= s.train.n_rows();
    CHECK(std::abs(mean) < 1e-9);
  }
}

TEST_CASE("thoracic recipe decodes symptom and size codes") {
  TempDir dir("thoracic");
  const auto path = dir.file("thoracic.csv");
  write_synthetic_thoracic_csv(path, 470, 5);
  const auto prepared = prepare_thoracic(load_csv(path, thoracic_schema()));

  CHECK(prepared.data.n_rows() == 470);
  CHECK(prepared.data.n_features() == 16);
  CHECK(prepared.spec.monotone_features.size() == 3);
  REQUIRE(prepared.spec.pairwise_constraints.size() == 2);
  // hemoptysis over cough, dyspnea over cough
  CHECK(prepared.spec.pairwise_constraints[0].dominant == 5);
  CHECK(prepared.spec.pairwise_constraints[0].dominated == 7);
  CHECK(prepared.spec.pairwise_constraints[1].dominant == 6);
  CHECK(prepared.spec.pairwise_constraints[1].dominated == 7);
  // tumor size codes kept their order on one integer scale
  double lo = 1e300, hi = -1e300;
  for (double v : prepared.data.columns[9]) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 11.0);
  CHECK(hi <= 14.0);
  CHECK(lo < hi);
  // symptoms are 0/1
  for (std::size_t c : {std::size_t{4}, std::size_t{5}, std::size_t{6},
                        std::size_t{7}, std::size_t{8}})
    for (double v : prepared.data.columns[c]) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("fico recipe encodes delinquency and imputes sentinels") {
  TempDir dir("fico");
  const auto path = dir.file("fico.csv");
  write_synthetic_fico_csv(path, 3000, 9);
  const auto prepared = prepare_fico(load_csv(path, fico_schema()));

  CHECK(prepared.data.n_features() == 23);
  CHECK(prepared.spec.monotone_features.size() == 2);
  REQUIRE(prepared.spec.pairwise_constraints.size() == 1);
  CHECK(prepared.spec.pairwise_constraints[0].dominant == 9);    // recent
  CHECK(prepared.spec.pairwise_constraints[0].dominated == 10);  // ever

  // the delinquency scale spans the five ordered levels -4..0
  std::set<double> levels;
  for (double v : prepared.data.columns[9]) levels.insert(v);
  for (double expected : {-4.0, -3.0, -2.0, -1.0, 0.0})
    CHECK(levels.count(expected) == 1);
  for (double v : prepared.data.columns[9]) {
    CHECK(v <= 0.0);
    CHECK(v >= -6.0);
  }

  // sentinel cells were imputed and the count recorded
  std::size_t imputed = 0;
  for (const auto& meta : prepared.data.meta)
    imputed += meta.transforms.imputed_count;
  CHECK(imputed > 0);

  // a prepared table cannot be prepared again: encoded values are not codes
  RawTable reencoded;
  reencoded.names.push_back("y");
  reencoded.columns.push_back(prepared.data.labels);
  for (int i = 1; i <= 23; ++i) {
    reencoded.names.push_back("x" + std::to_string(i));
    reencoded.columns.push_back(prepared.data.columns[i - 1]);
  }
  CHECK_THROWS_AS(prepare_fico(reencoded), DataError);
}

TEST_CASE("every recipe emits increasing-only constraints") {
  TempDir dir("norms");
  for (const std::string recipe : {"compas", "law", "thoracic", "fico"}) {
    const auto path = dir.file(recipe + ".csv");
    write_synthetic_csv(recipe, path, 600, 21);
    const auto prepared =
        prepare_recipe(recipe, load_csv(path, recipe_schema(recipe)));
    for (const auto& c : prepared.spec.monotone_features)
      CHECK(c.direction == Direction::kIncreasing);
    prepared.spec.validate();
  }
}

TEST_CASE("real compas file matches the reference row and label counts",
          "[realdata]") {
  const char* env = std::getenv("MNAM_DATA_DIR");
  const std::string dir = env ? env : "data";
  const auto path = dir + "/compas.csv";
  if (!std::filesystem::exists(path)) {
    SKIP("real COMPAS file not present at " + path);
  }
  const auto prepared = prepare_compas(load_csv(path, compas_schema()));
  CHECK(prepared.data.n_rows() == 7214);
  double positives = 0.0;
  for (double y : prepared.data.labels) positives += y;
  CHECK(positives == 3051.0);
}

TEST_CASE("real law file matches the reference row and label counts",
          "[realdata]") {
  const char* env = std::getenv("MNAM_DATA_DIR");
  const std::string dir = env ? env : "data";
  const auto path = dir + "/law.csv";
  if (!std::filesystem::exists(path)) {
    SKIP("real law school file not present at " + path);
  }
  const auto prepared = prepare_law(load_csv(path, law_schema()));
  CHECK(prepared.data.n_rows() == 18692);
  double positives = 0.0;
  for (double y : prepared.data.labels) positives += y;
  CHECK(positives == 16856.0);
}

TEST_CASE("real thoracic file matches the reference row and label counts",
          "[realdata]") {
  const char* env = std::getenv("MNAM_DATA_DIR");
  const std::string dir = env ? env : "data";
  const auto path = dir + "/thoracic.csv";
  if (!std::filesystem::exists(path)) {
    SKIP("real thoracic file not present at " + path);
  }
  const auto prepared = prepare_thoracic(load_csv(path, thoracic_schema()));
  CHECK(prepared.data.n_rows() == 470);
  double positives = 0.0;
  for (double y : prepared.data.labels) positives += y;
  CHECK(positives == 70.0);
}
