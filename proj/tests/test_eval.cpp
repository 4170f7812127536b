#include "mnam/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "mnam/data.hpp"
#include "test_support.hpp"

using namespace mnam;

TEST_CASE("six-point hand case: AUC 8/9 and the 2/1/1/2 confusion matrix") {
  const std::vector<double> probs = {0.9, 0.8, 0.7, 0.4, 0.3, 0.1};
  const std::vector<double> labels = {1.0, 1.0, 0.0, 1.0, 0.0, 0.0};
  const auto rep = metrics(probs, labels, 0.5);
  REQUIRE(rep.auc.has_value());
  CHECK(*rep.auc == Catch::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(rep.tp == 2);
  CHECK(rep.fn == 1);
  CHECK(rep.fp == 1);
  CHECK(rep.tn == 2);
  CHECK(rep.error == Catch::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(rep.tp + rep.fn + rep.fp + rep.tn == static_cast<long>(rep.n));
}

TEST_CASE("perfect separation scores error zero and AUC one") {
  const std::vector<double> probs = {0.9, 0.8, 0.2, 0.1};
  const std::vector<double> labels = {1.0, 1.0, 0.0, 0.0};
  const auto rep = metrics(probs, labels, 0.5);
  CHECK(rep.error == 0.0);
  REQUIRE(rep.auc.has_value());
  CHECK(*rep.auc == 1.0);
}

TEST_CASE("shuffled labels give chance-level AUC") {
  SplitRng rng(404);
  const std::size_t n = 10000;
  std::vector<double> probs(n), labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = rng.next_double();
    labels[i] = rng.below(2) ? 1.0 : 0.0;
  }
  const auto rep = metrics(probs, labels, 0.5);
  REQUIRE(rep.auc.has_value());
  CHECK(std::abs(*rep.auc - 0.5) < 0.02);
}

TEST_CASE("ties contribute one half") {
  const std::vector<double> probs = {0.5, 0.5};
  const std::vector<double> labels = {1.0, 0.0};
  const auto rep = metrics(probs, labels, 0.5);
  REQUIRE(rep.auc.has_value());
  CHECK(*rep.auc == 0.5);
}

TEST_CASE("single-class labels leave AUC undefined but metrics valid") {
  const std::vector<double> probs = {0.9, 0.4, 0.6};
  const std::vector<double> labels = {1.0, 1.0, 1.0};
  const auto rep = metrics(probs, labels, 0.5);
  CHECK_FALSE(rep.auc.has_value());
  CHECK(rep.tp == 2);
  CHECK(rep.fn == 1);
  CHECK(rep.error == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("AUC is invariant under strictly increasing transforms") {
  SplitRng rng(77);
  std::vector<double> probs(500), labels(500);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = rng.next_double();
    labels[i] = rng.below(2) ? 1.0 : 0.0;
  }
  auto cubed = probs;
  for (auto& p : cubed) p = p * p * p;
  const auto a = metrics(probs, labels, 0.5);
  const auto b = metrics(cubed, labels, 0.5);
  REQUIRE(a.auc.has_value());
  REQUIRE(b.auc.has_value());
  CHECK(*a.auc == *b.auc);  // ranks unchanged, bitwise equal
}

TEST_CASE("confusion counts ignore row order") {
  SplitRng rng(12);
  std::vector<double> probs(200), labels(200);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = rng.next_double();
    labels[i] = rng.below(2) ? 1.0 : 0.0;
  }
  const auto a = metrics(probs, labels, 0.5);
  std::vector<std::size_t> perm(200);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 200; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<double> probs2(200), labels2(200);
  for (std::size_t i = 0; i < 200; ++i) {
    probs2[i] = probs[perm[i]];
    labels2[i] = labels[perm[i]];
  }
  const auto b = metrics(probs2, labels2, 0.5);
  CHECK(a.tp == b.tp);
  CHECK(a.fn == b.fn);
  CHECK(a.fp == b.fp);
  CHECK(a.tn == b.tn);
  CHECK(a.auc == b.auc);
}

TEST_CASE("threshold ties classify as positive") {
  const std::vector<double> probs = {0.5, 0.5, 0.5, 0.5};
  const std::vector<double> labels = {1.0, 1.0, 0.0, 0.0};
  const auto rep = metrics(probs, labels, 0.5);
  CHECK(rep.tp == 2);
  CHECK(rep.fp == 2);
  CHECK(rep.fn == 0);
  CHECK(rep.tn == 0);
}

TEST_CASE("metrics input validation") {
  const std::vector<double> probs = {0.5};
  const std::vector<double> two = {0.5, 0.5};
  const std::vector<double> labels = {1.0};
  CHECK_THROWS_AS(metrics(two, labels, 0.5), DataError);
  CHECK_THROWS_AS(metrics(std::vector<double>{}, std::vector<double>{}, 0.5),
                  DataError);
  CHECK_THROWS_AS(metrics(std::vector<double>{1.5}, labels, 0.5), DataError);
  CHECK_THROWS_AS(metrics(probs, std::vector<double>{0.4}, 0.5), DataError);
}

namespace {

Dataset integer_feature_data(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  Dataset d;
  d.columns = {xs};
  d.labels = ys;
  FeatureMeta meta;
  meta.name = "x0";
  meta.kind = FeatureKind::kOrdinal;
  d.meta = {meta};
  d.refresh_ranges();
  return d;
}

}  // namespace

TEST_CASE("audit flags no violations on monotone data") {
  const auto d = integer_feature_data({0, 0, 1, 1, 2, 2, 3, 3},
                                      {0.0, 0.2, 0.4, 0.4, 0.7, 0.7, 1.0, 0.8});
  const std::vector<int> features = {0};
  const auto rep = audit_monotonicity(d, features);
  REQUIRE(rep.features.size() == 1);
  CHECK_FALSE(rep.features[0].violated);
  CHECK(rep.features[0].steps.size() == 3);
  for (const auto& s : rep.features[0].steps) CHECK_FALSE(s.decreasing);
}

TEST_CASE("audit spots a dip and reports the step") {
  const auto d = integer_feature_data({0, 0, 1, 1, 2, 2, 3, 3},
                                      {0.1, 0.1, 0.5, 0.5, 0.8, 0.8, 0.2, 0.2});
  const std::vector<int> features = {0};
  const auto rep = audit_monotonicity(d, features);
  REQUIRE(rep.features.size() == 1);
  CHECK(rep.features[0].violated);
  const auto& last = rep.features[0].steps.back();
  CHECK(last.from == 2);
  CHECK(last.to == 3);
  CHECK(last.decreasing);
}

TEST_CASE("audit curve equals the simulation curve on shared inputs") {
  SplitRng rng(31);
  std::vector<int> xs(5000);
  std::vector<double> ys(5000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = rng.poisson(1.0);
    ys[i] = rng.next_double();
  }
  // restrict to [0, 4] so both routines see the same domain
  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 4) continue;
    fx.push_back(xs[i]);
    fy.push_back(ys[i]);
  }
  const auto d = integer_feature_data(fx, fy);
  const std::vector<int> features = {0};
  const auto rep = audit_monotonicity(d, features);
  const auto sim_curve = empirical_marginal_curve(xs, ys, 4);
  REQUIRE(rep.features[0].curve.size() == sim_curve.size());
  for (std::size_t i = 0; i < sim_curve.size(); ++i) {
    CHECK(rep.features[0].curve[i].x == sim_curve[i].x);
    CHECK(rep.features[0].curve[i].count == sim_curve[i].count);
    if (sim_curve[i].present())
      CHECK(rep.features[0].curve[i].mean == sim_curve[i].mean);
  }
}

TEST_CASE("audit pair increments compare shared adjacent levels") {
  Dataset d;
  // feature 0 rises slowly, feature 1 rises fast; y depends on both
  d.columns = {{0, 0, 1, 1, 2, 2}, {0, 1, 0, 1, 2, 2}};
  d.labels = {0.0, 0.5, 0.1, 0.6, 0.9, 0.9};
  for (int i = 0; i < 2; ++i) {
    FeatureMeta meta;
    meta.name = "x" + std::to_string(i);
    meta.kind = FeatureKind::kOrdinal;
    d.meta.push_back(meta);
  }
  d.refresh_ranges();
  const std::vector<int> features = {0, 1};
  const std::vector<PairwiseConstraint> pairs = {{0, 1}};
  const auto rep = audit_monotonicity(d, features, pairs);
  REQUIRE(rep.pairs.size() == 1);
  CHECK(rep.pairs[0].increments.size() >= 1);
  for (const auto& inc : rep.pairs[0].increments)
    CHECK(inc.violated == (inc.increment_dominant < inc.increment_dominated));
}

TEST_CASE("audit rejects unusable features") {
  const auto single = integer_feature_data({2, 2, 2}, {0.0, 1.0, 0.0});
  const std::vector<int> features = {0};
  CHECK_THROWS_AS(audit_monotonicity(single, features), DataError);

  const auto fractional = integer_feature_data({0.5, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK_THROWS_AS(audit_monotonicity(fractional, features), DataError);

  const auto ok = integer_feature_data({0, 1, 2}, {0.0, 1.0, 0.0});
  const std::vector<int> bad_index = {3};
  CHECK_THROWS_AS(audit_monotonicity(ok, bad_index), SpecError);
}

TEST_CASE("real compas audit shows the misdemeanor dip between two and three",
          "[realdata]") {
  const char* env = std::getenv("MNAM_DATA_DIR");
  const std::string dir = env ? env : "data";
  const auto path = dir + "/compas.csv";
  if (!std::filesystem::exists(path)) {
    SKIP("real COMPAS file not present at " + path);
  }
  const auto prepared = prepare_compas(load_csv(path, compas_schema()));
  const std::vector<int> features = {2};  // juvenile misdemeanors, capped at 3
  const auto rep = audit_monotonicity(prepared.data, features);
  bool dip_2_to_3 = false;
  for (const auto& s : rep.features[0].steps)
    if (s.from == 2 && s.to == 3 && s.decreasing) dip_2_to_3 = true;
  CHECK(dip_2_to_3);
}
