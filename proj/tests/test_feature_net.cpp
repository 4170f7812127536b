#include "mnam/feature_net.hpp"

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using mnam::FeatureNetParams;
using mnam::forward;
using mnam::input_derivative;
using mnam::kFeatureNetParamCount;
using mnam::mixed_gradient;
using mnam::NetGradient;
using mnam::param_gradient;
using mnam::SplitRng;
using test_support::central_difference;
using test_support::random_net;
using test_support::rel_error;

namespace {

// Independent re-implementation of the net formula, kept deliberately
// separate from the library's code path.
double straight_line_eval(const FeatureNetParams& p, double x) {
  const double s0 = 1.0 / (1.0 + std::exp(-(p.w1[0] * x + p.b1[0])));
  const double s1 = 1.0 / (1.0 + std::exp(-(p.w1[1] * x + p.b1[1])));
  return p.w2[0] * s0 + p.w2[1] * s1 + p.b2;
}

}  // namespace

TEST_CASE("forward matches the closed form on hand cases") {
  FeatureNetParams zero;
  CHECK(forward(zero, 1.7) == 0.0);

  FeatureNetParams constant;  // w1 = b1 = 0 -> both units sit at 1/2
  constant.w2 = {1.0, 1.0};
  CHECK(forward(constant, -3.0) == 1.0);
  CHECK(forward(constant, 42.0) == 1.0);

  FeatureNetParams single;
  single.w1 = {1.0, 0.0};
  single.w2 = {1.0, 0.0};
  CHECK(forward(single, 0.0) == 0.5);
}

TEST_CASE("forward agrees with an independent evaluator on a grid") {
  SplitRng rng(8881);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_net(rng);
    for (int i = 0; i < 11; ++i) {
      const double x = -5.0 + i;
      CHECK(forward(p, x) == Catch::Approx(straight_line_eval(p, x)).epsilon(1e-15));
    }
  }
}

TEST_CASE("input derivative hand cases") {
  FeatureNetParams flat;
  flat.w2 = {3.0, -2.0};
  flat.b2 = 0.7;  // w1 = 0 -> constant function
  for (double x : {-10.0, 0.0, 2.5}) CHECK(input_derivative(flat, x) == 0.0);

  FeatureNetParams single;
  single.w1 = {1.0, 0.0};
  single.w2 = {1.0, 0.0};
  CHECK(input_derivative(single, 0.0) == 0.25);
}

TEST_CASE("input derivative matches central differences") {
  SplitRng rng(417);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_net(rng);
    const double x = rng.uniform(-3.0, 3.0);
    const double want =
        central_difference([&](double t) { return forward(p, t); }, x);
    CHECK(rel_error(input_derivative(p, x), want) < 1e-5);
  }
}

TEST_CASE("input derivative example point at tight tolerance") {
  SplitRng rng(99);
  const auto p = random_net(rng, 1.0);
  const double x = 0.3;
  const double want =
      central_difference([&](double t) { return forward(p, t); }, x);
  CHECK(rel_error(input_derivative(p, x), want) < 1e-6);
}

TEST_CASE("parameter gradient structure") {
  SplitRng rng(5);
  const auto p = random_net(rng);
  const auto g = param_gradient(p, 1.2);
  CHECK(g[6] == 1.0);  // output bias enters additively
  // d f / d w2_k is the unit activation itself
  const double s0 = 1.0 / (1.0 + std::exp(-(p.w1[0] * 1.2 + p.b1[0])));
  const double s1 = 1.0 / (1.0 + std::exp(-(p.w1[1] * 1.2 + p.b1[1])));
  CHECK(g[4] == Catch::Approx(s0).epsilon(1e-15));
  CHECK(g[5] == Catch::Approx(s1).epsilon(1e-15));
}

TEST_CASE("parameter gradient matches componentwise finite differences") {
  SplitRng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = random_net(rng);
    const double x = rng.uniform(-3.0, 3.0);
    const auto g = param_gradient(p, x);
    for (std::size_t i = 0; i < kFeatureNetParamCount; ++i) {
      const double want = central_difference(
          [&](double v) {
            auto q = p;
            mnam::set_param(q, i, v);
            return forward(q, x);
          },
          mnam::get_param(p, i));
      CHECK(rel_error(g[i], want) < 1e-5);
    }
  }
}

TEST_CASE("mixed gradient structure") {
  SplitRng rng(6);
  const auto p = random_net(rng);
  CHECK(mixed_gradient(p, 0.4)[6] == 0.0);  // bias cannot move the slope

  FeatureNetParams flat = p;
  flat.w1 = {0.0, 0.0};
  const auto g = mixed_gradient(flat, 0.4);
  CHECK(g[4] == 0.0);
  CHECK(g[5] == 0.0);
}

TEST_CASE("mixed gradient matches finite differences of the slope") {
  SplitRng rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = random_net(rng);
    const double x = rng.uniform(-3.0, 3.0);
    const auto g = mixed_gradient(p, x);
    for (std::size_t i = 0; i < kFeatureNetParamCount; ++i) {
      const double want = central_difference(
          [&](double v) {
            auto q = p;
            mnam::set_param(q, i, v);
            return input_derivative(q, x);
          },
          mnam::get_param(p, i));
      CHECK(rel_error(g[i], want) < 1e-5);
    }
  }
}

TEST_CASE("value and slope bounds hold everywhere") {
  SplitRng rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_net(rng, 3.0);
    const double value_bound =
        std::abs(p.w2[0]) + std::abs(p.w2[1]) + std::abs(p.b2);
    const double slope_bound =
        (std::abs(p.w2[0] * p.w1[0]) + std::abs(p.w2[1] * p.w1[1])) / 4.0;
    for (int i = 0; i < 50; ++i) {
      const double x = rng.uniform(-50.0, 50.0);
      CHECK(std::abs(forward(p, x)) <= value_bound + 1e-12);
      CHECK(std::abs(input_derivative(p, x)) <= slope_bound + 1e-12);
    }
  }
}

TEST_CASE("random init draws weights in [-1,1] and zero biases") {
  SplitRng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = mnam::random_feature_net(rng);
    CHECK(p.b1[0] == 0.0);
    CHECK(p.b1[1] == 0.0);
    CHECK(p.b2 == 0.0);
    for (double w : {p.w1[0], p.w1[1], p.w2[0], p.w2[1]}) {
      CHECK(w >= -1.0);
      CHECK(w <= 1.0);
    }
  }
}
