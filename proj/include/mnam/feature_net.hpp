#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "mnam/rng.hpp"

namespace mnam {

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One shape function f_i: R -> R, a scalar net with two logistic hidden
// units and a linear readout:
//
//   f(x) = w2_0 * s(w1_0 x + b1_0) + w2_1 * s(w1_1 x + b1_1) + b2
//
// Seven parameters per feature. Everything the penalized loss needs is
// available in closed form: the value, the input slope f', the gradient of
// f with respect to the parameters, and the gradient of f' with respect to
// the parameters.
struct FeatureNetParams {
  std::array<double, 2> w1{0.0, 0.0};
  std::array<double, 2> b1{0.0, 0.0};
  std::array<double, 2> w2{0.0, 0.0};
  double b2 = 0.0;
};

inline constexpr std::size_t kFeatureNetParamCount = 7;

// Flat parameter order: w1[0], w1[1], b1[0], b1[1], w2[0], w2[1], b2.
using NetGradient = std::array<double, kFeatureNetParamCount>;

inline double get_param(const FeatureNetParams& p, std::size_t i) {
  switch (i) {
    case 0: return p.w1[0];
    case 1: return p.w1[1];
    case 2: return p.b1[0];
    case 3: return p.b1[1];
    case 4: return p.w2[0];
    case 5: return p.w2[1];
    default: return p.b2;
  }
}

inline void set_param(FeatureNetParams& p, std::size_t i, double v) {
  switch (i) {
    case 0: p.w1[0] = v; break;
    case 1: p.w1[1] = v; break;
    case 2: p.b1[0] = v; break;
    case 3: p.b1[1] = v; break;
    case 4: p.w2[0] = v; break;
    case 5: p.w2[1] = v; break;
    default: p.b2 = v; break;
  }
}

inline double forward(const FeatureNetParams& p, double x) {
  return p.w2[0] * logistic(p.w1[0] * x + p.b1[0]) +
         p.w2[1] * logistic(p.w1[1] * x + p.b1[1]) + p.b2;
}

// f'(x) = sum_k w2_k w1_k s_k (1 - s_k)
inline double input_derivative(const FeatureNetParams& p, double x) {
  double d = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double s = logistic(p.w1[k] * x + p.b1[k]);
    d += p.w2[k] * p.w1[k] * s * (1.0 - s);
  }
  return d;
}

// d f / d theta
inline NetGradient param_gradient(const FeatureNetParams& p, double x) {
  NetGradient g{};
  for (int k = 0; k < 2; ++k) {
    const double s = logistic(p.w1[k] * x + p.b1[k]);
    const double sp = s * (1.0 - s);
    g[0 + k] = p.w2[k] * sp * x;  // w1_k
    g[2 + k] = p.w2[k] * sp;      // b1_k
    g[4 + k] = s;                 // w2_k
  }
  g[6] = 1.0;  // b2
  return g;
}

// d f' / d theta; the b2 component is identically zero.
// Uses s'' = s'(1 - 2s).
inline NetGradient mixed_gradient(const FeatureNetParams& p, double x) {
  NetGradient g{};
  for (int k = 0; k < 2; ++k) {
    const double s = logistic(p.w1[k] * x + p.b1[k]);
    const double sp = s * (1.0 - s);
    const double spp = sp * (1.0 - 2.0 * s);
    g[0 + k] = p.w2[k] * sp + p.w2[k] * p.w1[k] * spp * x;  // w1_k
    g[2 + k] = p.w2[k] * p.w1[k] * spp;                     // b1_k
    g[4 + k] = p.w1[k] * sp;                                // w2_k
  }
  g[6] = 0.0;
  return g;
}

// Weights uniform in [-1, 1], biases zero. Small symmetric start keeps the
// logistic units away from saturation.
inline FeatureNetParams random_feature_net(SplitRng& rng) {
  FeatureNetParams p;
  p.w1 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  p.w2 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return p;
}

}
