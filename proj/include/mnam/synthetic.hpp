#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/feature_net.hpp"
#include "mnam/rng.hpp"
#include "mnam/types.hpp"

namespace mnam {

// Seeded stand-ins with the same schemas as the public benchmark files, so
// the full pipeline (loader, recipes, training, certification) runs without
// redistributing data. The signal directions roughly follow the real
// datasets; the magnitudes are arbitrary.

namespace detail {

inline int clamp_int(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

inline std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string num(int v) { return std::to_string(v); }

}  // namespace detail

inline void write_synthetic_compas_csv(const std::string& path, std::size_t n,
                                       std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  SplitRng rng(seed);
  out << "x1,x2,x3,x4,x5,x6,x7,x8,x9,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int race = 1 + static_cast<int>(rng.below(6));
    const int sex = static_cast<int>(rng.below(2));
    const int age = 18 + static_cast<int>(rng.below(53));
    // rare heavy tails keep the truncation rule exercised
    const int juv_fel =
        rng.poisson(0.12) + (rng.next_double() < 0.004 ? 4 : 0);
    const int juv_misd =
        rng.poisson(0.2) + (rng.next_double() < 0.004 ? 4 : 0);
    const int priors = rng.poisson(2.0);
    const int charge = 1 + static_cast<int>(rng.below(12));
    const int degree = rng.next_double() < 0.35 ? 1 : 0;
    const double eta = -0.9 + 0.55 * std::min(juv_fel, 3) +
                       0.35 * std::min(juv_misd, 3) + 0.16 * std::min(priors, 8) +
                       0.45 * degree - 0.025 * (age - 35);
    const int y = rng.next_double() < logistic(eta) ? 1 : 0;
    const int score = detail::clamp_int(
        static_cast<int>(std::lround(5.5 + 2.0 * eta + rng.normal(0.0, 1.5))), 1,
        10);
    out << detail::csv_join({detail::num(race), detail::num(sex),
                             detail::num(age), detail::num(juv_fel),
                             detail::num(juv_misd), detail::num(priors),
                             detail::num(charge), detail::num(degree),
                             detail::num(score), detail::num(y)})
        << "\n";
  }
}

inline void write_synthetic_law_csv(const std::string& path, std::size_t n,
                                    std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  SplitRng rng(seed);
  out << "x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,x11,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double ability = rng.normal(0.0, 1.0);
    const int dec1 = detail::clamp_int(
        static_cast<int>(std::lround(5.5 + 2.2 * ability + rng.normal(0.0, 1.4))),
        1, 10);
    const int dec3 = detail::clamp_int(
        static_cast<int>(std::lround(5.5 + 2.4 * ability + rng.normal(0.0, 1.2))),
        1, 10);
    const double lsat = 36.0 + 5.0 * ability + rng.normal(0.0, 3.0);
    const double ugpa = 3.2 + 0.3 * ability + rng.normal(0.0, 0.25);
    const double lgpa1 = 2.9 + 0.45 * ability + rng.normal(0.0, 0.3);   // 0-4 scale
    const double lgpa_cum = 60.0 + 9.0 * ability + rng.normal(0.0, 5.0);  // 0-100 scale
    const int fulltime = rng.next_double() < 0.85 ? 1 : 0;
    const int income = 1 + static_cast<int>(rng.below(5));
    const int sex = static_cast<int>(rng.below(2));
    const int tier = 1 + static_cast<int>(rng.below(6));
    const int race = 1 + static_cast<int>(rng.below(5));
    const double eta = 2.1 + 1.4 * ability + 0.1 * (fulltime - 0.5);
    const int y = rng.next_double() < logistic(eta) ? 1 : 0;
    out << detail::csv_join(
               {detail::num(dec1), detail::num(dec3), detail::num(lsat),
                detail::num(ugpa), detail::num(lgpa1), detail::num(lgpa_cum),
                detail::num(fulltime), detail::num(income), detail::num(sex),
                detail::num(tier), detail::num(race), detail::num(y)})
        << "\n";
  }
}

inline void write_synthetic_thoracic_csv(const std::string& path, std::size_t n,
                                         std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  SplitRng rng(seed);
  out << "x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,x11,x12,x13,x14,x15,x16,y\n";
  auto tf = [&](double prob) { return rng.next_double() < prob ? "T" : "F"; };
  for (std::size_t i = 0; i < n; ++i) {
    const int dgn = 1 + static_cast<int>(rng.below(8));
    const double fvc = 3.3 + rng.normal(0.0, 0.8);
    const double fev1 = 2.5 + rng.normal(0.0, 0.7);
    const int zubrod = static_cast<int>(rng.below(3));
    const std::string pain = tf(0.08), hemo = tf(0.15), dysp = tf(0.12),
                      cough = tf(0.65), weak = tf(0.15);
    const int oc = 11 + static_cast<int>(rng.below(4));
    const std::string dm = tf(0.12), mi = tf(0.03), pad = tf(0.06),
                      smoker = tf(0.8), asthma = tf(0.03);
    const int age = 40 + static_cast<int>(rng.below(45));
    const double eta = -2.6 + 0.9 * (hemo == "T") + 0.7 * (dysp == "T") +
                       0.25 * (cough == "T") + 0.35 * zubrod +
                       0.3 * (oc - 11) + 0.02 * (age - 60);
    const std::string y = rng.next_double() < logistic(eta) ? "T" : "F";
    out << detail::csv_join(
               {"DGN" + std::to_string(dgn), detail::num(fvc), detail::num(fev1),
                "PRZ" + std::to_string(zubrod), pain, hemo, dysp, cough, weak,
                "OC" + std::to_string(oc), dm, mi, pad, smoker, asthma,
                detail::num(age), y})
        << "\n";
  }
}

inline void write_synthetic_fico_csv(const std::string& path, std::size_t n,
                                     std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  SplitRng rng(seed);
  std::string header;
  for (int i = 1; i <= 23; ++i) header += "x" + std::to_string(i) + ",";
  out << header << "y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double risk = rng.normal(0.0, 1.0);
    std::vector<std::string> row;
    // x1 consolidated risk marker, x2..x9 account-age/trade counters
    row.push_back(detail::num(detail::clamp_int(
        static_cast<int>(std::lround(70 - 8 * risk + rng.normal(0.0, 5.0))), 30,
        95)));
    for (int k = 0; k < 7; ++k) {
      double v = 90 + 45 * rng.normal(0.0, 1.0);
      if (rng.next_double() < 0.02) v = -7;  // sentinel: condition not met
      row.push_back(detail::num(std::round(v)));
    }
    row.push_back(detail::num(
        detail::clamp_int(static_cast<int>(20.0 - 10.0 * risk), -8, 80)));
    // x10 recent max delinquency code, x11 ever code; dirtier when risk is high
    int recent;
    const double u = rng.next_double();
    if (u < 0.55 - 0.2 * risk)
      recent = 7;  // never delinquent
    else if (u < 0.62)
      recent = 5 + static_cast<int>(rng.below(2));  // unknown
    else
      recent = static_cast<int>(rng.below(5));  // 0..4: derog..30 days
    if (rng.next_double() < 0.02) recent = -9;
    int ever;
    const double u2 = rng.next_double();
    if (u2 < 0.45 - 0.2 * risk)
      ever = 8;
    else if (u2 < 0.55)
      ever = 7;
    else
      ever = 2 + static_cast<int>(rng.below(5));  // 2..6: derog..30 days
    if (rng.next_double() < 0.02) ever = -8;
    row.push_back(detail::num(recent));
    row.push_back(detail::num(ever));
    for (int k = 12; k <= 23; ++k) {
      double v = 30 + 20 * rng.normal(0.0, 1.0) + 5 * risk;
      if (rng.next_double() < 0.02) v = -7;
      row.push_back(detail::num(std::round(v)));
    }
    const double eta = 0.0 + 0.9 * risk + rng.normal(0.0, 0.6);
    row.push_back(detail::num(eta > 0.0 ? 1 : 0));
    out << detail::csv_join(row) << "\n";
  }
}

inline void write_synthetic_csv(const std::string& recipe,
                                const std::string& path, std::size_t n,
                                std::uint64_t seed) {
  if (recipe == "compas") return write_synthetic_compas_csv(path, n, seed);
  if (recipe == "law") return write_synthetic_law_csv(path, n, seed);
  if (recipe == "thoracic") return write_synthetic_thoracic_csv(path, n, seed);
  if (recipe == "fico") return write_synthetic_fico_csv(path, n, seed);
  throw DataError("unknown recipe '" + recipe + "'");
}

// Small constrained regression problems for property and acceptance tests:
// every feature carries an increasing constraint; the generating signal per
// feature is increasing or (when anti is set) decreasing, so anti problems
// force the penalty machinery to flatten the fit.
struct SynthProblem {
  Dataset data;
  ModelSpec spec;
};

inline SynthProblem synth_constrained_regression(std::size_t n, int features,
                                                 bool anti, bool with_pair,
                                                 std::uint64_t seed) {
  SplitRng rng(seed);
  SynthProblem out;
  out.spec.task = Task::kRegression;
  out.data.columns.resize(features);
  for (int c = 0; c < features; ++c) {
    FeatureMeta meta;
    meta.name = "x" + std::to_string(c);
    meta.kind = FeatureKind::kNumeric;
    out.data.meta.push_back(meta);
    out.spec.monotone_features.push_back({c, Direction::kIncreasing});
  }
  if (with_pair && features >= 2) out.spec.pairwise_constraints.push_back({0, 1});
  const double sign = anti ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0.0;
    for (int c = 0; c < features; ++c) {
      const double x = rng.normal(0.0, 1.0);
      out.data.columns[c].push_back(x);
      const double scale = 1.0 / (1.0 + c);
      y += sign * scale * std::tanh(1.5 * x);
    }
    out.data.labels.push_back(y + rng.normal(0.0, 0.25));
  }
  out.data.refresh_ranges();
  out.spec.features = out.data.meta;
  return out;
}

}
