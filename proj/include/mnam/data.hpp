#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mnam/errors.hpp"
#include "mnam/rng.hpp"
#include "mnam/types.hpp"

namespace mnam {

// Parsed CSV restricted to the columns a schema asks for.
struct RawTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t n_rows() const { return columns.empty() ? 0 : columns[0].size(); }

  bool has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
  }

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return columns[i];
    throw DataError("missing column '" + name + "'");
  }
};

using Schema = std::map<std::string, FeatureKind>;

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) != 0)) ++b;
  while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) != 0)) --e;
  if (e - b >= 2 && s[b] == '"' && s[e - 1] == '"') {
    ++b;
    --e;
  }
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i < line.size() && line[i] == '"') quoted = !quoted;
    if (i == line.size() || (line[i] == ',' && !quoted)) {
      out.push_back(trim(std::string_view(line).substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline bool parse_number(std::string_view token, double& out) {
  const char* b = token.data();
  const char* e = b + token.size();
  auto [ptr, ec] = std::from_chars(b, e, out, std::chars_format::general);
  return ec == std::errc{} && ptr == e && std::isfinite(out);
}

inline std::optional<double> parse_bool_token(std::string_view token) {
  std::string up;
  up.reserve(token.size());
  for (char c : token) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "T" || up == "TRUE" || up == "YES" || up == "1") return 1.0;
  if (up == "F" || up == "FALSE" || up == "NO" || up == "0") return 0.0;
  return std::nullopt;
}

// Letters-then-digits codes such as DGN3, PRZ1, OC14 map to their trailing
// integer, which preserves the order within each code family.
inline std::optional<double> parse_code_token(std::string_view token) {
  std::size_t i = 0;
  while (i < token.size() && std::isalpha(static_cast<unsigned char>(token[i])) != 0)
    ++i;
  if (i == 0 || i == token.size()) return std::nullopt;
  double v;
  if (!parse_number(token.substr(i), v)) return std::nullopt;
  return v;
}

inline double parse_cell(const std::string& token, FeatureKind kind,
                         const std::string& column, std::size_t row) {
  const auto fail = [&]() -> double {
    throw DataError("row " + std::to_string(row + 1) + ", column '" + column +
                    "': cannot parse '" + token + "'");
  };
  if (token.empty()) return fail();
  double v;
  switch (kind) {
    case FeatureKind::kNumeric:
      if (parse_number(token, v)) return v;
      return fail();
    case FeatureKind::kBinary: {
      if (auto b = parse_bool_token(token)) return *b;
      if (parse_number(token, v) && (v == 0.0 || v == 1.0)) return v;
      return fail();
    }
    case FeatureKind::kOrdinal: {
      if (parse_number(token, v)) return v;
      if (auto b = parse_bool_token(token)) return *b;
      if (auto c = parse_code_token(token)) return *c;
      return fail();
    }
  }
  return fail();
}

}  // namespace detail

// Reads the schema's columns from a comma-separated file with a header
// row. Boolean tokens are normalized to {0,1}; ordinal columns also accept
// letter-prefixed codes. Columns outside the schema are ignored.
inline RawTable load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_line(line);

  RawTable table;
  std::vector<std::size_t> source_index;
  for (const auto& [name, kind] : schema) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("'" + path + "': missing column '" + name + "'");
    table.names.push_back(name);
    source_index.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  table.columns.resize(table.names.size());

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_line(line);
    if (cells.size() != header.size())
      throw DataError("'" + path + "': row " + std::to_string(row + 1) +
                      " has " + std::to_string(cells.size()) + " fields, header has " +
                      std::to_string(header.size()));
    for (std::size_t c = 0; c < table.names.size(); ++c) {
      const auto kind = schema.at(table.names[c]);
      table.columns[c].push_back(
          detail::parse_cell(cells[source_index[c]], kind, table.names[c], row));
    }
    ++row;
  }
  if (row == 0) throw DataError("'" + path + "' has no data rows");
  return table;
}

// ---------------------------------------------------------------------------
// Deterministic train/test split. Standardization (for columns that want
// it) is fit on the training rows only and applied to both sides; refusing
// to split already-standardized data keeps the transform single-shot.

struct SplitResult {
  Dataset train;
  Dataset test;
};

inline SplitResult split(const Dataset& data, double ratio,
                         std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw SpecError("split ratio must lie strictly between 0 and 1");
  const std::size_t n = data.n_rows();
  if (n < 2) throw DataError("cannot split fewer than 2 rows");
  for (const auto& meta : data.meta)
    if (meta.transforms.wants_standardize && meta.transforms.standardized())
      throw DataError("column '" + meta.name +
                      "' is already standardized; refusing to double-apply");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  SplitRng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train == n)
    throw DataError("split ratio leaves an empty side");

  SplitResult out;
  auto take = [&](std::size_t begin, std::size_t end) {
    Dataset d;
    d.meta = data.meta;
    d.columns.resize(data.n_features());
    for (std::size_t c = 0; c < data.n_features(); ++c) {
      d.columns[c].reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i)
        d.columns[c].push_back(data.columns[c][perm[i]]);
    }
    d.labels.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i)
      d.labels.push_back(data.labels[perm[i]]);
    return d;
  };
  out.train = take(0, n_train);
  out.test = take(n_train, n);

  for (std::size_t c = 0; c < data.n_features(); ++c) {
    if (!data.meta[c].transforms.wants_standardize) continue;
    const auto& col = out.train.columns[c];
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(col.size());
    double sd = std::sqrt(var);
    if (sd < 1e-12) sd = 1.0;  // constant column; only center it
    for (auto* side : {&out.train, &out.test}) {
      for (auto& v : side->columns[c]) v = (v - mean) / sd;
      side->meta[c].transforms.standardize_mean = mean;
      side->meta[c].transforms.standardize_sd = sd;
    }
  }
  out.train.refresh_ranges();
  out.test.refresh_ranges();
  return out;
}

// Rewrites any decreasing constraint as an increasing one by negating the
// feature column, recording the flip. Every spec downstream of preparation
// is in this increasing-only normal form.
inline void normalize_directions(Dataset& data, ModelSpec& spec) {
  for (auto& c : spec.monotone_features) {
    if (c.direction != Direction::kDecreasing) continue;
    auto& col = data.columns[c.feature];
    for (auto& v : col) v = -v;
    data.meta[c.feature].transforms.negated =
        !data.meta[c.feature].transforms.negated;
    spec.features[c.feature].transforms.negated =
        data.meta[c.feature].transforms.negated;
    c.direction = Direction::kIncreasing;
  }
  data.refresh_ranges();
  spec.features = data.meta;
}

// ---------------------------------------------------------------------------
// Dataset recipes. Each takes the canonical raw table (columns x1..xk plus
// y, as documented in the README), applies the documented preprocessing, and
// returns the prepared data with its constraint spec. Standardization is
// deferred to split().

struct Prepared {
  Dataset data;
  ModelSpec spec;
};

namespace detail {

struct ColumnPlan {
  std::string source;
  FeatureKind kind = FeatureKind::kNumeric;
  bool standardize = true;
};

inline Prepared assemble(const RawTable& raw, const std::vector<ColumnPlan>& plan,
                         Task task) {
  Prepared out;
  out.spec.task = task;
  for (const auto& cp : plan) {
    FeatureMeta meta;
    meta.name = cp.source;
    meta.kind = cp.kind;
    meta.transforms.wants_standardize = cp.standardize;
    out.data.columns.push_back(raw.column(cp.source));
    out.data.meta.push_back(meta);
  }
  out.data.labels = raw.column("y");
  for (double y : out.data.labels)
    if (task == Task::kClassification && y != 0.0 && y != 1.0)
      throw DataError("label column 'y' must be 0/1");
  out.data.refresh_ranges();
  out.spec.features = out.data.meta;
  return out;
}

inline void finish(Prepared& p) {
  p.data.refresh_ranges();
  p.spec.features = p.data.meta;
  p.spec.validate();
  p.data.validate();
}

inline void cap_column(Dataset& d, std::size_t c, double cap) {
  for (auto& v : d.columns[c])
    if (v > cap) v = cap;
  d.meta[c].transforms.cap = cap;
}

// Median of the non-sentinel values; sentinel cells are replaced and
// counted. Returns the number of imputations.
inline std::size_t impute_sentinels(Dataset& d, std::size_t c,
                                    const std::vector<double>& sentinels) {
  auto is_sentinel = [&](double v) {
    return std::find(sentinels.begin(), sentinels.end(), v) != sentinels.end();
  };
  std::vector<double> clean;
  for (double v : d.columns[c])
    if (!is_sentinel(v)) clean.push_back(v);
  if (clean.empty())
    throw DataError("column '" + d.meta[c].name + "' holds only sentinel codes");
  std::sort(clean.begin(), clean.end());
  const std::size_t mid = clean.size() / 2;
  const double median = clean.size() % 2 == 1
                            ? clean[mid]
                            : 0.5 * (clean[mid - 1] + clean[mid]);
  std::size_t imputed = 0;
  for (auto& v : d.columns[c]) {
    if (is_sentinel(v)) {
      v = median;
      ++imputed;
    }
  }
  d.meta[c].transforms.imputed_count = imputed;
  return imputed;
}

}  // namespace detail

// --- COMPAS (recidivism) ----------------------------------------------------
// Drops race (x1), sex (x2), and the COMPAS score (x9); truncates juvenile
// charge counts at three; requires increasing monotonicity on juvenile
// felonies, juvenile misdemeanors, prior charges, and the charge-degree
// indicator (felony = 1), plus severity dominance of felonies over
// misdemeanors.
inline Schema compas_schema() {
  return {{"x1", FeatureKind::kNumeric},  {"x2", FeatureKind::kBinary},
          {"x3", FeatureKind::kNumeric},  {"x4", FeatureKind::kOrdinal},
          {"x5", FeatureKind::kOrdinal},  {"x6", FeatureKind::kOrdinal},
          {"x7", FeatureKind::kNumeric},  {"x8", FeatureKind::kBinary},
          {"x9", FeatureKind::kOrdinal},  {"y", FeatureKind::kBinary}};
}

inline Prepared prepare_compas(const RawTable& raw) {
  using detail::ColumnPlan;
  const std::vector<ColumnPlan> plan = {
      {"x3", FeatureKind::kNumeric, true},   // age
      {"x4", FeatureKind::kOrdinal, true},   // juvenile felony count
      {"x5", FeatureKind::kOrdinal, true},   // juvenile misdemeanor count
      {"x6", FeatureKind::kOrdinal, true},   // prior charges
      {"x7", FeatureKind::kNumeric, true},   // charge identifier
      {"x8", FeatureKind::kBinary, false},   // degree: misdemeanor 0, felony 1
  };
  Prepared p = detail::assemble(raw, plan, Task::kClassification);
  for (std::size_t c : {std::size_t{1}, std::size_t{2}})
    detail::cap_column(p.data, c, 3.0);
  for (double v : p.data.columns[5])
    if (v != 0.0 && v != 1.0)
      throw DataError("charge-degree indicator x8 must be 0/1");
  p.spec.monotone_features = {{1, Direction::kIncreasing},
                              {2, Direction::kIncreasing},
                              {3, Direction::kIncreasing},
                              {5, Direction::kIncreasing}};
  p.spec.pairwise_constraints = {{1, 2}};  // felony counts over misdemeanors
  detail::finish(p);
  return p;
}

// --- Law school (bar passage) ------------------------------------------------
// Drops race (x11) and sex (x9). Both law school GPA columns are brought to
// a common scale by train-split standardization. Grade features x1..x6 are
// individually increasing; later information dominates earlier: year-3
// decile over year-1 decile, cumulative LGPA over first-year LGPA.
inline Schema law_schema() {
  Schema s;
  for (int i = 1; i <= 11; ++i)
    s["x" + std::to_string(i)] = FeatureKind::kNumeric;
  s["x1"] = FeatureKind::kOrdinal;
  s["x2"] = FeatureKind::kOrdinal;
  s["x7"] = FeatureKind::kBinary;
  s["x8"] = FeatureKind::kOrdinal;
  s["x10"] = FeatureKind::kOrdinal;
  s["y"] = FeatureKind::kBinary;
  return s;
}

inline Prepared prepare_law(const RawTable& raw) {
  using detail::ColumnPlan;
  const std::vector<ColumnPlan> plan = {
      {"x1", FeatureKind::kOrdinal, true},   // decile, year 1
      {"x2", FeatureKind::kOrdinal, true},   // decile, year 3
      {"x3", FeatureKind::kNumeric, true},   // LSAT
      {"x4", FeatureKind::kNumeric, true},   // undergraduate GPA
      {"x5", FeatureKind::kNumeric, true},   // LGPA, first year
      {"x6", FeatureKind::kNumeric, true},   // LGPA, cumulative
      {"x7", FeatureKind::kBinary, false},   // full-time
      {"x8", FeatureKind::kOrdinal, true},   // family income bracket
      {"x10", FeatureKind::kOrdinal, true},  // school tier
  };
  Prepared p = detail::assemble(raw, plan, Task::kClassification);
  p.spec.monotone_features = {{0, Direction::kIncreasing},
                              {1, Direction::kIncreasing},
                              {2, Direction::kIncreasing},
                              {3, Direction::kIncreasing},
                              {4, Direction::kIncreasing},
                              {5, Direction::kIncreasing}};
  p.spec.pairwise_constraints = {{1, 0},   // year-3 decile over year-1 decile
                                 {5, 4}};  // cumulative LGPA over first-year
  detail::finish(p);
  return p;
}

// --- Thoracic surgery (one-year mortality) ------------------------------------
// Keeps all sixteen features; T/F symptoms arrive as {0,1} and the ordinal
// code families (DGN diagnosis, PRZ Zubrod score, OC tumor size) as their
// order-preserving integers. Mortality must increase with hemoptysis (x6)
// and dyspnea (x7), both dominating plain cough (x8).
inline Schema thoracic_schema() {
  Schema s;
  s["x1"] = FeatureKind::kOrdinal;   // diagnosis code
  s["x2"] = FeatureKind::kNumeric;   // forced vital capacity
  s["x3"] = FeatureKind::kNumeric;   // FEV1
  s["x4"] = FeatureKind::kOrdinal;   // Zubrod performance status
  for (int i = 5; i <= 9; ++i) s["x" + std::to_string(i)] = FeatureKind::kBinary;
  s["x10"] = FeatureKind::kOrdinal;  // tumor size, OC11..OC14
  for (int i = 11; i <= 15; ++i) s["x" + std::to_string(i)] = FeatureKind::kBinary;
  s["x16"] = FeatureKind::kNumeric;  // age
  s["y"] = FeatureKind::kBinary;
  return s;
}

inline Prepared prepare_thoracic(const RawTable& raw) {
  using detail::ColumnPlan;
  std::vector<ColumnPlan> plan;
  const Schema schema = thoracic_schema();
  for (int i = 1; i <= 16; ++i) {
    const std::string name = "x" + std::to_string(i);
    const FeatureKind kind = schema.at(name);
    plan.push_back({name, kind, kind != FeatureKind::kBinary});
  }
  Prepared p = detail::assemble(raw, plan, Task::kClassification);
  for (std::size_t c : {std::size_t{5}, std::size_t{6}, std::size_t{7}})
    for (double v : p.data.columns[c])
      if (v != 0.0 && v != 1.0)
        throw DataError("symptom column '" + p.data.meta[c].name +
                        "' must be 0/1");
  p.spec.monotone_features = {{5, Direction::kIncreasing},   // hemoptysis
                              {6, Direction::kIncreasing},   // dyspnea
                              {7, Direction::kIncreasing}};  // cough
  p.spec.pairwise_constraints = {{5, 7},   // hemoptysis over cough
                                 {6, 7}};  // dyspnea over cough
  detail::finish(p);
  return p;
}

// --- FICO HELOC (default risk) -------------------------------------------------
// The delinquency category codes of x10 (last 12 months) and x11 (ever) are
// mapped onto one ordered risk scale: -4..0 spans 30/60/90/120-day
// delinquency up to derogatory comments, with unknown and never-delinquent
// states below. Dataset sentinel codes (-7, -8, -9) are median-imputed and
// counted in the metadata. Default risk increases in both delinquency
// features and the recent one dominates the historical one.
inline Schema fico_schema() {
  Schema s;
  for (int i = 1; i <= 23; ++i)
    s["x" + std::to_string(i)] = FeatureKind::kNumeric;
  s["x10"] = FeatureKind::kOrdinal;
  s["x11"] = FeatureKind::kOrdinal;
  s["y"] = FeatureKind::kBinary;
  return s;
}

namespace detail {

// MaxDelq2PublicRecLast12M: 0 derogatory, 1..4 = 120/90/60/30 days,
// 5-6 unknown, 7 never delinquent; 8, 9 carry no delinquency information.
inline double map_fico_recent_delq(double code) {
  if (code >= 0.0 && code <= 4.0) return -code;
  if (code == 5.0 || code == 6.0) return -5.0;
  if (code == 7.0) return -6.0;
  throw DataError("unknown recent-delinquency code " + std::to_string(code));
}

// MaxDelqEver: 2 derogatory, 3..6 = 120/90/60/30 days, 7 unknown,
// 8 never delinquent; 1 carries no delinquency information.
inline double map_fico_ever_delq(double code) {
  if (code >= 2.0 && code <= 6.0) return 2.0 - code;
  if (code == 7.0) return -5.0;
  if (code == 8.0) return -6.0;
  throw DataError("unknown ever-delinquency code " + std::to_string(code));
}

}  // namespace detail

inline Prepared prepare_fico(const RawTable& raw) {
  using detail::ColumnPlan;
  std::vector<ColumnPlan> plan;
  const Schema schema = fico_schema();
  for (int i = 1; i <= 23; ++i) {
    const std::string name = "x" + std::to_string(i);
    plan.push_back({name, schema.at(name), true});
  }
  Prepared p = detail::assemble(raw, plan, Task::kClassification);
  const std::vector<double> sentinels = {-7.0, -8.0, -9.0};
  for (std::size_t c = 0; c < p.data.n_features(); ++c)
    detail::impute_sentinels(p.data, c, sentinels);
  // Imputation can leave .5 medians on the categorical code columns; snap
  // back to valid codes before mapping.
  for (std::size_t c : {std::size_t{9}, std::size_t{10}}) {
    for (auto& v : p.data.columns[c]) v = std::round(v);
  }
  // Codes 8/9 (recent) and 1 (ever) say nothing about delinquency; treat
  // them like sentinels.
  {
    auto& recent = p.data.columns[9];
    for (auto& v : recent)
      if (v == 8.0 || v == 9.0) v = -999.0;
    const std::size_t before = p.data.meta[9].transforms.imputed_count;
    detail::impute_sentinels(p.data, 9, {-999.0});
    p.data.meta[9].transforms.imputed_count += before;
    for (auto& v : recent) v = detail::map_fico_recent_delq(std::round(v));
  }
  {
    auto& ever = p.data.columns[10];
    for (auto& v : ever)
      if (v == 1.0) v = -999.0;
    const std::size_t before = p.data.meta[10].transforms.imputed_count;
    detail::impute_sentinels(p.data, 10, {-999.0});
    p.data.meta[10].transforms.imputed_count += before;
    for (auto& v : ever) v = detail::map_fico_ever_delq(std::round(v));
  }
  p.spec.monotone_features = {{9, Direction::kIncreasing},
                              {10, Direction::kIncreasing}};
  p.spec.pairwise_constraints = {{9, 10}};  // recent delinquency over ever
  detail::finish(p);
  return p;
}

// Recipe registry for the CLI.
inline Prepared prepare_recipe(const std::string& recipe, const RawTable& raw) {
  if (recipe == "compas") return prepare_compas(raw);
  if (recipe == "law") return prepare_law(raw);
  if (recipe == "thoracic") return prepare_thoracic(raw);
  if (recipe == "fico") return prepare_fico(raw);
  throw DataError("unknown recipe '" + recipe + "'");
}

inline Schema recipe_schema(const std::string& recipe) {
  if (recipe == "compas") return compas_schema();
  if (recipe == "law") return law_schema();
  if (recipe == "thoracic") return thoracic_schema();
  if (recipe == "fico") return fico_schema();
  throw DataError("unknown recipe '" + recipe + "'");
}

}
