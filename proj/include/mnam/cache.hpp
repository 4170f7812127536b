#pragma once

#include <string>
#include <vector>

#include "mnam/data.hpp"
#include "mnam/io.hpp"
#include "mnam/manifest.hpp"

namespace mnam {

// Prepared-dataset cache: the transformed table as CSV plus a JSON sidecar
// holding the constraint spec, the per-column transforms, and a checksum of
// the CSV bytes. Loading returns a Prepared value whose transform markers
// are intact, so cached data cannot be run through a recipe again.

inline void write_prepared_cache(const Prepared& prepared,
                                 const std::string& csv_path,
                                 const std::string& sidecar_path) {
  std::string csv;
  for (std::size_t c = 0; c < prepared.data.n_features(); ++c) {
    if (c) csv += ',';
    csv += prepared.data.meta[c].name;
  }
  csv += ",y\n";
  for (std::size_t r = 0; r < prepared.data.n_rows(); ++r) {
    for (std::size_t c = 0; c < prepared.data.n_features(); ++c) {
      if (c) csv += ',';
      csv += format_double(prepared.data.columns[c][r]);
    }
    csv += ',' + format_double(prepared.data.labels[r]) + '\n';
  }
  write_text_file(csv_path, csv);

  json side;
  side["format"] = "mnam-prepared";
  side["version"] = kVersion;
  side["csv"] = csv_path;
  side["csv_sha256"] = sha256_file(csv_path);
  side["rows"] = prepared.data.n_rows();
  side["spec"] = spec_to_json(prepared.spec);
  write_text_file(sidecar_path, side.dump(2) + "\n");
}

inline Prepared load_prepared_cache(const std::string& csv_path,
                                    const std::string& sidecar_path) {
  json side;
  try {
    side = json::parse(read_text_file(sidecar_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + sidecar_path + "': " + e.what());
  }
  if (side.value("format", "") != "mnam-prepared")
    throw DataError("'" + sidecar_path + "' is not a prepared-dataset sidecar");
  const auto expect = side.at("csv_sha256").get<std::string>();
  const auto actual = sha256_file(csv_path);
  if (expect != actual)
    throw DataError("'" + csv_path + "' does not match its sidecar checksum (" +
                    actual + " != " + expect + ")");

  Prepared out;
  out.spec = spec_from_json(side.at("spec"));
  Schema schema;
  for (const auto& f : out.spec.features) schema[f.name] = FeatureKind::kNumeric;
  schema["y"] = out.spec.task == Task::kClassification ? FeatureKind::kBinary
                                                       : FeatureKind::kNumeric;
  const auto table = load_csv(csv_path, schema);
  out.data.meta = out.spec.features;
  out.data.labels = table.column("y");
  out.data.columns.reserve(out.spec.features.size());
  for (const auto& f : out.spec.features)
    out.data.columns.push_back(table.column(f.name));
  if (out.data.n_rows() != side.at("rows").get<std::size_t>())
    throw DataError("'" + csv_path + "' row count changed since caching");
  out.data.validate();
  return out;
}

}
