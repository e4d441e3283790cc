#include "spanmeta/paper_data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "spanmeta/error.hpp"

namespace spanmeta::paper {
namespace detail {
extern const std::string_view kSpanTypeProfilesCsv;
extern const std::string_view kArchitectureF1Csv;
extern const std::string_view kDatasetProfilesCsv;
extern const std::string_view kPredictionErrorsCsv;
extern const std::string_view kCoefficientsCsv;
}  // namespace detail

namespace {

// FNV-1a-64 of the committed fixtures; update together with data/*.csv.
constexpr std::uint64_t kChecksums[] = {
    0xea5f66b50fe6be22ULL,  // span_type_profiles
    0x473eec74a28c4ccaULL,  // architecture_f1
    0xd5f77fdd3bd267f7ULL,  // dataset_profiles
    0x6b8fd1ff80193a8eULL,  // prediction_errors
    0x70e4bc92857c9054ULL,  // coefficients
};

using Row = std::vector<std::string>;

struct Csv {
  Row header;
  std::vector<Row> rows;
};

Csv parse_csv(std::string_view text, std::string_view what) {
  Csv csv;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    Row row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (first) {
      csv.header = std::move(row);
      first = false;
    } else {
      if (row.size() != csv.header.size()) {
        throw ValidationError(std::string(what) + ": row " +
                              std::to_string(csv.rows.size() + 1) + " has " +
                              std::to_string(row.size()) + " fields, expected " +
                              std::to_string(csv.header.size()));
      }
      csv.rows.push_back(std::move(row));
    }
  }
  if (first) throw ValidationError(std::string(what) + ": empty table");
  return csv;
}

double to_double(const std::string& s, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + ": invalid number '" + s + "'");
  }
  return v;
}

void expect_header(const Csv& csv, const Row& expected, std::string_view what) {
  if (csv.header != expected) {
    throw ValidationError(std::string(what) + ": unexpected header");
  }
}

}  // namespace

std::string_view table_name(Table t) {
  switch (t) {
    case Table::span_type_profiles: return "profiles";
    case Table::architecture_f1: return "f1";
    case Table::dataset_profiles: return "datasets";
    case Table::prediction_errors: return "errors";
    case Table::coefficients: return "coefficients";
  }
  return "?";
}

Table parse_table(std::string_view name) {
  for (Table t : kAllTables) {
    if (table_name(t) == name) return t;
  }
  throw ValidationError("unknown table '" + std::string(name) +
                        "' (expected profiles, f1, datasets, errors or "
                        "coefficients)");
}

std::string_view embedded_csv(Table t) {
  switch (t) {
    case Table::span_type_profiles: return detail::kSpanTypeProfilesCsv;
    case Table::architecture_f1: return detail::kArchitectureF1Csv;
    case Table::dataset_profiles: return detail::kDatasetProfilesCsv;
    case Table::prediction_errors: return detail::kPredictionErrorsCsv;
    case Table::coefficients: return detail::kCoefficientsCsv;
  }
  return {};
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t expected_checksum(Table t) {
  return kChecksums[static_cast<std::size_t>(t)];
}

void verify_checksum(Table t, std::string_view content,
                     std::uint64_t expected) {
  const std::uint64_t actual = fnv1a64(content);
  if (actual != expected) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%016llx, expected %016llx",
                  static_cast<unsigned long long>(actual),
                  static_cast<unsigned long long>(expected));
    throw ValidationError("checksum mismatch for table '" +
                          std::string(table_name(t)) + "': " + buf);
  }
}

const SpanTypeEntry& EmbeddedTables::span_type(std::string_view id) const {
  for (const auto& e : span_types) {
    if (e.profile.type_id == id) return e;
  }
  throw ValidationError("unknown span type '" + std::string(id) + "'");
}

double EmbeddedTables::f1_at(std::string_view span_type_id,
                             std::string_view architecture) const {
  std::size_t row = span_types.size();
  for (std::size_t i = 0; i < span_types.size(); ++i) {
    if (span_types[i].profile.type_id == span_type_id) row = i;
  }
  if (row == span_types.size()) {
    throw ValidationError("unknown span type '" + std::string(span_type_id) +
                          "'");
  }
  for (std::size_t a = 0; a < architectures.size(); ++a) {
    if (architectures[a].name == architecture) return f1[row][a];
  }
  throw ValidationError("unknown architecture '" + std::string(architecture) +
                        "'");
}

std::vector<std::string> EmbeddedTables::datasets() const {
  std::vector<std::string> out;
  for (const auto& e : span_types) {
    if (out.empty() || out.back() != e.dataset) out.push_back(e.dataset);
  }
  return out;
}

std::vector<metrics::SpanTypeProfile> EmbeddedTables::profiles_of(
    std::string_view dataset) const {
  std::vector<metrics::SpanTypeProfile> out;
  for (const auto& e : span_types) {
    if (e.dataset == dataset) out.push_back(e.profile);
  }
  if (out.empty()) {
    throw ValidationError("unknown dataset '" + std::string(dataset) + "'");
  }
  return out;
}

EmbeddedTables parse_tables(std::string_view profiles_csv,
                            std::string_view f1_csv) {
  EmbeddedTables tables;
  const Csv profiles = parse_csv(profiles_csv, "profiles");
  expect_header(profiles,
                {"dataset", "span_type", "frequency", "span_length",
                 "span_distinctiveness", "boundary_distinctiveness"},
                "profiles");
  std::set<std::string> ids;
  for (const auto& r : profiles.rows) {
    SpanTypeEntry e;
    e.dataset = r[0];
    e.name = r[1];
    e.profile.type_id = r[0] + ":" + r[1];
    const double freq = to_double(r[2], "profiles");
    if (freq < 1.0 || freq != std::floor(freq)) {
      throw ValidationError("profiles: frequency of " + e.profile.type_id +
                            " is not a positive integer");
    }
    e.profile.frequency = static_cast<std::size_t>(freq);
    e.profile.span_length = to_double(r[3], "profiles");
    e.profile.span_distinctiveness = to_double(r[4], "profiles");
    e.profile.boundary_distinctiveness = to_double(r[5], "profiles");
    if (e.profile.span_length < 1.0 || e.profile.span_distinctiveness < 0.0 ||
        *e.profile.boundary_distinctiveness < 0.0) {
      throw ValidationError("profiles: out-of-range value for " +
                            e.profile.type_id);
    }
    if (!ids.insert(e.profile.type_id).second) {
      throw ValidationError("profiles: duplicate span type " +
                            e.profile.type_id);
    }
    tables.span_types.push_back(std::move(e));
  }

  const Csv f1 = parse_csv(f1_csv, "f1");
  if (f1.header.size() < 3 || f1.header[0] != "dataset" ||
      f1.header[1] != "span_type") {
    throw ValidationError("f1: unexpected header");
  }
  std::set<meta::ArchitectureFeatures> distinct;
  for (std::size_t c = 2; c < f1.header.size(); ++c) {
    NamedArchitecture a{f1.header[c],
                        meta::parse_architecture_name(f1.header[c])};
    if (!distinct.insert(a.features).second) {
      throw ValidationError("f1: architecture " + a.name +
                            " duplicates another column's features");
    }
    tables.architectures.push_back(std::move(a));
  }
  if (f1.rows.size() != tables.span_types.size()) {
    throw ValidationError("f1: expected " +
                          std::to_string(tables.span_types.size()) +
                          " rows, got " + std::to_string(f1.rows.size()));
  }
  for (std::size_t i = 0; i < f1.rows.size(); ++i) {
    const auto& r = f1.rows[i];
    const auto& e = tables.span_types[i];
    if (r[0] != e.dataset || r[1] != e.name) {
      throw ValidationError("f1: row " + std::to_string(i + 1) + " is " +
                            r[0] + ":" + r[1] + ", expected " +
                            e.profile.type_id);
    }
    std::vector<double> scores;
    for (std::size_t c = 2; c < r.size(); ++c) {
      const double v = to_double(r[c], "f1");
      if (v < 0.0 || v > 100.0) {
        throw ValidationError("f1: score outside [0, 100] for " +
                              e.profile.type_id);
      }
      scores.push_back(v);
    }
    tables.f1.push_back(std::move(scores));
  }
  return tables;
}

EmbeddedTables load_embedded() {
  for (Table t : kAllTables) {
    verify_checksum(t, embedded_csv(t), expected_checksum(t));
  }
  return parse_tables(embedded_csv(Table::span_type_profiles),
                      embedded_csv(Table::architecture_f1));
}

std::vector<meta::Observation> to_observations(const EmbeddedTables& tables) {
  std::vector<meta::Observation> out;
  for (std::size_t i = 0; i < tables.span_types.size(); ++i) {
    for (std::size_t a = 0; a < tables.architectures.size(); ++a) {
      meta::Observation obs;
      obs.span_type = tables.span_types[i].profile.type_id;
      obs.arch = tables.architectures[a].features;
      obs.profile = tables.span_types[i].profile;
      obs.f1 = tables.f1[i][a];
      out.push_back(std::move(obs));
    }
  }
  return out;
}

std::vector<DatasetReference> dataset_reference() {
  const Csv csv = parse_csv(embedded_csv(Table::dataset_profiles), "datasets");
  expect_header(csv,
                {"task", "dataset", "frequency", "span_length",
                 "span_distinctiveness", "boundary_distinctiveness"},
                "datasets");
  std::vector<DatasetReference> out;
  for (const auto& r : csv.rows) {
    out.push_back({r[0], r[1],
                   {to_double(r[2], "datasets"), to_double(r[3], "datasets"),
                    to_double(r[4], "datasets"), to_double(r[5], "datasets")}});
  }
  return out;
}

std::vector<PredictionErrorReference> prediction_error_reference() {
  const Csv csv = parse_csv(embedded_csv(Table::prediction_errors), "errors");
  expect_header(csv, {"predictors", "mae", "r2"}, "errors");
  std::vector<PredictionErrorReference> out;
  for (const auto& r : csv.rows) {
    PredictionErrorReference ref{meta::parse_predictor_set(r[0]),
                                 to_double(r[1], "errors"), std::nullopt};
    if (!r[2].empty()) ref.r2 = to_double(r[2], "errors");
    out.push_back(ref);
  }
  return out;
}

std::vector<CoefficientReference> coefficient_reference() {
  const Csv csv = parse_csv(embedded_csv(Table::coefficients), "coefficients");
  expect_header(csv, {"term", "coefficient", "significant"}, "coefficients");
  std::vector<CoefficientReference> out;
  for (const auto& r : csv.rows) {
    out.push_back({r[0], to_double(r[1], "coefficients"), r[2] == "1"});
  }
  return out;
}

}  // namespace spanmeta::paper
