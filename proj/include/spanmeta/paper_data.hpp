#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spanmeta/meta/design.hpp"
#include "spanmeta/meta/observation.hpp"
#include "spanmeta/task_metrics.hpp"

// Published reference tables compiled into the library from data/*.csv.
namespace spanmeta::paper {

enum class Table {
  span_type_profiles,  // 36 per-type profiles
  architecture_f1,     // 36 x 12 trial-mean F1 scores
  dataset_profiles,    // frequency-weighted per-dataset profiles
  prediction_errors,   // LOSO MAE / r2 per predictor set
  coefficients,        // refit-on-all-data coefficients
};
inline constexpr std::array<Table, 5> kAllTables{
    Table::span_type_profiles, Table::architecture_f1, Table::dataset_profiles,
    Table::prediction_errors, Table::coefficients};

// CLI names: profiles, f1, datasets, errors, coefficients.
std::string_view table_name(Table t);
Table parse_table(std::string_view name);

std::string_view embedded_csv(Table t);
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t expected_checksum(Table t);
// Throws ValidationError when the content hash differs from `expected`.
void verify_checksum(Table t, std::string_view content, std::uint64_t expected);

struct SpanTypeEntry {
  std::string dataset;
  std::string name;
  metrics::SpanTypeProfile profile;  // profile.type_id == "dataset:name"
};

struct NamedArchitecture {
  std::string name;
  meta::ArchitectureFeatures features;
};

struct EmbeddedTables {
  std::vector<SpanTypeEntry> span_types;
  std::vector<NamedArchitecture> architectures;
  std::vector<std::vector<double>> f1;  // [span type][architecture]

  const SpanTypeEntry& span_type(std::string_view id) const;
  double f1_at(std::string_view span_type_id,
               std::string_view architecture) const;
  // Datasets in order of first appearance.
  std::vector<std::string> datasets() const;
  std::vector<metrics::SpanTypeProfile> profiles_of(
      std::string_view dataset) const;
};

// Parses and validates the two appendix tables; the F1 table must list the
// same span types in the same order.
EmbeddedTables parse_tables(std::string_view profiles_csv,
                            std::string_view f1_csv);
// Verifies checksums, then parses.
EmbeddedTables load_embedded();

// Cartesian product of span types and architectures (span-type major).
std::vector<meta::Observation> to_observations(const EmbeddedTables& tables);

struct DatasetReference {
  std::string task;
  std::string dataset;
  metrics::DatasetProfile profile;
};
std::vector<DatasetReference> dataset_reference();

struct PredictionErrorReference {
  meta::PredictorSet predictors;
  double mae;
  std::optional<double> r2;
};
std::vector<PredictionErrorReference> prediction_error_reference();

struct CoefficientReference {
  std::string term;  // design column name
  double value;
  bool significant;
};
std::vector<CoefficientReference> coefficient_reference();

}  // namespace spanmeta::paper
