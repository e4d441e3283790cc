#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spanmeta/task_metrics.hpp"

namespace spanmeta::meta {

// Binary model properties: handcrafted features, CRF output layer, bi-LSTM
// layer, BERT encoder. The baseline has none.
struct ArchitectureFeatures {
  bool feat = false;
  bool crf = false;
  bool lstm = false;
  bool bert = false;

  friend auto operator<=>(const ArchitectureFeatures&,
                          const ArchitectureFeatures&) = default;
};

// "Baseline", "Feat+Baseline", "BERT+Feat+LSTM+CRF", ... -> flags.
ArchitectureFeatures parse_architecture_name(std::string_view name);
std::string architecture_name(const ArchitectureFeatures& arch);

// One meta-model training point.
struct Observation {
  std::string span_type;  // grouping key for leave-one-span-type-out CV
  ArchitectureFeatures arch;
  metrics::SpanTypeProfile profile;
  double f1 = 0.0;  // [0, 100]
};

// Throws ValidationError if the F1 score or profile is out of range.
void validate(const Observation& obs);

// CSV with header span_type,feat,crf,lstm,bert,freq,length,sd,bd,f1.
// With require_f1 == false an empty or missing f1 column yields NaN.
std::vector<Observation> read_observations(std::istream& in,
                                           bool require_f1 = true);
std::vector<Observation> read_observations(const std::filesystem::path& path,
                                           bool require_f1 = true);
void write_observations(std::span<const Observation> observations,
                        std::ostream& out);

}  // namespace spanmeta::meta
