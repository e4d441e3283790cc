#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "spanmeta/meta/observation.hpp"

namespace spanmeta::meta {

enum class Predictor {
  feat,
  crf,
  lstm,
  bert,
  log_frequency,
  log_length,
  span_distinctiveness,
  boundary_distinctiveness,
};
inline constexpr std::size_t kMainCount = 8;
inline constexpr std::array<Predictor, kMainCount> kMainPredictors{
    Predictor::feat,          Predictor::crf,
    Predictor::lstm,          Predictor::bert,
    Predictor::log_frequency, Predictor::log_length,
    Predictor::span_distinctiveness, Predictor::boundary_distinctiveness};

// "feat", "crf", "lstm", "bert", "log_freq", "log_length", "span_distinct",
// "boundary_distinct".
std::string_view predictor_name(Predictor p);
bool is_model_predictor(Predictor p);

enum class PredictorSet { full, no_interactions, arch_only, task_only, empty };
std::string_view to_string(PredictorSet set);
PredictorSet parse_predictor_set(std::string_view name);
// Ablation order: full, no_interactions, arch_only, task_only, empty.
inline constexpr std::array<PredictorSet, 5> kAllPredictorSets{
    PredictorSet::full, PredictorSet::no_interactions, PredictorSet::arch_only,
    PredictorSet::task_only, PredictorSet::empty};

// How an interaction column is formed before its own z-scoring.
enum class InteractionScale {
  raw_product,           // product of the unstandardized mains
  standardized_product,  // product of the z-scored mains
};
std::string_view to_string(InteractionScale scale);
InteractionScale parse_interaction_scale(std::string_view name);

struct DesignOptions {
  PredictorSet predictors = PredictorSet::full;
  InteractionScale interactions = InteractionScale::raw_product;
  // Base of the log applied to frequency and span length.
  double log_base = 2.718281828459045;
};

struct DesignColumn {
  std::string name;
  std::vector<Predictor> factors;  // empty for the intercept
  double mean = 0.0;
  double sd = 1.0;
};

// Column layout for PredictorSet::full (31 columns):
//   intercept; the 8 mains in kMainPredictors order; the 16 model x task
//   interactions (model-major, e.g. "crf:log_freq"); the 6 model x model
//   interactions feat:crf, feat:lstm, feat:bert, crf:lstm, crf:bert,
//   lstm:bert.
// Smaller sets keep the same relative order.
class DesignSpec {
 public:
  // Learns standardization parameters from `data`. Throws ValidationError
  // naming the column if any predictor has zero variance.
  static DesignSpec fit(std::span<const Observation> data,
                        const DesignOptions& options = {});

  const DesignOptions& options() const { return options_; }
  const std::vector<DesignColumn>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  std::vector<std::string> names() const;

  double raw_main(Predictor p, const ArchitectureFeatures& arch,
                  const metrics::SpanTypeProfile& profile) const;
  Eigen::RowVectorXd row(const ArchitectureFeatures& arch,
                         const metrics::SpanTypeProfile& profile) const;
  Eigen::MatrixXd matrix(std::span<const Observation> data) const;

  nlohmann::json to_json() const;
  static DesignSpec from_json(const nlohmann::json& j);

 private:
  double unscaled(const DesignColumn& column, const ArchitectureFeatures& arch,
                  const metrics::SpanTypeProfile& profile) const;

  DesignOptions options_;
  std::array<double, kMainCount> main_mean_{};
  std::array<double, kMainCount> main_sd_{};
  std::vector<DesignColumn> columns_;
};

struct DesignMatrix {
  DesignSpec spec;
  Eigen::MatrixXd x;
};

DesignMatrix build_design_matrix(std::span<const Observation> data,
                                 const DesignOptions& options = {});

}  // namespace spanmeta::meta
