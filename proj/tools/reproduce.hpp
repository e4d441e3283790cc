#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spanmeta/meta/cross_validation.hpp"
#include "spanmeta/paper_data.hpp"

namespace spanmeta::cli {

struct ReproduceOptions {
  double alpha = meta::kDefaultAlpha;
  bool alpha_search = true;
  meta::InteractionScale interactions = meta::InteractionScale::raw_product;
};

struct Table1Check {
  std::string task;
  std::string dataset;
  metrics::DatasetProfile reference;
  metrics::DatasetProfile computed;
  bool within_tolerance = false;  // frequency +-1, other columns +-0.01
};

struct CorrelationCheck {
  double r = 0.0;  // ln(frequency) vs span distinctiveness over span types
  double reference = -0.46;
  double tolerance = 0.03;
  bool pass = false;
};

struct AlphaCheck {
  std::vector<std::pair<double, double>> curve;
  double selected = 0.0;
  double mae_at_alpha = 0.0;
  double gap_to_minimum = 0.0;
  bool within_one_point = false;
};

struct Table3Row {
  meta::PredictorSet predictors;
  double mae = 0.0;
  std::optional<double> r2;
  double reference_mae = 0.0;
  std::optional<double> reference_r2;
};

struct Table4Row {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool significant = false;
  std::optional<double> reference;
  bool reference_significant = false;
};

struct SignCheck {
  std::string term;
  int expected_sign = 0;
  double estimate = 0.0;
  bool holds = false;
};

struct ReproductionReport {
  double alpha = meta::kDefaultAlpha;
  meta::InteractionScale interactions = meta::InteractionScale::raw_product;
  std::vector<Table1Check> table1;
  CorrelationCheck correlation;
  std::optional<AlphaCheck> alpha_search;
  std::vector<Table3Row> table3;
  bool table3_ordering = false;  // MAE strictly increasing down the table
  std::vector<Table4Row> table4;
  std::size_t signs_agree = 0;  // over every referenced coefficient
  std::size_t signs_total = 0;
  std::size_t significance_agree = 0;
  std::vector<SignCheck> key_signs;
  bool bert_largest_model_effect = false;
  // Full-model LOSO predictions behind the scatter plot.
  std::vector<std::string> point_labels;
  std::vector<double> actual;
  std::vector<double> predicted;
};

ReproductionReport reproduce(const ReproduceOptions& options = {});
nlohmann::json to_json(const ReproductionReport& report);
std::string to_text(const ReproductionReport& report);

// Actual-vs-predicted scatter on [0, 100]^2 with the identity line; one
// <circle> per point.
std::string scatter_svg(std::span<const double> actual,
                        std::span<const double> predicted,
                        std::string_view title);

}  // namespace spanmeta::cli
