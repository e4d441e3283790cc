#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "spanmeta/meta/design.hpp"
#include "spanmeta/meta/observation.hpp"
#include "spanmeta/meta/regression.hpp"

namespace spanmeta::meta {

inline constexpr double kDefaultAlpha = 0.2;
// Bonferroni-corrected threshold for the 31 coefficients.
inline constexpr double kSignificanceLevel = 0.002;

enum class FitMethod { ols, elastic_net };

struct Inference {
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd t_statistics;
  Eigen::VectorXd p_values;
  double residual_variance = 0.0;
  int residual_df = 0;
};

// Linear model over padded-logit F1. Immutable once fitted.
struct MetaModel {
  DesignSpec design;
  double alpha = kDefaultAlpha;
  FitMethod method = FitMethod::ols;
  double l1 = 0.0;
  double l2 = 0.0;
  Eigen::VectorXd coefficients;
  std::optional<Inference> inference;  // OLS only

  double coefficient(std::string_view column) const;
  bool significant(std::size_t column) const;

  double predict_transformed(const ArchitectureFeatures& arch,
                             const metrics::SpanTypeProfile& profile) const;

  nlohmann::json to_json() const;
  static MetaModel from_json(const nlohmann::json& j);
};

// y must already be padded-logit transformed.
MetaModel fit_ols(const DesignMatrix& x, const Eigen::VectorXd& y,
                  double alpha = kDefaultAlpha);
MetaModel fit_elastic_net(const DesignMatrix& x, const Eigen::VectorXd& y,
                          double l1, double l2, double alpha = kDefaultAlpha);

Eigen::VectorXd transformed_targets(std::span<const Observation> data,
                                    double alpha);

struct FitOptions {
  DesignOptions design;
  FitMethod method = FitMethod::ols;
  double l1 = 0.0;
  double l2 = 0.0;
};

// Standardizes on `data`, transforms F1 and fits. For the empty predictor
// set the intercept is set so that the model predicts the mean F1 of `data`.
MetaModel fit_meta_model(std::span<const Observation> data,
                         double alpha = kDefaultAlpha,
                         const FitOptions& options = {});

// Predicted F1 in [0, 100].
double predict(const MetaModel& model, const ArchitectureFeatures& arch,
               const metrics::SpanTypeProfile& profile);

void save_meta_model(const MetaModel& model, const std::filesystem::path& path);
MetaModel load_meta_model(const std::filesystem::path& path);

}  // namespace spanmeta::meta
