#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spanmeta/meta/meta_model.hpp"

namespace spanmeta::meta {

struct CvResult {
  PredictorSet predictors = PredictorSet::full;
  double alpha = kDefaultAlpha;
  // Aligned with the input observations.
  std::vector<double> actual;
  std::vector<double> predicted;
  double mae = 0.0;
  // 1 - SSres/SStot over the pooled held-out predictions, in F1 space.
  // Undefined for the empty predictor set.
  std::optional<double> r2;
};

// Leave-one-span-type-out: each fold fits on every other span type
// (standardizing on that fold) and predicts the held-out type's rows.
CvResult loso_cv(std::span<const Observation> data, double alpha = kDefaultAlpha,
                 const FitOptions& options = {});
CvResult loso_cv(std::span<const Observation> data, double alpha,
                 PredictorSet predictors);

// One LOSO run per predictor set, in kAllPredictorSets order.
std::vector<CvResult> ablate(std::span<const Observation> data,
                             double alpha = kDefaultAlpha,
                             InteractionScale interactions =
                                 InteractionScale::raw_product);

struct AlphaSearch {
  double alpha = kDefaultAlpha;
  std::vector<std::pair<double, double>> curve;  // (alpha, full-model MAE)
};

// 0.05, 0.10, ..., 0.45.
std::vector<double> default_alpha_grid();

// The grid value with the lowest full-model LOSO MAE; ties (within 1e-9)
// go to the smallest alpha.
AlphaSearch select_alpha(std::span<const Observation> data,
                         std::span<const double> grid,
                         const FitOptions& options = {});

}  // namespace spanmeta::meta
