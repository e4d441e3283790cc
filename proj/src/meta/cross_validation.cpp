#include "spanmeta/meta/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "spanmeta/error.hpp"
#include "spanmeta/meta/stats.hpp"

namespace spanmeta::meta {

CvResult loso_cv(std::span<const Observation> data, double alpha,
                 const FitOptions& options) {
  std::map<std::string, std::vector<std::size_t>> folds;
  for (std::size_t i = 0; i < data.size(); ++i) {
    folds[data[i].span_type].push_back(i);
  }
  if (folds.size() < 2) {
    throw ValidationError("leave-one-span-type-out CV needs at least 2 span "
                          "types, got " + std::to_string(folds.size()));
  }

  CvResult result;
  result.predictors = options.design.predictors;
  result.alpha = alpha;
  result.actual.resize(data.size());
  result.predicted.resize(data.size());
  std::vector<Observation> train;
  for (const auto& [type, held_out] : folds) {
    train.clear();
    for (const auto& obs : data) {
      if (obs.span_type != type) train.push_back(obs);
    }
    const MetaModel model = fit_meta_model(train, alpha, options);
    for (std::size_t i : held_out) {
      result.actual[i] = data[i].f1;
      result.predicted[i] = predict(model, data[i].arch, data[i].profile);
    }
  }

  double abs_err = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double e = result.predicted[i] - result.actual[i];
    abs_err += std::fabs(e);
    ss_res += e * e;
  }
  result.mae = abs_err / static_cast<double>(data.size());
  if (options.design.predictors != PredictorSet::empty) {
    const double m = mean(result.actual);
    double ss_tot = 0.0;
    for (double a : result.actual) ss_tot += (a - m) * (a - m);
    if (ss_tot > 0.0) result.r2 = 1.0 - ss_res / ss_tot;
  }
  return result;
}

CvResult loso_cv(std::span<const Observation> data, double alpha,
                 PredictorSet predictors) {
  FitOptions options;
  options.design.predictors = predictors;
  return loso_cv(data, alpha, options);
}

std::vector<CvResult> ablate(std::span<const Observation> data, double alpha,
                             InteractionScale interactions) {
  std::vector<CvResult> out;
  for (PredictorSet set : kAllPredictorSets) {
    FitOptions options;
    options.design.predictors = set;
    options.design.interactions = interactions;
    out.push_back(loso_cv(data, alpha, options));
  }
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back(0.05 * k);
  return grid;
}

AlphaSearch select_alpha(std::span<const Observation> data,
                         std::span<const double> grid,
                         const FitOptions& options) {
  if (grid.empty()) throw ValidationError("alpha grid is empty");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  AlphaSearch search;
  double best = 0.0;
  for (double alpha : sorted) {
    const double mae = loso_cv(data, alpha, options).mae;
    search.curve.emplace_back(alpha, mae);
    if (search.curve.size() == 1 || mae < best - 1e-9) {
      best = mae;
      search.alpha = alpha;
    }
  }
  return search;
}

}  // namespace spanmeta::meta
