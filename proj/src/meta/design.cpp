#include "spanmeta/meta/design.hpp"

#include <cmath>

#include "spanmeta/error.hpp"
#include "spanmeta/meta/stats.hpp"

namespace spanmeta::meta {
namespace {

std::size_t index_of(Predictor p) { return static_cast<std::size_t>(p); }

constexpr std::array<Predictor, 4> kModelPredictors{
    Predictor::feat, Predictor::crf, Predictor::lstm, Predictor::bert};
constexpr std::array<Predictor, 4> kTaskPredictors{
    Predictor::log_frequency, Predictor::log_length,
    Predictor::span_distinctiveness, Predictor::boundary_distinctiveness};

std::vector<std::vector<Predictor>> column_factors(PredictorSet set) {
  std::vector<std::vector<Predictor>> out;
  out.push_back({});
  const bool model = set == PredictorSet::full ||
                     set == PredictorSet::no_interactions ||
                     set == PredictorSet::arch_only;
  const bool task = set == PredictorSet::full ||
                    set == PredictorSet::no_interactions ||
                    set == PredictorSet::task_only;
  if (model) {
    for (Predictor p : kModelPredictors) out.push_back({p});
  }
  if (task) {
    for (Predictor p : kTaskPredictors) out.push_back({p});
  }
  if (set == PredictorSet::full) {
    for (Predictor m : kModelPredictors) {
      for (Predictor t : kTaskPredictors) out.push_back({m, t});
    }
    for (std::size_t a = 0; a < kModelPredictors.size(); ++a) {
      for (std::size_t b = a + 1; b < kModelPredictors.size(); ++b) {
        out.push_back({kModelPredictors[a], kModelPredictors[b]});
      }
    }
  }
  return out;
}

std::string column_name(const std::vector<Predictor>& factors) {
  if (factors.empty()) return "intercept";
  std::string name;
  for (Predictor p : factors) {
    if (!name.empty()) name += ':';
    name += predictor_name(p);
  }
  return name;
}

Predictor parse_predictor(std::string_view name) {
  for (Predictor p : kMainPredictors) {
    if (predictor_name(p) == name) return p;
  }
  throw ValidationError("unknown predictor '" + std::string(name) + "'");
}

}  // namespace

std::string_view predictor_name(Predictor p) {
  switch (p) {
    case Predictor::feat: return "feat";
    case Predictor::crf: return "crf";
    case Predictor::lstm: return "lstm";
    case Predictor::bert: return "bert";
    case Predictor::log_frequency: return "log_freq";
    case Predictor::log_length: return "log_length";
    case Predictor::span_distinctiveness: return "span_distinct";
    case Predictor::boundary_distinctiveness: return "boundary_distinct";
  }
  return "?";
}

bool is_model_predictor(Predictor p) {
  return index_of(p) < kModelPredictors.size();
}

std::string_view to_string(PredictorSet set) {
  switch (set) {
    case PredictorSet::full: return "full";
    case PredictorSet::no_interactions: return "no_interactions";
    case PredictorSet::arch_only: return "arch_only";
    case PredictorSet::task_only: return "task_only";
    case PredictorSet::empty: return "empty";
  }
  return "?";
}

PredictorSet parse_predictor_set(std::string_view name) {
  for (PredictorSet s : kAllPredictorSets) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown predictor set '" + std::string(name) +
                        "' (expected full, no_interactions, arch_only, "
                        "task_only or empty)");
}

std::string_view to_string(InteractionScale scale) {
  return scale == InteractionScale::raw_product ? "raw_product"
                                                : "standardized_product";
}

InteractionScale parse_interaction_scale(std::string_view name) {
  if (name == "raw_product") return InteractionScale::raw_product;
  if (name == "standardized_product") {
    return InteractionScale::standardized_product;
  }
  throw ValidationError("unknown interaction scale '" + std::string(name) +
                        "'");
}

double DesignSpec::raw_main(Predictor p, const ArchitectureFeatures& arch,
                            const metrics::SpanTypeProfile& profile) const {
  switch (p) {
    case Predictor::feat: return arch.feat ? 1.0 : 0.0;
    case Predictor::crf: return arch.crf ? 1.0 : 0.0;
    case Predictor::lstm: return arch.lstm ? 1.0 : 0.0;
    case Predictor::bert: return arch.bert ? 1.0 : 0.0;
    case Predictor::log_frequency:
      if (profile.frequency == 0) {
        throw ValidationError("span type " + profile.type_id +
                              " has zero frequency");
      }
      return std::log(static_cast<double>(profile.frequency)) /
             std::log(options_.log_base);
    case Predictor::log_length:
      if (!(profile.span_length > 0.0)) {
        throw ValidationError("span type " + profile.type_id +
                              " has non-positive span length");
      }
      return std::log(profile.span_length) / std::log(options_.log_base);
    case Predictor::span_distinctiveness:
      return profile.span_distinctiveness;
    case Predictor::boundary_distinctiveness:
      if (!profile.boundary_distinctiveness) {
        throw ValidationError("span type " + profile.type_id +
                              " has undefined boundary distinctiveness");
      }
      return *profile.boundary_distinctiveness;
  }
  return 0.0;
}

double DesignSpec::unscaled(const DesignColumn& column,
                            const ArchitectureFeatures& arch,
                            const metrics::SpanTypeProfile& profile) const {
  double value = 1.0;
  for (Predictor p : column.factors) {
    double v = raw_main(p, arch, profile);
    if (column.factors.size() > 1 &&
        options_.interactions == InteractionScale::standardized_product) {
      v = (v - main_mean_[index_of(p)]) / main_sd_[index_of(p)];
    }
    value *= v;
  }
  return value;
}

DesignSpec DesignSpec::fit(std::span<const Observation> data,
                           const DesignOptions& options) {
  if (!(options.log_base > 0.0 && options.log_base != 1.0)) {
    throw ValidationError("log base must be positive and different from 1");
  }
  if (data.size() < 2) {
    throw ValidationError("design matrix needs at least 2 observations");
  }
  DesignSpec spec;
  spec.options_ = options;
  for (const auto& factors : column_factors(options.predictors)) {
    spec.columns_.push_back({column_name(factors), factors, 0.0, 1.0});
  }

  std::vector<double> values(data.size());
  auto moments = [&](const std::string& name, double& m, double& s) {
    m = mean(values);
    s = sample_sd(values);
    if (!(s > 0.0)) {
      throw ValidationError("design column '" + name + "' has zero variance");
    }
  };

  // Main-effect parameters feed standardized-product interactions, so they
  // are needed for every main that appears in some column.
  for (Predictor p : kMainPredictors) {
    bool used = false;
    for (const auto& c : spec.columns_) {
      for (Predictor f : c.factors) used = used || f == p;
    }
    if (!used) {
      spec.main_mean_[index_of(p)] = 0.0;
      spec.main_sd_[index_of(p)] = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      values[i] = spec.raw_main(p, data[i].arch, data[i].profile);
    }
    moments(std::string(predictor_name(p)), spec.main_mean_[index_of(p)],
            spec.main_sd_[index_of(p)]);
  }
  for (auto& column : spec.columns_) {
    if (column.factors.empty()) continue;
    for (std::size_t i = 0; i < data.size(); ++i) {
      values[i] = spec.unscaled(column, data[i].arch, data[i].profile);
    }
    moments(column.name, column.mean, column.sd);
  }
  return spec;
}

std::vector<std::string> DesignSpec::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

Eigen::RowVectorXd DesignSpec::row(
    const ArchitectureFeatures& arch,
    const metrics::SpanTypeProfile& profile) const {
  Eigen::RowVectorXd r(static_cast<Eigen::Index>(columns_.size()));
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& c = columns_[j];
    r(static_cast<Eigen::Index>(j)) =
        c.factors.empty() ? 1.0 : (unscaled(c, arch, profile) - c.mean) / c.sd;
  }
  return r;
}

Eigen::MatrixXd DesignSpec::matrix(std::span<const Observation> data) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(columns_.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = row(data[i].arch, data[i].profile);
  }
  return x;
}

nlohmann::json DesignSpec::to_json() const {
  nlohmann::json mains = nlohmann::json::array();
  for (Predictor p : kMainPredictors) {
    mains.push_back({{"name", predictor_name(p)},
                     {"mean", main_mean_[index_of(p)]},
                     {"sd", main_sd_[index_of(p)]}});
  }
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    cols.push_back({{"name", c.name}, {"mean", c.mean}, {"sd", c.sd}});
  }
  return {{"predictors", to_string(options_.predictors)},
          {"interactions", to_string(options_.interactions)},
          {"log_base", options_.log_base},
          {"mains", mains},
          {"columns", cols}};
}

DesignSpec DesignSpec::from_json(const nlohmann::json& j) {
  try {
    DesignSpec spec;
    spec.options_.predictors =
        parse_predictor_set(j.at("predictors").get<std::string>());
    spec.options_.interactions =
        parse_interaction_scale(j.at("interactions").get<std::string>());
    spec.options_.log_base = j.at("log_base").get<double>();
    for (const auto& m : j.at("mains")) {
      const Predictor p = parse_predictor(m.at("name").get<std::string>());
      spec.main_mean_[index_of(p)] = m.at("mean").get<double>();
      spec.main_sd_[index_of(p)] = m.at("sd").get<double>();
    }
    const auto expected = column_factors(spec.options_.predictors);
    const auto& cols = j.at("columns");
    if (cols.size() != expected.size()) {
      throw ValidationError("design has " + std::to_string(cols.size()) +
                            " columns, expected " +
                            std::to_string(expected.size()));
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
      DesignColumn c{column_name(expected[k]), expected[k],
                     cols[k].at("mean").get<double>(),
                     cols[k].at("sd").get<double>()};
      if (cols[k].at("name").get<std::string>() != c.name) {
        throw ValidationError("design column " + std::to_string(k) +
                              " should be '" + c.name + "'");
      }
      if (!c.factors.empty() && !(c.sd > 0.0)) {
        throw ValidationError("design column '" + c.name +
                              "' has non-positive sd");
      }
      spec.columns_.push_back(std::move(c));
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed design specification: ") +
                          e.what());
  }
}

DesignMatrix build_design_matrix(std::span<const Observation> data,
                                 const DesignOptions& options) {
  DesignSpec spec = DesignSpec::fit(data, options);
  Eigen::MatrixXd x = spec.matrix(data);
  return {std::move(spec), std::move(x)};
}

}  // namespace spanmeta::meta
