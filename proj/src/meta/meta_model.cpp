#include "spanmeta/meta/meta_model.hpp"

#include <fstream>

#include "spanmeta/error.hpp"
#include "spanmeta/meta/stats.hpp"
#include "spanmeta/meta/transform.hpp"

namespace spanmeta::meta {
namespace {

constexpr const char* kFormat = "spanmeta-meta-model";
constexpr int kVersion = 1;

std::string_view method_name(FitMethod m) {
  return m == FitMethod::ols ? "ols" : "elastic_net";
}

FitMethod parse_method(std::string_view name) {
  if (name == "ols") return FitMethod::ols;
  if (name == "elastic_net") return FitMethod::elastic_net;
  throw ValidationError("unknown fit method '" + std::string(name) + "'");
}

}  // namespace

double MetaModel::coefficient(std::string_view column) const {
  const auto& cols = design.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].name == column) {
      return coefficients(static_cast<Eigen::Index>(j));
    }
  }
  throw ValidationError("model has no column '" + std::string(column) + "'");
}

bool MetaModel::significant(std::size_t column) const {
  if (!inference) return false;
  return inference->p_values(static_cast<Eigen::Index>(column)) <
         kSignificanceLevel;
}

double MetaModel::predict_transformed(
    const ArchitectureFeatures& arch,
    const metrics::SpanTypeProfile& profile) const {
  return design.row(arch, profile).dot(coefficients);
}

double predict(const MetaModel& model, const ArchitectureFeatures& arch,
               const metrics::SpanTypeProfile& profile) {
  return inverse_padded_logit(model.predict_transformed(arch, profile),
                              model.alpha);
}

Eigen::VectorXd transformed_targets(std::span<const Observation> data,
                                    double alpha) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = padded_logit(data[i].f1, alpha);
  }
  return y;
}

MetaModel fit_ols(const DesignMatrix& x, const Eigen::VectorXd& y,
                  double alpha) {
  check_alpha(alpha);
  const auto names = x.spec.names();
  OlsResult r = ordinary_least_squares(x.x, y, names);
  MetaModel m;
  m.design = x.spec;
  m.alpha = alpha;
  m.method = FitMethod::ols;
  m.coefficients = std::move(r.coefficients);
  m.inference = Inference{std::move(r.standard_errors),
                          std::move(r.t_statistics), std::move(r.p_values),
                          r.residual_variance, r.residual_df};
  return m;
}

MetaModel fit_elastic_net(const DesignMatrix& x, const Eigen::VectorXd& y,
                          double l1, double l2, double alpha) {
  check_alpha(alpha);
  MetaModel m;
  m.design = x.spec;
  m.alpha = alpha;
  m.method = FitMethod::elastic_net;
  m.l1 = l1;
  m.l2 = l2;
  m.coefficients = elastic_net(x.x, y, l1, l2);
  return m;
}

MetaModel fit_meta_model(std::span<const Observation> data, double alpha,
                         const FitOptions& options) {
  check_alpha(alpha);
  for (const auto& obs : data) validate(obs);
  const DesignMatrix x = build_design_matrix(data, options.design);
  const Eigen::VectorXd y = transformed_targets(data, alpha);
  MetaModel m = options.method == FitMethod::ols
                    ? fit_ols(x, y, alpha)
                    : fit_elastic_net(x, y, options.l1, options.l2, alpha);
  if (options.design.predictors == PredictorSet::empty) {
    std::vector<double> f1;
    for (const auto& obs : data) f1.push_back(obs.f1);
    m.coefficients(0) = padded_logit(mean(f1), alpha);
  }
  return m;
}

nlohmann::json MetaModel::to_json() const {
  nlohmann::json coefs = nlohmann::json::array();
  const auto& cols = design.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    nlohmann::json c = {{"name", cols[j].name},
                        {"estimate", coefficients(k)}};
    if (inference) {
      c["std_error"] = inference->standard_errors(k);
      c["t"] = inference->t_statistics(k);
      c["p"] = inference->p_values(k);
      c["significant"] = significant(j);
    }
    coefs.push_back(std::move(c));
  }
  nlohmann::json j = {{"format", kFormat},
                      {"version", kVersion},
                      {"alpha", alpha},
                      {"method", method_name(method)},
                      {"design", design.to_json()},
                      {"coefficients", coefs}};
  if (method == FitMethod::elastic_net) {
    j["l1"] = l1;
    j["l2"] = l2;
  }
  if (inference) {
    j["residual_df"] = inference->residual_df;
    j["residual_variance"] = inference->residual_variance;
    j["significance_level"] = kSignificanceLevel;
  }
  return j;
}

MetaModel MetaModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat ||
        j.at("version").get<int>() != kVersion) {
      throw ValidationError("not a spanmeta meta-model (version " +
                            std::to_string(kVersion) + ")");
    }
    MetaModel m;
    m.alpha = j.at("alpha").get<double>();
    check_alpha(m.alpha);
    m.method = parse_method(j.at("method").get<std::string>());
    m.design = DesignSpec::from_json(j.at("design"));
    if (m.method == FitMethod::elastic_net) {
      m.l1 = j.at("l1").get<double>();
      m.l2 = j.at("l2").get<double>();
    }
    const auto& coefs = j.at("coefficients");
    const auto names = m.design.names();
    if (coefs.size() != names.size()) {
      throw ValidationError("coefficient count does not match the design");
    }
    const auto p = static_cast<Eigen::Index>(names.size());
    m.coefficients.resize(p);
    const bool has_inference = j.contains("residual_df");
    Inference inf;
    if (has_inference) {
      inf.standard_errors.resize(p);
      inf.t_statistics.resize(p);
      inf.p_values.resize(p);
      inf.residual_df = j.at("residual_df").get<int>();
      inf.residual_variance = j.at("residual_variance").get<double>();
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      const auto& c = coefs[static_cast<std::size_t>(k)];
      if (c.at("name").get<std::string>() !=
          names[static_cast<std::size_t>(k)]) {
        throw ValidationError("coefficient " + std::to_string(k) +
                              " should be named '" +
                              names[static_cast<std::size_t>(k)] + "'");
      }
      m.coefficients(k) = c.at("estimate").get<double>();
      if (has_inference) {
        inf.standard_errors(k) = c.at("std_error").get<double>();
        inf.t_statistics(k) = c.at("t").get<double>();
        inf.p_values(k) = c.at("p").get<double>();
      }
    }
    if (has_inference) m.inference = std::move(inf);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed meta-model JSON: ") +
                          e.what());
  }
}

void save_meta_model(const MetaModel& model,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << model.to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

MetaModel load_meta_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return MetaModel::from_json(j);
}

}  // namespace spanmeta::meta
