#include "spanmeta/seqlab/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spanmeta/error.hpp"

namespace spanmeta::seqlab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Emission scores, row-major n x L, from a flat (F + 1) x L weight block.
std::vector<double> emissions(std::span<const double> weights,
                              std::size_t num_features, std::size_t num_labels,
                              const FeatureSequence& seq) {
  std::vector<double> e(seq.size() * num_labels);
  const double* bias = weights.data() + num_features * num_labels;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    double* row = e.data() + t * num_labels;
    std::copy(bias, bias + num_labels, row);
    for (int f : seq[t]) {
      const double* w = weights.data() + static_cast<std::size_t>(f) * num_labels;
      for (std::size_t y = 0; y < num_labels; ++y) row[y] += w[y];
    }
  }
  return e;
}

// Accumulates `delta[y]` into the emission gradient of every active feature
// at one position, and into the bias.
void add_emission_gradient(std::span<double> grad, std::size_t num_features,
                           std::size_t num_labels, const std::vector<int>& feats,
                           const double* delta) {
  double* bias = grad.data() + num_features * num_labels;
  for (std::size_t y = 0; y < num_labels; ++y) bias[y] += delta[y];
  for (int f : feats) {
    double* g = grad.data() + static_cast<std::size_t>(f) * num_labels;
    for (std::size_t y = 0; y < num_labels; ++y) g[y] += delta[y];
  }
}

void check_features(const FeatureSequence& seq, std::size_t num_features) {
  for (const auto& feats : seq) {
    for (int f : feats) {
      if (f < 0 || static_cast<std::size_t>(f) >= num_features) {
        throw ValidationError("feature id " + std::to_string(f) +
                              " outside the model's " +
                              std::to_string(num_features) + " features");
      }
    }
  }
}

void check_example(const LabeledSequence& ex, std::size_t num_features,
                   std::size_t num_labels) {
  if (ex.features.size() != ex.labels.size()) {
    throw ValidationError("feature and label sequences differ in length");
  }
  for (LabelId y : ex.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_labels) {
      throw ValidationError("gold label " + std::to_string(y) +
                            " outside the alphabet of size " +
                            std::to_string(num_labels));
    }
  }
  check_features(ex.features, num_features);
}

std::size_t row_index(int feature, std::size_t num_features) {
  if (feature < 0 || static_cast<std::size_t>(feature) >= num_features) {
    throw ValidationError("feature id " + std::to_string(feature) +
                          " out of range");
  }
  return static_cast<std::size_t>(feature);
}

}  // namespace

double log_sum_exp(std::span<const double> values) {
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

// ---------------------------------------------------------------------------
// TokenClassifierModel

TokenClassifierModel::TokenClassifierModel(std::size_t num_features,
                                           std::size_t num_labels)
    : num_features_(num_features),
      num_labels_(num_labels),
      params_((num_features + 1) * num_labels, 0.0) {
  if (num_labels == 0) throw ValidationError("model needs at least one label");
}

double& TokenClassifierModel::weight(int feature, LabelId label) {
  return params_[row_index(feature, num_features_) * num_labels_ + label];
}
double TokenClassifierModel::weight(int feature, LabelId label) const {
  return params_[row_index(feature, num_features_) * num_labels_ + label];
}
double& TokenClassifierModel::bias(LabelId label) {
  return params_[num_features_ * num_labels_ + label];
}
double TokenClassifierModel::bias(LabelId label) const {
  return params_[num_features_ * num_labels_ + label];
}

double TokenClassifierModel::score(const std::vector<int>& features,
                                   LabelId label) const {
  double s = bias(label);
  for (int f : features) s += weight(f, label);
  return s;
}

BioSequence TokenClassifierModel::predict(const FeatureSequence& seq) const {
  check_features(seq, num_features_);
  const auto e = emissions(params_, num_features_, num_labels_, seq);
  BioSequence out(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const double* row = e.data() + t * num_labels_;
    out[t] = static_cast<LabelId>(std::max_element(row, row + num_labels_) - row);
  }
  return out;
}

double TokenClassifierModel::loss_and_gradient(
    std::span<const LabeledSequence> batch, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  std::vector<double> delta(num_labels_);
  for (const LabeledSequence& ex : batch) {
    check_example(ex, num_features_, num_labels_);
    const auto e = emissions(params_, num_features_, num_labels_, ex.features);
    for (std::size_t t = 0; t < ex.features.size(); ++t) {
      std::span<const double> row(e.data() + t * num_labels_, num_labels_);
      const double log_norm = log_sum_exp(row);
      const auto gold = static_cast<std::size_t>(ex.labels[t]);
      loss += log_norm - row[gold];
      for (std::size_t y = 0; y < num_labels_; ++y) {
        delta[y] = std::exp(row[y] - log_norm) - (y == gold ? 1.0 : 0.0);
      }
      add_emission_gradient(grad, num_features_, num_labels_, ex.features[t],
                            delta.data());
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// LinearChainCrfModel

LinearChainCrfModel::LinearChainCrfModel(std::size_t num_features,
                                         std::size_t num_labels)
    : num_features_(num_features), num_labels_(num_labels) {
  if (num_labels == 0) throw ValidationError("model needs at least one label");
  params_.assign(stop_offset() + num_labels_, 0.0);
}

double& LinearChainCrfModel::weight(int feature, LabelId label) {
  return params_[row_index(feature, num_features_) * num_labels_ + label];
}
double LinearChainCrfModel::weight(int feature, LabelId label) const {
  return params_[row_index(feature, num_features_) * num_labels_ + label];
}
double& LinearChainCrfModel::bias(LabelId label) {
  return params_[num_features_ * num_labels_ + label];
}
double LinearChainCrfModel::bias(LabelId label) const {
  return params_[num_features_ * num_labels_ + label];
}
double& LinearChainCrfModel::transition(LabelId from, LabelId to) {
  return params_[transition_offset() + from * num_labels_ + to];
}
double LinearChainCrfModel::transition(LabelId from, LabelId to) const {
  return params_[transition_offset() + from * num_labels_ + to];
}
double& LinearChainCrfModel::start(LabelId label) {
  return params_[start_offset() + label];
}
double LinearChainCrfModel::start(LabelId label) const {
  return params_[start_offset() + label];
}
double& LinearChainCrfModel::stop(LabelId label) {
  return params_[stop_offset() + label];
}
double LinearChainCrfModel::stop(LabelId label) const {
  return params_[stop_offset() + label];
}

void LinearChainCrfModel::constrain_bio(const LabelSet& labels) {
  if (labels.size() != num_labels_) {
    throw ValidationError("label set size does not match the model");
  }
  const auto L = static_cast<LabelId>(num_labels_);
  allowed_transition_.assign(num_labels_ * num_labels_, 1);
  allowed_start_.assign(num_labels_, 1);
  for (LabelId to = 0; to < L; ++to) {
    if (!labels.is_inside(to)) continue;
    allowed_start_[to] = 0;
    for (LabelId from = 0; from < L; ++from) {
      const bool continues =
          !labels.is_outside(from) && labels.type_of(from) == labels.type_of(to);
      if (!continues) allowed_transition_[from * num_labels_ + to] = 0;
    }
  }
}

bool LinearChainCrfModel::transition_allowed(LabelId from, LabelId to) const {
  return allowed_transition_.empty() ||
         allowed_transition_[from * num_labels_ + to] != 0;
}

bool LinearChainCrfModel::start_allowed(LabelId label) const {
  return allowed_start_.empty() || allowed_start_[label] != 0;
}

double LinearChainCrfModel::effective_transition(LabelId from, LabelId to) const {
  return transition_allowed(from, to) ? transition(from, to) : kNegInf;
}

double LinearChainCrfModel::effective_start(LabelId label) const {
  return start_allowed(label) ? start(label) : kNegInf;
}

double LinearChainCrfModel::sequence_score(const FeatureSequence& seq,
                                           const BioSequence& labels) const {
  if (seq.empty() || seq.size() != labels.size()) {
    throw ValidationError("sequence score needs equal, non-zero lengths");
  }
  check_features(seq, num_features_);
  const auto e = emissions(params_, num_features_, num_labels_, seq);
  double s = effective_start(labels.front()) + stop(labels.back());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    s += e[t * num_labels_ + labels[t]];
    if (t > 0) s += effective_transition(labels[t - 1], labels[t]);
  }
  return s;
}

double LinearChainCrfModel::log_partition(const FeatureSequence& seq) const {
  if (seq.empty()) throw ValidationError("log partition of an empty sequence");
  check_features(seq, num_features_);
  const std::size_t L = num_labels_;
  const auto e = emissions(params_, num_features_, L, seq);
  std::vector<double> alpha(L), next(L), terms(L);
  for (std::size_t y = 0; y < L; ++y) {
    alpha[y] = effective_start(static_cast<LabelId>(y)) + e[y];
  }
  for (std::size_t t = 1; t < seq.size(); ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t a = 0; a < L; ++a) {
        terms[a] = alpha[a] + effective_transition(static_cast<LabelId>(a),
                                                   static_cast<LabelId>(y));
      }
      next[y] = e[t * L + y] + log_sum_exp(terms);
    }
    alpha.swap(next);
  }
  for (std::size_t y = 0; y < L; ++y) terms[y] = alpha[y] + stop(static_cast<LabelId>(y));
  return log_sum_exp(terms);
}

BioSequence LinearChainCrfModel::viterbi(const FeatureSequence& seq) const {
  if (seq.empty()) return {};
  check_features(seq, num_features_);
  const std::size_t L = num_labels_;
  const std::size_t n = seq.size();
  const auto e = emissions(params_, num_features_, L, seq);
  std::vector<double> delta(L), next(L);
  std::vector<LabelId> back(n * L, 0);
  for (std::size_t y = 0; y < L; ++y) {
    delta[y] = effective_start(static_cast<LabelId>(y)) + e[y];
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      double best = kNegInf;
      LabelId arg = 0;
      for (std::size_t a = 0; a < L; ++a) {
        const double s = delta[a] + effective_transition(static_cast<LabelId>(a),
                                                         static_cast<LabelId>(y));
        if (s > best) {
          best = s;
          arg = static_cast<LabelId>(a);
        }
      }
      next[y] = best + e[t * L + y];
      back[t * L + y] = arg;
    }
    delta.swap(next);
  }
  double best = kNegInf;
  LabelId last = 0;
  for (std::size_t y = 0; y < L; ++y) {
    const double s = delta[y] + stop(static_cast<LabelId>(y));
    if (s > best) {
      best = s;
      last = static_cast<LabelId>(y);
    }
  }
  BioSequence path(n);
  path[n - 1] = last;
  for (std::size_t t = n - 1; t > 0; --t) {
    path[t - 1] = back[t * L + static_cast<std::size_t>(path[t])];
  }
  return path;
}

double LinearChainCrfModel::loss_and_gradient(
    std::span<const LabeledSequence> batch, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t L = num_labels_;
  double loss = 0.0;
  std::vector<double> terms(L), delta(L);
  double* grad_trans = grad.data() + transition_offset();
  double* grad_start = grad.data() + start_offset();
  double* grad_stop = grad.data() + stop_offset();

  for (const LabeledSequence& ex : batch) {
    check_example(ex, num_features_, L);
    const std::size_t n = ex.features.size();
    if (n == 0) continue;
    const auto e = emissions(params_, num_features_, L, ex.features);

    // alpha[t][y]: log-sum of prefix scores ending in y at t (incl. emission)
    // beta[t][y]:  log-sum of suffix scores after t given y at t (excl.)
    std::vector<double> alpha(n * L), beta(n * L);
    for (std::size_t y = 0; y < L; ++y) {
      alpha[y] = effective_start(static_cast<LabelId>(y)) + e[y];
    }
    for (std::size_t t = 1; t < n; ++t) {
      for (std::size_t y = 0; y < L; ++y) {
        for (std::size_t a = 0; a < L; ++a) {
          terms[a] = alpha[(t - 1) * L + a] +
                     effective_transition(static_cast<LabelId>(a),
                                          static_cast<LabelId>(y));
        }
        alpha[t * L + y] = e[t * L + y] + log_sum_exp(terms);
      }
    }
    for (std::size_t y = 0; y < L; ++y) {
      beta[(n - 1) * L + y] = stop(static_cast<LabelId>(y));
    }
    for (std::size_t t = n - 1; t > 0; --t) {
      for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t y = 0; y < L; ++y) {
          terms[y] = effective_transition(static_cast<LabelId>(a),
                                          static_cast<LabelId>(y)) +
                     e[t * L + y] + beta[t * L + y];
        }
        beta[(t - 1) * L + a] = log_sum_exp(terms);
      }
    }
    for (std::size_t y = 0; y < L; ++y) {
      terms[y] = alpha[(n - 1) * L + y] + beta[(n - 1) * L + y];
    }
    const double log_z = log_sum_exp(terms);

    loss += log_z - sequence_score(ex.features, ex.labels);

    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t y = 0; y < L; ++y) {
        delta[y] = std::exp(alpha[t * L + y] + beta[t * L + y] - log_z);
      }
      const auto gold = static_cast<std::size_t>(ex.labels[t]);
      if (t == 0) {
        for (std::size_t y = 0; y < L; ++y) grad_start[y] += delta[y];
        grad_start[gold] -= 1.0;
      }
      if (t == n - 1) {
        for (std::size_t y = 0; y < L; ++y) grad_stop[y] += delta[y];
        grad_stop[gold] -= 1.0;
      }
      delta[gold] -= 1.0;
      add_emission_gradient(grad, num_features_, L, ex.features[t],
                            delta.data());
      if (t > 0) {
        for (std::size_t a = 0; a < L; ++a) {
          for (std::size_t y = 0; y < L; ++y) {
            const double tr = effective_transition(static_cast<LabelId>(a),
                                                   static_cast<LabelId>(y));
            if (tr == kNegInf) continue;
            grad_trans[a * L + y] += std::exp(alpha[(t - 1) * L + a] + tr +
                                              e[t * L + y] + beta[t * L + y] -
                                              log_z);
          }
        }
        grad_trans[static_cast<std::size_t>(ex.labels[t - 1]) * L + gold] -= 1.0;
      }
    }
  }
  if (constrained()) {
    for (std::size_t i = 0; i < L * L; ++i) {
      if (!allowed_transition_[i]) grad_trans[i] = 0.0;
    }
    for (std::size_t y = 0; y < L; ++y) {
      if (!allowed_start_[y]) grad_start[y] = 0.0;
    }
  }
  return loss;
}

double crf_log_partition(const LinearChainCrfModel& model,
                         const FeatureSequence& seq) {
  return model.log_partition(seq);
}

BioSequence crf_viterbi(const LinearChainCrfModel& model,
                        const FeatureSequence& seq) {
  if (seq.empty()) throw ValidationError("Viterbi on an empty sequence");
  return model.viterbi(seq);
}

LossAndGradient crf_nll_gradient(const LinearChainCrfModel& model,
                                 std::span<const LabeledSequence> batch) {
  LossAndGradient out;
  out.gradient.resize(model.parameters().size());
  out.loss = model.loss_and_gradient(batch, out.gradient);
  return out;
}

}  // namespace spanmeta::seqlab
