#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spanmeta/bio.hpp"
#include "spanmeta/seqlab/features.hpp"

namespace spanmeta::seqlab {

struct LabeledSequence {
  FeatureSequence features;
  BioSequence labels;
};

// Token-level softmax classifier over sparse indicator features:
//   score(t, y) = sum_{f active at t} W[f, y] + bias[y].
// Parameters are one flat row-major (num_features + 1) x num_labels block;
// the last row is the bias.
class TokenClassifierModel {
 public:
  TokenClassifierModel(std::size_t num_features, std::size_t num_labels);

  std::size_t num_features() const { return num_features_; }
  std::size_t num_labels() const { return num_labels_; }

  double& weight(int feature, LabelId label);
  double weight(int feature, LabelId label) const;
  double& bias(LabelId label);
  double bias(LabelId label) const;

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  double score(const std::vector<int>& features, LabelId label) const;
  // Per-token argmax, ties to the lower label id.
  BioSequence predict(const FeatureSequence& seq) const;

  // Summed token cross-entropy over the batch; `grad` (same size as
  // parameters()) is overwritten with its gradient.
  double loss_and_gradient(std::span<const LabeledSequence> batch,
                           std::span<double> grad) const;

 private:
  std::size_t num_features_;
  std::size_t num_labels_;
  std::vector<double> params_;
};

// Linear-chain CRF with the same emission block followed by an L x L
// transition matrix (row = previous label) and start/stop vectors:
//   score(x, y) = sum_t emission(t, y_t) + sum_{t>0} T[y_{t-1}, y_t]
//                 + start[y_0] + stop[y_{n-1}].
class LinearChainCrfModel {
 public:
  LinearChainCrfModel(std::size_t num_features, std::size_t num_labels);

  std::size_t num_features() const { return num_features_; }
  std::size_t num_labels() const { return num_labels_; }

  double& weight(int feature, LabelId label);
  double weight(int feature, LabelId label) const;
  double& bias(LabelId label);
  double bias(LabelId label) const;
  double& transition(LabelId from, LabelId to);
  double transition(LabelId from, LabelId to) const;
  double& start(LabelId label);
  double start(LabelId label) const;
  double& stop(LabelId label);
  double stop(LabelId label) const;

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Forbids O -> I-t, B-t/I-t -> I-u (u != t) and starting on I-t by giving
  // them a score of -infinity. Masked parameters receive zero gradient.
  void constrain_bio(const LabelSet& labels);
  bool constrained() const { return !allowed_transition_.empty(); }
  bool transition_allowed(LabelId from, LabelId to) const;
  bool start_allowed(LabelId label) const;

  // Scores with the mask applied.
  double effective_transition(LabelId from, LabelId to) const;
  double effective_start(LabelId label) const;

  double sequence_score(const FeatureSequence& seq,
                        const BioSequence& labels) const;
  // log sum over all label sequences of exp(score), by the forward
  // algorithm in log space.
  double log_partition(const FeatureSequence& seq) const;
  // Highest-scoring sequence; backpointer ties go to the lower label id.
  BioSequence viterbi(const FeatureSequence& seq) const;

  // sum (log Z - gold score); `grad` is overwritten with expected minus
  // observed feature counts from forward-backward marginals.
  double loss_and_gradient(std::span<const LabeledSequence> batch,
                           std::span<double> grad) const;

 private:
  std::size_t emission_size() const {
    return (num_features_ + 1) * num_labels_;
  }
  std::size_t transition_offset() const { return emission_size(); }
  std::size_t start_offset() const {
    return transition_offset() + num_labels_ * num_labels_;
  }
  std::size_t stop_offset() const { return start_offset() + num_labels_; }

  std::size_t num_features_;
  std::size_t num_labels_;
  std::vector<double> params_;
  std::vector<char> allowed_transition_;  // empty when unconstrained
  std::vector<char> allowed_start_;
};

double crf_log_partition(const LinearChainCrfModel& model,
                         const FeatureSequence& seq);
BioSequence crf_viterbi(const LinearChainCrfModel& model,
                        const FeatureSequence& seq);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

LossAndGradient crf_nll_gradient(const LinearChainCrfModel& model,
                                 std::span<const LabeledSequence> batch);

double log_sum_exp(std::span<const double> values);

}  // namespace spanmeta::seqlab
