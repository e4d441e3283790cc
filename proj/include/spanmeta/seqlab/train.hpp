#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "spanmeta/bio.hpp"
#include "spanmeta/corpus.hpp"
#include "spanmeta/seqlab/features.hpp"
#include "spanmeta/seqlab/linear_models.hpp"

namespace spanmeta::seqlab {

enum class Architecture { baseline, crf };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double feature_dropout = 0.5;
  double ema_decay = 0.9;
  std::size_t max_epochs = 50;
  std::size_t batch_size = 8;  // documents per minibatch
  std::uint64_t seed = 1;
  bool constrain_transitions = false;
  bool surface_features = true;
  double dev_fraction = 0.1;  // held out when no dev corpus is given

  // Throws ValidationError on out-of-range values.
  void validate() const;
};

class Adam {
 public:
  Adam(std::size_t num_params, double learning_rate, double beta1,
       double beta2, double epsilon);

  void step(std::span<double> params, std::span<const double> grad);
  std::size_t steps() const { return steps_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t steps_ = 0;
  std::vector<double> m_, v_;
};

// A fitted labeler: feature index, label alphabet and model weights.
class SequenceLabeler {
 public:
  using Model = std::variant<TokenClassifierModel, LinearChainCrfModel>;

  SequenceLabeler(Architecture arch, LabelSet labels, FeatureIndex features,
                  bool constrain_transitions);

  Architecture architecture() const { return arch_; }
  const LabelSet& labels() const { return labels_; }
  const FeatureIndex& features() const { return features_; }
  const Model& model() const { return model_; }
  Model& model() { return model_; }

  std::span<double> parameters();
  std::span<const double> parameters() const;
  double loss_and_gradient(std::span<const LabeledSequence> batch,
                           std::span<double> grad) const;

  BioSequence predict(const FeatureSequence& seq) const;
  BioSequence predict(const Document& doc) const;
  std::vector<BioSequence> predict(const Corpus& corpus) const;
  // Predictions decoded leniently into a corpus with the same documents.
  Corpus predict_corpus(const Corpus& corpus) const;

  nlohmann::json to_json() const;
  static SequenceLabeler from_json(const nlohmann::json& j);

 private:
  Architecture arch_;
  LabelSet labels_;
  FeatureIndex features_;
  Model model_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_f1 = 0.0;
  double ema_before = 0.0;  // running average the epoch was compared with
  bool checkpoint = false;
};

struct TrainResult {
  SequenceLabeler model;  // best checkpoint
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;  // 0: the initial model
  double best_dev_f1 = 0.0;
};

// Adam on minibatches of whole documents with feature dropout; after each
// epoch the micro-averaged dev F1 is computed, the model is checkpointed if it
// beats the best so far, and training stops once an epoch's F1 falls below
// the exponential moving average of the previous epochs' F1.
TrainResult train(Architecture arch, const Corpus& train_corpus,
                  const Corpus& dev_corpus, const TrainConfig& config);
// Holds out config.dev_fraction of the training documents as dev set.
TrainResult train(Architecture arch, const Corpus& train_corpus,
                  const TrainConfig& config);

// Splits off round(fraction * n) documents (at least one) at random.
std::pair<Corpus, Corpus> hold_out(const Corpus& corpus, double fraction,
                                   std::uint64_t seed);

double micro_f1(const SequenceLabeler& labeler, const Corpus& gold);

void save_labeler(const SequenceLabeler& labeler,
                  const std::filesystem::path& path);
SequenceLabeler load_labeler(const std::filesystem::path& path);

nlohmann::json to_json(const EpochRecord& record);

}  // namespace spanmeta::seqlab
