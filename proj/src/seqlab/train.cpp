#include "spanmeta/seqlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "spanmeta/error.hpp"
#include "spanmeta/span_eval.hpp"

namespace spanmeta::seqlab {
namespace {

constexpr std::string_view kModelFormat = "spanmeta-labeler";

SequenceLabeler::Model make_model(Architecture arch, std::size_t num_features,
                                  const LabelSet& labels, bool constrain) {
  if (arch == Architecture::baseline) {
    return TokenClassifierModel(num_features, labels.size());
  }
  LinearChainCrfModel crf(num_features, labels.size());
  if (constrain) crf.constrain_bio(labels);
  return crf;
}

struct EncodedDocument {
  EncodedSequence features;
  BioSequence gold;
};

}  // namespace

std::string_view to_string(Architecture arch) {
  return arch == Architecture::baseline ? "baseline" : "crf";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "baseline") return Architecture::baseline;
  if (name == "crf") return Architecture::crf;
  throw ValidationError("unknown architecture '" + std::string(name) +
                        "' (expected baseline or crf)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in [0, 1)");
  }
  if (!(feature_dropout >= 0.0 && feature_dropout < 1.0)) {
    throw ValidationError("feature_dropout must lie in [0, 1)");
  }
  if (!(ema_decay > 0.0 && ema_decay < 1.0)) {
    throw ValidationError("ema_decay must lie in (0, 1)");
  }
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ValidationError("dev_fraction must lie in (0, 1)");
  }
}

Adam::Adam(std::size_t num_params, double learning_rate, double beta1,
           double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(num_params, 0.0),
      v_(num_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

SequenceLabeler::SequenceLabeler(Architecture arch, LabelSet labels,
                                 FeatureIndex features,
                                 bool constrain_transitions)
    : arch_(arch),
      labels_(std::move(labels)),
      features_(std::move(features)),
      model_(make_model(arch, features_.size(), labels_,
                        constrain_transitions)) {}

std::span<double> SequenceLabeler::parameters() {
  return std::visit([](auto& m) { return m.parameters(); }, model_);
}

std::span<const double> SequenceLabeler::parameters() const {
  return std::visit(
      [](const auto& m) -> std::span<const double> { return m.parameters(); },
      model_);
}

double SequenceLabeler::loss_and_gradient(
    std::span<const LabeledSequence> batch, std::span<double> grad) const {
  return std::visit(
      [&](const auto& m) { return m.loss_and_gradient(batch, grad); }, model_);
}

BioSequence SequenceLabeler::predict(const FeatureSequence& seq) const {
  if (const auto* crf = std::get_if<LinearChainCrfModel>(&model_)) {
    return crf->viterbi(seq);
  }
  return std::get<TokenClassifierModel>(model_).predict(seq);
}

BioSequence SequenceLabeler::predict(const Document& doc) const {
  return predict(all_features(features_.encode(doc)));
}

std::vector<BioSequence> SequenceLabeler::predict(const Corpus& corpus) const {
  std::vector<BioSequence> out;
  out.reserve(corpus.documents().size());
  for (const Document& doc : corpus.documents()) out.push_back(predict(doc));
  return out;
}

Corpus SequenceLabeler::predict_corpus(const Corpus& corpus) const {
  std::vector<Document> docs;
  docs.reserve(corpus.documents().size());
  for (const Document& doc : corpus.documents()) {
    auto spans = bio_decode(predict(doc), labels_, DecodeMode::lenient);
    docs.emplace_back(doc.id(), doc.tokens(), std::move(spans));
  }
  return Corpus(std::move(docs), labels_.span_types(), corpus.partition());
}

nlohmann::json SequenceLabeler::to_json() const {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = 1;
  j["architecture"] = to_string(arch_);
  j["span_types"] = labels_.span_types();
  j["labels"] = label_names(
      [&] {
        BioSequence all(labels_.size());
        std::iota(all.begin(), all.end(), 0);
        return all;
      }(),
      labels_);
  j["surface_features"] = features_.surface_features();
  j["features"] = features_.names();
  const std::size_t L = labels_.size();
  const std::size_t rows = features_.size() + 1;
  auto params = parameters();
  j["emission_shape"] = {rows, L};
  j["emission"] = std::vector<double>(params.begin(), params.begin() + rows * L);
  if (const auto* crf = std::get_if<LinearChainCrfModel>(&model_)) {
    const auto* p = params.data() + rows * L;
    j["constrain_transitions"] = crf->constrained();
    j["transitions"] = std::vector<double>(p, p + L * L);
    j["start"] = std::vector<double>(p + L * L, p + L * L + L);
    j["stop"] = std::vector<double>(p + L * L + L, p + L * L + 2 * L);
  }
  return j;
}

SequenceLabeler SequenceLabeler::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw ValidationError("not a spanmeta labeler model");
    }
    const auto arch = parse_architecture(j.at("architecture").get<std::string>());
    LabelSet labels(j.at("span_types").get<std::vector<std::string>>());
    auto features = FeatureIndex::from_names(
        j.at("features").get<std::vector<std::string>>(),
        j.at("surface_features").get<bool>());
    const bool constrain =
        j.contains("constrain_transitions") && j["constrain_transitions"].get<bool>();
    SequenceLabeler labeler(arch, std::move(labels), std::move(features),
                            constrain);
    std::vector<double> flat = j.at("emission").get<std::vector<double>>();
    if (arch == Architecture::crf) {
      for (const char* key : {"transitions", "start", "stop"}) {
        auto part = j.at(key).get<std::vector<double>>();
        flat.insert(flat.end(), part.begin(), part.end());
      }
    }
    auto params = labeler.parameters();
    if (flat.size() != params.size()) {
      throw ValidationError("model has " + std::to_string(flat.size()) +
                            " parameters, expected " +
                            std::to_string(params.size()));
    }
    std::copy(flat.begin(), flat.end(), params.begin());
    return labeler;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model JSON: ") + e.what());
  }
}

double micro_f1(const SequenceLabeler& labeler, const Corpus& gold) {
  auto counts = eval::count_matches(gold, labeler.predict_corpus(gold));
  return eval::f1_report(counts, gold.span_types()).micro.f1;
}

std::pair<Corpus, Corpus> hold_out(const Corpus& corpus, double fraction,
                                   std::uint64_t seed) {
  const std::size_t n = corpus.documents().size();
  if (n < 2) {
    throw ValidationError(
        "need at least 2 training documents to hold out a dev set");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n - 1);
  std::vector<bool> is_dev(n, false);
  for (std::size_t i = 0; i < k; ++i) is_dev[order[i]] = true;
  std::vector<Document> train_docs, dev_docs;
  for (std::size_t i = 0; i < n; ++i) {
    (is_dev[i] ? dev_docs : train_docs).push_back(corpus.documents()[i]);
  }
  return {Corpus(std::move(train_docs), corpus.span_types(), Partition::train),
          Corpus(std::move(dev_docs), corpus.span_types(), Partition::dev)};
}

TrainResult train(Architecture arch, const Corpus& train_corpus,
                  const Corpus& dev_corpus, const TrainConfig& config) {
  config.validate();
  if (train_corpus.documents().empty() || train_corpus.token_count() == 0) {
    throw ValidationError("empty training corpus");
  }
  if (dev_corpus.span_types() != train_corpus.span_types()) {
    throw ValidationError("training and dev corpora have different span-type "
                          "inventories");
  }

  LabelSet labels(train_corpus.span_types());
  SequenceLabeler labeler(
      arch, labels, FeatureIndex::fit(train_corpus, config.surface_features),
      config.constrain_transitions);

  std::vector<EncodedDocument> docs;
  for (const Document& doc : train_corpus.documents()) {
    if (doc.size() == 0) continue;
    docs.push_back({labeler.features().encode(doc), bio_encode(doc, labels)});
  }

  TrainResult result{labeler, {}, 0, 0.0};
  if (config.max_epochs == 0) {
    result.best_dev_f1 = micro_f1(labeler, dev_corpus);
    return result;
  }

  Rng rng(config.seed);
  Adam adam(labeler.parameters().size(), config.learning_rate,
            config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  std::vector<double> grad(labeler.parameters().size());
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LabeledSequence> batch;
  double ema = 0.0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const EncodedDocument& d = docs[order[i]];
        batch.push_back(
            {with_dropout(d.features, config.feature_dropout, rng), d.gold});
      }
      epoch_loss += labeler.loss_and_gradient(batch, grad);
      adam.step(labeler.parameters(), grad);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss;
    record.dev_f1 = micro_f1(labeler, dev_corpus);
    record.ema_before = epoch == 1 ? record.dev_f1 : ema;
    if (epoch == 1 || record.dev_f1 > result.best_dev_f1) {
      record.checkpoint = true;
      result.model = labeler;
      result.best_dev_f1 = record.dev_f1;
      result.best_epoch = epoch;
    }
    result.log.push_back(record);

    if (epoch == 1) {
      ema = record.dev_f1;
    } else {
      if (record.dev_f1 < ema) break;
      ema = config.ema_decay * ema + (1.0 - config.ema_decay) * record.dev_f1;
    }
  }
  return result;
}

TrainResult train(Architecture arch, const Corpus& train_corpus,
                  const TrainConfig& config) {
  config.validate();
  auto [train_part, dev_part] =
      hold_out(train_corpus, config.dev_fraction, config.seed);
  return train(arch, train_part, dev_part, config);
}

void save_labeler(const SequenceLabeler& labeler,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << labeler.to_json().dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

SequenceLabeler load_labeler(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return SequenceLabeler::from_json(j);
}

nlohmann::json to_json(const EpochRecord& record) {
  return {{"epoch", record.epoch},
          {"train_loss", record.train_loss},
          {"dev_f1", record.dev_f1},
          {"ema_before", record.ema_before},
          {"checkpoint", record.checkpoint}};
}

}  // namespace spanmeta::seqlab
