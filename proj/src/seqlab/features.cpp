#include "spanmeta/seqlab/features.hpp"

#include "spanmeta/error.hpp"

namespace spanmeta::seqlab {

FeatureIndex::FeatureIndex() { add(std::string(kUnkName)); }

int FeatureIndex::add(const std::string& name) {
  auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

FeatureIndex FeatureIndex::fit(const Corpus& corpus, bool surface_features) {
  FeatureIndex index;
  index.surface_features_ = surface_features;
  for (const Document& doc : corpus.documents()) {
    for (const Token& tok : doc.tokens()) {
      if (surface_features) {
        index.add(std::string(kSurfacePrefix) + tok.surface());
      }
      for (const auto& f : tok.features()) index.add(f);
    }
  }
  return index;
}

FeatureIndex FeatureIndex::from_names(std::vector<std::string> names,
                                      bool surface_features) {
  if (names.empty() || names.front() != kUnkName) {
    throw ValidationError("feature index must start with " +
                          std::string(kUnkName));
  }
  FeatureIndex index;
  index.surface_features_ = surface_features;
  for (std::size_t i = 1; i < names.size(); ++i) {
    if (index.add(names[i]) != static_cast<int>(i)) {
      throw ValidationError("duplicate feature name '" + names[i] + "'");
    }
  }
  return index;
}

int FeatureIndex::lookup(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  return it == ids_.end() ? kUnk : it->second;
}

EncodedSequence FeatureIndex::encode(const Document& doc) const {
  EncodedSequence seq;
  seq.reserve(doc.size());
  for (const Token& tok : doc.tokens()) {
    TokenFeatures tf;
    if (surface_features_) {
      tf.fixed.push_back(lookup(std::string(kSurfacePrefix) + tok.surface()));
    }
    tf.bag.reserve(tok.features().size());
    for (const auto& f : tok.features()) tf.bag.push_back(lookup(f));
    seq.push_back(std::move(tf));
  }
  return seq;
}

std::vector<int> drop_features(std::span<const int> bag, double drop_prob,
                               Rng& rng) {
  std::vector<int> kept;
  kept.reserve(bag.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int id : bag) {
    if (unit(rng) >= drop_prob) kept.push_back(id);
  }
  return kept;
}

FeatureSequence all_features(const EncodedSequence& seq) {
  FeatureSequence out;
  out.reserve(seq.size());
  for (const TokenFeatures& tf : seq) {
    std::vector<int> ids = tf.fixed;
    ids.insert(ids.end(), tf.bag.begin(), tf.bag.end());
    out.push_back(std::move(ids));
  }
  return out;
}

FeatureSequence with_dropout(const EncodedSequence& seq, double drop_prob,
                             Rng& rng) {
  FeatureSequence out;
  out.reserve(seq.size());
  for (const TokenFeatures& tf : seq) {
    std::vector<int> ids = tf.fixed;
    auto kept = drop_features(tf.bag, drop_prob, rng);
    ids.insert(ids.end(), kept.begin(), kept.end());
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace spanmeta::seqlab
