#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spanmeta/corpus.hpp"

namespace spanmeta::seqlab {

using Rng = std::mt19937_64;

// Active feature ids of one token. `fixed` holds the surface-identity
// indicator, which stands in for a word embedding and is never dropped;
// `bag` holds the token's feature-bag ids, subject to feature dropout.
struct TokenFeatures {
  std::vector<int> fixed;
  std::vector<int> bag;
};

using EncodedSequence = std::vector<TokenFeatures>;
// Flattened active ids per token, as consumed by the models.
using FeatureSequence = std::vector<std::vector<int>>;

// Feature-name -> dense id map, frozen after fitting. Id 0 is the shared
// UNK id that every unseen name maps to.
class FeatureIndex {
 public:
  static constexpr int kUnk = 0;
  static constexpr std::string_view kUnkName = "<unk>";
  static constexpr std::string_view kSurfacePrefix = "w=";

  FeatureIndex();

  static FeatureIndex fit(const Corpus& corpus, bool surface_features);
  // Rebuilds from serialized names; names[0] must be the UNK name.
  static FeatureIndex from_names(std::vector<std::string> names,
                                 bool surface_features);

  int lookup(std::string_view name) const;
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool surface_features() const { return surface_features_; }

  EncodedSequence encode(const Document& doc) const;

 private:
  int add(const std::string& name);

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  bool surface_features_ = true;
};

// Keeps each id independently with probability 1 - drop_prob.
std::vector<int> drop_features(std::span<const int> bag, double drop_prob,
                               Rng& rng);

// All features active (evaluation time).
FeatureSequence all_features(const EncodedSequence& seq);
FeatureSequence with_dropout(const EncodedSequence& seq, double drop_prob,
                             Rng& rng);

}  // namespace spanmeta::seqlab
