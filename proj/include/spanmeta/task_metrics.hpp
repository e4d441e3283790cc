#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spanmeta/corpus.hpp"

namespace spanmeta::metrics {

// Maximum-likelihood unigram distribution. Counts are kept so that
// divergences can be evaluated from exact integer ratios.
class UnigramDistribution {
 public:
  UnigramDistribution() = default;

  void add(std::string_view word, std::size_t count = 1);

  std::size_t total() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::size_t count(std::string_view word) const;
  double probability(std::string_view word) const;
  const std::map<std::string, std::size_t, std::less<>>& counts() const {
    return counts_;
  }

 private:
  std::map<std::string, std::size_t, std::less<>> counts_;
  std::size_t total_ = 0;
};

// Throws ValidationError on an empty multiset.
UnigramDistribution unigram_dist(std::span<const std::string> tokens);

// D_KL(p || q) in nats. The support of p must be contained in q's.
double kl_divergence(const UnigramDistribution& p, const UnigramDistribution& q);

struct SpanTypeProfile {
  std::string type_id;
  std::size_t frequency = 0;
  double span_length = 0.0;  // geometric mean, tokens
  double span_distinctiveness = 0.0;
  // Undefined when every span of the type touches both document edges.
  std::optional<double> boundary_distinctiveness;
};

// Frequency-weighted roll-up of per-type profiles.
struct DatasetProfile {
  double frequency = 0.0;  // sum f^2 / sum f
  double span_length = 0.0;
  double span_distinctiveness = 0.0;
  double boundary_distinctiveness = 0.0;
};

// All corpus-level operations require a training-partition corpus and a
// type from its inventory.
std::size_t span_frequency(const Corpus& corpus, std::string_view type);
double geometric_mean_length(const Corpus& corpus, std::string_view type);
double span_distinctiveness(const Corpus& corpus, std::string_view type);
double boundary_distinctiveness(const Corpus& corpus, std::string_view type);

// Tokens inside spans of `type`, pooled over all its spans.
UnigramDistribution span_distribution(const Corpus& corpus,
                                      std::string_view type);
// Tokens directly before each span start and directly after each span end,
// skipping neighbours that fall outside the document.
UnigramDistribution boundary_distribution(const Corpus& corpus,
                                          std::string_view type);
UnigramDistribution corpus_distribution(const Corpus& corpus);

SpanTypeProfile profile_span_type(const Corpus& corpus, std::string_view type);
// Profiles every inventory type that has at least one span.
std::vector<SpanTypeProfile> profile_corpus(const Corpus& corpus);

// Boundary distinctiveness is averaged over the profiles that define it.
DatasetProfile dataset_profile(std::span<const SpanTypeProfile> profiles);

}  // namespace spanmeta::metrics
