#include "spanmeta/task_metrics.hpp"

#include <cmath>

#include "spanmeta/error.hpp"

namespace spanmeta::metrics {
namespace {

void require_train_type(const Corpus& corpus, std::string_view type) {
  if (corpus.partition() != Partition::train) {
    throw ValidationError(
        "span-type metrics are defined on the training partition, got '" +
        std::string(to_string(corpus.partition())) + "'");
  }
  if (!corpus.has_type(type)) {
    throw ValidationError("unknown span type '" + std::string(type) + "'");
  }
}

template <typename Fn>
void for_each_span(const Corpus& corpus, std::string_view type, Fn&& fn) {
  for (const Document& doc : corpus.documents()) {
    for (const Span& span : doc.spans()) {
      if (span.type == type) fn(doc, span);
    }
  }
}

double span_distinctiveness_with(const Corpus& corpus, std::string_view type,
                                 const UnigramDistribution& background) {
  auto p = span_distribution(corpus, type);
  if (p.empty()) {
    throw ValidationError("span distinctiveness undefined: type '" +
                          std::string(type) + "' has no spans");
  }
  return kl_divergence(p, background);
}

std::optional<double> boundary_distinctiveness_with(
    const Corpus& corpus, std::string_view type,
    const UnigramDistribution& background) {
  auto p = boundary_distribution(corpus, type);
  if (p.empty()) return std::nullopt;
  return kl_divergence(p, background);
}

}  // namespace

void UnigramDistribution::add(std::string_view word, std::size_t count) {
  if (count == 0) return;
  auto it = counts_.find(word);
  if (it == counts_.end()) {
    counts_.emplace(std::string(word), count);
  } else {
    it->second += count;
  }
  total_ += count;
}

std::size_t UnigramDistribution::count(std::string_view word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

double UnigramDistribution::probability(std::string_view word) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(word)) / static_cast<double>(total_);
}

UnigramDistribution unigram_dist(std::span<const std::string> tokens) {
  if (tokens.empty()) {
    throw ValidationError("unigram distribution of an empty multiset");
  }
  UnigramDistribution dist;
  for (const auto& tok : tokens) dist.add(tok);
  return dist;
}

double kl_divergence(const UnigramDistribution& p,
                     const UnigramDistribution& q) {
  if (p.empty() || q.empty()) {
    throw ValidationError("KL divergence of an empty distribution");
  }
  // sum_w p(w) [ln c_p(w) - ln N_p - ln c_q(w) + ln N_q]
  const double log_ratio_totals =
      std::log(static_cast<double>(q.total())) -
      std::log(static_cast<double>(p.total()));
  double kl = 0.0;
  for (const auto& [word, cp] : p.counts()) {
    const std::size_t cq = q.count(word);
    if (cq == 0) {
      throw ValidationError("KL divergence undefined: '" + word +
                            "' is outside the reference support");
    }
    const double pw = static_cast<double>(cp) / static_cast<double>(p.total());
    kl += pw * (std::log(static_cast<double>(cp)) -
                std::log(static_cast<double>(cq)) + log_ratio_totals);
  }
  return kl < 0.0 ? 0.0 : kl;
}

UnigramDistribution corpus_distribution(const Corpus& corpus) {
  UnigramDistribution dist;
  for (const Document& doc : corpus.documents()) {
    for (const Token& tok : doc.tokens()) dist.add(tok.surface());
  }
  return dist;
}

UnigramDistribution span_distribution(const Corpus& corpus,
                                      std::string_view type) {
  UnigramDistribution dist;
  for_each_span(corpus, type, [&](const Document& doc, const Span& span) {
    for (std::size_t t = span.start; t < span.end; ++t) {
      dist.add(doc.tokens()[t].surface());
    }
  });
  return dist;
}

UnigramDistribution boundary_distribution(const Corpus& corpus,
                                          std::string_view type) {
  UnigramDistribution dist;
  for_each_span(corpus, type, [&](const Document& doc, const Span& span) {
    if (span.start > 0) dist.add(doc.tokens()[span.start - 1].surface());
    if (span.end < doc.size()) dist.add(doc.tokens()[span.end].surface());
  });
  return dist;
}

std::size_t span_frequency(const Corpus& corpus, std::string_view type) {
  require_train_type(corpus, type);
  std::size_t n = 0;
  for_each_span(corpus, type, [&](const Document&, const Span&) { ++n; });
  return n;
}

double geometric_mean_length(const Corpus& corpus, std::string_view type) {
  require_train_type(corpus, type);
  double log_sum = 0.0;
  std::size_t n = 0;
  for_each_span(corpus, type, [&](const Document&, const Span& span) {
    log_sum += std::log(static_cast<double>(span.length()));
    ++n;
  });
  if (n == 0) {
    throw ValidationError("span length undefined: type '" + std::string(type) +
                          "' has no spans");
  }
  return std::exp(log_sum / static_cast<double>(n));
}

double span_distinctiveness(const Corpus& corpus, std::string_view type) {
  require_train_type(corpus, type);
  return span_distinctiveness_with(corpus, type, corpus_distribution(corpus));
}

double boundary_distinctiveness(const Corpus& corpus, std::string_view type) {
  require_train_type(corpus, type);
  auto bd = boundary_distinctiveness_with(corpus, type,
                                          corpus_distribution(corpus));
  if (!bd) {
    throw ValidationError("boundary distribution undefined for type '" +
                          std::string(type) + "'");
  }
  return *bd;
}

SpanTypeProfile profile_span_type(const Corpus& corpus, std::string_view type) {
  SpanTypeProfile profile;
  profile.type_id = std::string(type);
  profile.frequency = span_frequency(corpus, type);
  profile.span_length = geometric_mean_length(corpus, type);
  const auto background = corpus_distribution(corpus);
  profile.span_distinctiveness =
      span_distinctiveness_with(corpus, type, background);
  profile.boundary_distinctiveness =
      boundary_distinctiveness_with(corpus, type, background);
  return profile;
}

std::vector<SpanTypeProfile> profile_corpus(const Corpus& corpus) {
  std::vector<SpanTypeProfile> profiles;
  for (const auto& type : corpus.span_types()) {
    if (span_frequency(corpus, type) > 0) {
      profiles.push_back(profile_span_type(corpus, type));
    }
  }
  return profiles;
}

DatasetProfile dataset_profile(std::span<const SpanTypeProfile> profiles) {
  if (profiles.empty()) {
    throw ValidationError("dataset profile of an empty profile list");
  }
  double weight = 0.0, bd_weight = 0.0;
  DatasetProfile out;
  for (const SpanTypeProfile& p : profiles) {
    const double f = static_cast<double>(p.frequency);
    weight += f;
    out.frequency += f * f;
    out.span_length += f * p.span_length;
    out.span_distinctiveness += f * p.span_distinctiveness;
    if (p.boundary_distinctiveness) {
      bd_weight += f;
      out.boundary_distinctiveness += f * *p.boundary_distinctiveness;
    }
  }
  if (weight <= 0.0) {
    throw ValidationError("dataset profile needs a span type with frequency > 0");
  }
  out.frequency /= weight;
  out.span_length /= weight;
  out.span_distinctiveness /= weight;
  out.boundary_distinctiveness =
      bd_weight > 0.0 ? out.boundary_distinctiveness / bd_weight
                      : std::nan("");
  return out;
}

}  // namespace spanmeta::metrics
