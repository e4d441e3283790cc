#include "spanmeta/corpus.hpp"

#include <algorithm>
#include <set>

#include "spanmeta/error.hpp"

namespace spanmeta {

Token::Token(std::string surface, std::vector<std::string> features)
    : surface_(std::move(surface)), features_(std::move(features)) {
  if (surface_.empty()) throw ValidationError("token surface must be non-empty");
  std::sort(features_.begin(), features_.end());
  features_.erase(std::unique(features_.begin(), features_.end()),
                  features_.end());
}

Document::Document(std::string id, std::vector<Token> tokens,
                   std::vector<Span> spans)
    : id_(std::move(id)), tokens_(std::move(tokens)), spans_(std::move(spans)) {
  for (const Span& span : spans_) {
    if (span.start >= span.end || span.end > tokens_.size()) {
      throw ValidationError("document '" + id_ + "': span " + span.type + " [" +
                            std::to_string(span.start) + ", " +
                            std::to_string(span.end) +
                            ") is outside the token range of length " +
                            std::to_string(tokens_.size()));
    }
  }
  std::sort(spans_.begin(), spans_.end(), [](const Span& a, const Span& b) {
    return a.start < b.start;
  });
  for (std::size_t i = 1; i < spans_.size(); ++i) {
    if (spans_[i].start < spans_[i - 1].end) {
      throw ValidationError("document '" + id_ + "': spans [" +
                            std::to_string(spans_[i - 1].start) + ", " +
                            std::to_string(spans_[i - 1].end) + ") and [" +
                            std::to_string(spans_[i].start) + ", " +
                            std::to_string(spans_[i].end) + ") overlap");
    }
  }
}

std::string_view to_string(Partition partition) {
  switch (partition) {
    case Partition::train: return "train";
    case Partition::dev: return "dev";
    case Partition::test: return "test";
  }
  return "train";
}

Partition parse_partition(std::string_view name) {
  if (name == "train") return Partition::train;
  if (name == "dev") return Partition::dev;
  if (name == "test") return Partition::test;
  throw ValidationError("unknown partition '" + std::string(name) + "'");
}

Corpus::Corpus(std::vector<Document> documents,
               std::vector<std::string> span_types, Partition partition)
    : documents_(std::move(documents)),
      span_types_(std::move(span_types)),
      partition_(partition) {
  std::set<std::string_view> seen;
  for (const auto& type : span_types_) {
    if (!seen.insert(type).second) {
      throw ValidationError("span type '" + type + "' listed twice");
    }
  }
  for (const Document& doc : documents_) {
    for (const Span& span : doc.spans()) {
      if (!seen.contains(span.type)) {
        throw ValidationError("document '" + doc.id() + "': span type '" +
                              span.type + "' is not in the inventory");
      }
    }
  }
}

Corpus Corpus::with_inferred_types(std::vector<Document> documents,
                                   Partition partition) {
  std::set<std::string> types;
  for (const Document& doc : documents) {
    for (const Span& span : doc.spans()) types.insert(span.type);
  }
  return Corpus(std::move(documents), {types.begin(), types.end()}, partition);
}

bool Corpus::has_type(std::string_view type) const {
  return std::find(span_types_.begin(), span_types_.end(), type) !=
         span_types_.end();
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const Document& doc : documents_) n += doc.size();
  return n;
}

}  // namespace spanmeta
