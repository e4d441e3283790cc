#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace spanmeta {

// A pre-tokenized word with an optional bag of feature names. Features are
// kept sorted and unique, so two tokens compare equal iff their bags match.
class Token {
 public:
  explicit Token(std::string surface, std::vector<std::string> features = {});

  const std::string& surface() const { return surface_; }
  const std::vector<std::string>& features() const { return features_; }

  friend bool operator==(const Token&, const Token&) = default;

 private:
  std::string surface_;
  std::vector<std::string> features_;
};

// Typed half-open token range [start, end).
struct Span {
  std::string type;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }

  friend auto operator<=>(const Span&, const Span&) = default;
};

// Tokens plus non-overlapping spans. Validated on construction; spans are
// stored ordered by start position.
class Document {
 public:
  Document(std::string id, std::vector<Token> tokens, std::vector<Span> spans);

  const std::string& id() const { return id_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<Span>& spans() const { return spans_; }
  std::size_t size() const { return tokens_.size(); }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::string id_;
  std::vector<Token> tokens_;
  std::vector<Span> spans_;
};

enum class Partition { train, dev, test };

std::string_view to_string(Partition partition);
Partition parse_partition(std::string_view name);

class Corpus {
 public:
  // Every span type must appear in `span_types`, which must be free of
  // duplicates.
  Corpus(std::vector<Document> documents, std::vector<std::string> span_types,
         Partition partition = Partition::train);

  // Inventory is the sorted set of span types used by `documents`.
  static Corpus with_inferred_types(std::vector<Document> documents,
                                    Partition partition = Partition::train);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<std::string>& span_types() const { return span_types_; }
  Partition partition() const { return partition_; }
  bool has_type(std::string_view type) const;
  std::size_t token_count() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<Document> documents_;
  std::vector<std::string> span_types_;
  Partition partition_;
};

}  // namespace spanmeta
