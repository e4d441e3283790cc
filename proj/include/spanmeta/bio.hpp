#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spanmeta/corpus.hpp"

namespace spanmeta {

using LabelId = int;

// The BIO alphabet for an ordered span-type inventory:
//   0 = O, 2i+1 = B-<type i>, 2i+2 = I-<type i>.
class LabelSet {
 public:
  static constexpr LabelId kOutside = 0;

  explicit LabelSet(std::vector<std::string> span_types);

  std::size_t size() const { return 2 * types_.size() + 1; }
  const std::vector<std::string>& span_types() const { return types_; }

  std::optional<std::size_t> type_index(std::string_view type) const;
  LabelId begin_label(std::size_t type_index) const;
  LabelId inside_label(std::size_t type_index) const;

  bool is_outside(LabelId label) const { return label == kOutside; }
  bool is_begin(LabelId label) const { return label > 0 && label % 2 == 1; }
  bool is_inside(LabelId label) const { return label > 0 && label % 2 == 0; }
  // Type index of a B or I label.
  std::size_t type_of(LabelId label) const;

  std::string name(LabelId label) const;
  // Throws ValidationError for names outside the alphabet.
  LabelId parse(std::string_view name) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> types_;
};

using BioSequence = std::vector<LabelId>;

enum class DecodeMode {
  strict,   // I-t must continue a running t-span
  lenient,  // a stray I-t opens a new span, as if it were B-t
};

BioSequence bio_encode(const Document& doc, const LabelSet& labels);

std::vector<Span> bio_decode(const BioSequence& seq, const LabelSet& labels,
                             DecodeMode mode);

// Convenience for tests and the CoNLL reader.
BioSequence parse_labels(const std::vector<std::string>& names,
                         const LabelSet& labels);
std::vector<std::string> label_names(const BioSequence& seq,
                                     const LabelSet& labels);

}  // namespace spanmeta
