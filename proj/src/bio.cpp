#include "spanmeta/bio.hpp"

#include <algorithm>

#include "spanmeta/error.hpp"

namespace spanmeta {

LabelSet::LabelSet(std::vector<std::string> span_types)
    : types_(std::move(span_types)) {}

std::optional<std::size_t> LabelSet::type_index(std::string_view type) const {
  auto it = std::find(types_.begin(), types_.end(), type);
  if (it == types_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - types_.begin());
}

LabelId LabelSet::begin_label(std::size_t type_index) const {
  return static_cast<LabelId>(2 * type_index + 1);
}

LabelId LabelSet::inside_label(std::size_t type_index) const {
  return static_cast<LabelId>(2 * type_index + 2);
}

std::size_t LabelSet::type_of(LabelId label) const {
  return static_cast<std::size_t>((label - 1) / 2);
}

std::string LabelSet::name(LabelId label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= size()) {
    throw ValidationError("label id " + std::to_string(label) +
                          " outside the alphabet of size " +
                          std::to_string(size()));
  }
  if (label == kOutside) return "O";
  return (is_begin(label) ? "B-" : "I-") + types_[type_of(label)];
}

LabelId LabelSet::parse(std::string_view name) const {
  if (name == "O") return kOutside;
  if (name.size() > 2 && name[1] == '-' && (name[0] == 'B' || name[0] == 'I')) {
    if (auto idx = type_index(name.substr(2))) {
      return name[0] == 'B' ? begin_label(*idx) : inside_label(*idx);
    }
  }
  throw ValidationError("label '" + std::string(name) +
                        "' is not in the BIO alphabet");
}

BioSequence bio_encode(const Document& doc, const LabelSet& labels) {
  BioSequence seq(doc.size(), LabelSet::kOutside);
  for (const Span& span : doc.spans()) {
    auto idx = labels.type_index(span.type);
    if (!idx) {
      throw ValidationError("unknown span type '" + span.type +
                            "' in document '" + doc.id() + "'");
    }
    seq[span.start] = labels.begin_label(*idx);
    for (std::size_t t = span.start + 1; t < span.end; ++t) {
      seq[t] = labels.inside_label(*idx);
    }
  }
  return seq;
}

std::vector<Span> bio_decode(const BioSequence& seq, const LabelSet& labels,
                             DecodeMode mode) {
  std::vector<Span> spans;
  bool open = false;
  std::size_t open_type = 0;
  auto close = [&](std::size_t end) {
    if (open) spans.back().end = end;
    open = false;
  };
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const LabelId label = seq[t];
    if (label < 0 || static_cast<std::size_t>(label) >= labels.size()) {
      throw ValidationError("label id " + std::to_string(label) +
                            " at position " + std::to_string(t) +
                            " outside the alphabet");
    }
    if (labels.is_outside(label)) {
      close(t);
      continue;
    }
    const std::size_t type = labels.type_of(label);
    if (labels.is_inside(label) && open && type == open_type) continue;
    if (labels.is_inside(label) && mode == DecodeMode::strict) {
      throw ValidationError(
          "stray " + labels.name(label) + " at position " + std::to_string(t) +
          (open ? " after a " + labels.span_types()[open_type] + " span"
                : " outside any span"));
    }
    close(t);
    spans.push_back({labels.span_types()[type], t, t + 1});
    open = true;
    open_type = type;
  }
  close(seq.size());
  return spans;
}

BioSequence parse_labels(const std::vector<std::string>& names,
                         const LabelSet& labels) {
  BioSequence seq;
  seq.reserve(names.size());
  for (const auto& name : names) seq.push_back(labels.parse(name));
  return seq;
}

std::vector<std::string> label_names(const BioSequence& seq,
                                     const LabelSet& labels) {
  std::vector<std::string> names;
  names.reserve(seq.size());
  for (LabelId label : seq) names.push_back(labels.name(label));
  return names;
}

}  // namespace spanmeta
