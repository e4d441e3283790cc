#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spanmeta/corpus.hpp"

namespace spanmeta::eval {

struct MatchCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  MatchCounts& operator+=(const MatchCounts& other);
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

// Per-type exact-match counts. Merging is associative and commutative.
class EvalCounts {
 public:
  MatchCounts& operator[](const std::string& type) { return by_type_[type]; }
  MatchCounts at(const std::string& type) const;
  const std::map<std::string, MatchCounts>& by_type() const { return by_type_; }
  MatchCounts total() const;

  EvalCounts& operator+=(const EvalCounts& other);
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;

 private:
  std::map<std::string, MatchCounts> by_type_;
};

// A predicted span is a true positive iff an unmatched gold span with the
// same (type, start, end) exists; duplicates beyond the first are false
// positives.
EvalCounts count_matches(std::span<const Span> gold, std::span<const Span> pred);

// Documents are paired by position; ids and lengths must agree.
EvalCounts count_matches(const Corpus& gold, const Corpus& pred);

struct Scores {
  double precision = 0.0;  // percentages in [0, 100]
  double recall = 0.0;
  double f1 = 0.0;
  MatchCounts counts;
};

Scores score(const MatchCounts& counts);

struct F1Report {
  std::map<std::string, Scores> per_type;
  Scores micro;
};

// Per-type scores for every type in `included` (all counted types when
// empty); the micro average sums the counts of those types.
F1Report f1_report(const EvalCounts& counts,
                   std::span<const std::string> included = {});

// Cell-wise arithmetic mean of P/R/F1; counts are pooled. All reports must
// cover the same types.
F1Report average_trials(std::span<const F1Report> reports);

}  // namespace spanmeta::eval
