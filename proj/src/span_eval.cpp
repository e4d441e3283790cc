#include "spanmeta/span_eval.hpp"

#include <algorithm>

#include "spanmeta/error.hpp"

namespace spanmeta::eval {

MatchCounts& MatchCounts::operator+=(const MatchCounts& other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  return *this;
}

MatchCounts EvalCounts::at(const std::string& type) const {
  auto it = by_type_.find(type);
  return it == by_type_.end() ? MatchCounts{} : it->second;
}

MatchCounts EvalCounts::total() const {
  MatchCounts sum;
  for (const auto& [type, c] : by_type_) sum += c;
  return sum;
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& other) {
  for (const auto& [type, c] : other.by_type_) by_type_[type] += c;
  return *this;
}

EvalCounts count_matches(std::span<const Span> gold,
                         std::span<const Span> pred) {
  EvalCounts counts;
  std::vector<Span> unmatched(gold.begin(), gold.end());
  std::sort(unmatched.begin(), unmatched.end());
  std::vector<bool> used(unmatched.size(), false);
  for (const Span& p : pred) {
    auto [lo, hi] = std::equal_range(unmatched.begin(), unmatched.end(), p);
    bool matched = false;
    for (auto it = lo; it != hi; ++it) {
      auto idx = static_cast<std::size_t>(it - unmatched.begin());
      if (!used[idx]) {
        used[idx] = true;
        matched = true;
        break;
      }
    }
    if (matched) {
      ++counts[p.type].true_positives;
    } else {
      ++counts[p.type].false_positives;
    }
  }
  for (std::size_t i = 0; i < unmatched.size(); ++i) {
    if (!used[i]) ++counts[unmatched[i].type].false_negatives;
  }
  return counts;
}

EvalCounts count_matches(const Corpus& gold, const Corpus& pred) {
  if (gold.documents().size() != pred.documents().size()) {
    throw ValidationError("gold has " + std::to_string(gold.documents().size()) +
                          " documents, prediction has " +
                          std::to_string(pred.documents().size()));
  }
  EvalCounts counts;
  for (const auto& type : gold.span_types()) counts[type];
  for (std::size_t d = 0; d < gold.documents().size(); ++d) {
    const Document& g = gold.documents()[d];
    const Document& p = pred.documents()[d];
    if (g.id() != p.id() || g.size() != p.size()) {
      throw ValidationError("document " + std::to_string(d + 1) +
                            ": gold '" + g.id() + "' and prediction '" +
                            p.id() + "' do not align");
    }
    counts += count_matches(g.spans(), p.spans());
  }
  return counts;
}

Scores score(const MatchCounts& c) {
  Scores s;
  s.counts = c;
  const auto tp = static_cast<double>(c.true_positives);
  if (c.true_positives + c.false_positives > 0) {
    s.precision = 100.0 * tp / static_cast<double>(c.true_positives +
                                                   c.false_positives);
  }
  if (c.true_positives + c.false_negatives > 0) {
    s.recall = 100.0 * tp / static_cast<double>(c.true_positives +
                                                c.false_negatives);
  }
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

F1Report f1_report(const EvalCounts& counts,
                   std::span<const std::string> included) {
  F1Report report;
  MatchCounts micro;
  auto add = [&](const std::string& type) {
    const MatchCounts c = counts.at(type);
    report.per_type[type] = score(c);
    micro += c;
  };
  if (included.empty()) {
    for (const auto& [type, c] : counts.by_type()) add(type);
  } else {
    for (const auto& type : included) add(type);
  }
  report.micro = score(micro);
  return report;
}

F1Report average_trials(std::span<const F1Report> reports) {
  if (reports.empty()) throw ValidationError("no reports to average");
  F1Report mean;
  const double n = static_cast<double>(reports.size());
  auto accumulate = [n](Scores& into, const Scores& s) {
    into.precision += s.precision / n;
    into.recall += s.recall / n;
    into.f1 += s.f1 / n;
    into.counts += s.counts;
  };
  for (const F1Report& r : reports) {
    if (r.per_type.size() != reports.front().per_type.size()) {
      throw ValidationError("trial reports cover different span types");
    }
    for (const auto& [type, s] : r.per_type) {
      if (!reports.front().per_type.contains(type)) {
        throw ValidationError("span type '" + type +
                              "' missing from the first trial report");
      }
      accumulate(mean.per_type[type], s);
    }
    accumulate(mean.micro, r.micro);
  }
  return mean;
}

}  // namespace spanmeta::eval
