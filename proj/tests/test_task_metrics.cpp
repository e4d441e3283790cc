#include <doctest.h>

#include <cmath>

#include "spanmeta/error.hpp"
#include "spanmeta/task_metrics.hpp"
#include "support.hpp"

using namespace spanmeta;
using namespace spanmeta::metrics;

namespace {

Document doc_of(std::vector<std::string> words, std::vector<Span> spans,
                std::string id = "d") {
  std::vector<Token> tokens;
  for (auto& w : words) tokens.emplace_back(w);
  return Document(std::move(id), std::move(tokens), std::move(spans));
}

Corpus corpus_of(std::vector<Document> docs, std::vector<std::string> types,
                 Partition p = Partition::train) {
  return Corpus(std::move(docs), std::move(types), p);
}

}  // namespace

TEST_CASE("unigram_dist examples") {
  std::vector<std::string> aabb{"a", "a", "b", "b"};
  auto d = unigram_dist(aabb);
  CHECK(d.probability("a") == 0.5);
  CHECK(d.probability("b") == 0.5);
  std::vector<std::string> a{"a"};
  CHECK(unigram_dist(a).probability("a") == 1.0);
  std::vector<std::string> aaab{"a", "a", "a", "b"};
  CHECK(unigram_dist(aaab).probability("a") == 0.75);
  CHECK(unigram_dist(aaab).probability("b") == 0.25);
  std::vector<std::string> none;
  CHECK_THROWS_AS(unigram_dist(none), ValidationError);
}

TEST_CASE("span_frequency examples") {
  const Corpus c = corpus_of(
      {doc_of({"x", "y", "z", "w"}, {{"A", 0, 1}, {"A", 2, 3}}),
       doc_of({"x"}, {{"A", 0, 1}})},
      {"A", "B"});
  CHECK(span_frequency(c, "A") == 3);
  CHECK(span_frequency(c, "B") == 0);
  CHECK_THROWS_AS(span_frequency(c, "C"), ValidationError);
  const Corpus dev = corpus_of({doc_of({"x"}, {{"A", 0, 1}})}, {"A"},
                               Partition::dev);
  CHECK_THROWS_AS(span_frequency(dev, "A"), ValidationError);
}

TEST_CASE("geometric_mean_length examples") {
  const Corpus c = corpus_of(
      {doc_of({"a", "b", "c", "d", "e", "f", "g", "h"},
              {{"A", 0, 1}, {"A", 1, 3}, {"A", 3, 7}, {"B", 7, 8}})},
      {"A", "B", "C"});
  CHECK(geometric_mean_length(c, "A") == doctest::Approx(2.0).epsilon(1e-14));
  const Corpus five = corpus_of({doc_of({"a", "b", "c", "d", "e"}, {{"A", 0, 5}})},
                                {"A"});
  CHECK(geometric_mean_length(five, "A") == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_THROWS_AS(geometric_mean_length(c, "C"), ValidationError);
}

TEST_CASE("distinctiveness hand-computed examples") {
  // "a a b b", one span over the two a's.
  const Corpus c = corpus_of({doc_of({"a", "a", "b", "b"}, {{"A", 0, 2}})}, {"A"});
  CHECK(span_distinctiveness(c, "A") == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(boundary_distinctiveness(c, "A") ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  // A span covering the whole corpus has P_span == P.
  const Corpus same = corpus_of({doc_of({"a", "b", "a", "b"}, {{"A", 0, 4}})}, {"A"});
  CHECK(span_distinctiveness(same, "A") == doctest::Approx(0.0));

  // Boundary tokens {b, a} in a corpus of equal halves.
  const Corpus flat = corpus_of({doc_of({"b", "a", "b", "a"}, {{"A", 1, 3}})}, {"A"});
  CHECK(boundary_distinctiveness(flat, "A") == doctest::Approx(0.0));

  const Corpus bd0 = corpus_of({doc_of({"a", "b", "x", "a", "b"}, {{"A", 2, 3}}),
                                doc_of({"x"}, {})},
                               {"A"});
  // boundary {b, a}; corpus {a:2, b:2, x:2}: KL = ln(0.5 / (1/3)).
  CHECK(boundary_distinctiveness(bd0, "A") ==
        doctest::Approx(std::log(1.5)).epsilon(1e-14));
  const Corpus equal = corpus_of({doc_of({"a", "x", "b"}, {{"A", 1, 2}}),
                                  doc_of({"a", "b"}, {})},
                                 {"A"});
  // boundary {a, b}, corpus {a:2, b:2, x:1}: KL = ln(0.5 / 0.4).
  CHECK(boundary_distinctiveness(equal, "A") ==
        doctest::Approx(std::log(1.25)).epsilon(1e-14));
}

TEST_CASE("boundary distribution undefined when spans fill their documents") {
  const Corpus c = corpus_of({doc_of({"a", "b"}, {{"A", 0, 2}}), doc_of({"c"}, {})},
                             {"A"});
  try {
    boundary_distinctiveness(c, "A");
    FAIL("undefined boundary distribution accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("boundary distribution undefined") !=
          std::string::npos);
  }
  const auto p = profile_span_type(c, "A");
  CHECK(p.frequency == 1);
  CHECK(p.span_length == doctest::Approx(2.0));
  CHECK(std::isfinite(p.span_distinctiveness));
  CHECK_FALSE(p.boundary_distinctiveness.has_value());
}

TEST_CASE("dataset_profile weighting") {
  SpanTypeProfile a{"a", 10, 2.0, 1.0, 0.5};
  SpanTypeProfile b{"b", 30, 4.0, 3.0, 1.5};
  const std::vector<SpanTypeProfile> one{a};
  const auto self = dataset_profile(one);
  CHECK(self.frequency == doctest::Approx(10.0));
  CHECK(self.span_length == doctest::Approx(2.0));
  CHECK(self.boundary_distinctiveness == doctest::Approx(0.5));
  const std::vector<SpanTypeProfile> two{a, b};
  const auto both = dataset_profile(two);
  CHECK(both.frequency == doctest::Approx((100.0 + 900.0) / 40.0));
  CHECK(both.span_length == doctest::Approx((20.0 + 120.0) / 40.0));
  CHECK(both.span_distinctiveness == doctest::Approx((10.0 + 90.0) / 40.0));
  CHECK(both.boundary_distinctiveness == doctest::Approx((5.0 + 45.0) / 40.0));
  const std::vector<SpanTypeProfile> none;
  CHECK_THROWS_AS(dataset_profile(none), ValidationError);
}

TEST_CASE("property: metrics match the rational-arithmetic oracle") {
  testing::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Corpus c = testing::random_corpus(rng);
    for (const auto& type : c.span_types()) {
      const auto oracle = testing::rational_profile(c, type);
      REQUIRE(span_frequency(c, type) == oracle.frequency);
      if (oracle.frequency == 0) continue;
      CHECK(std::fabs(geometric_mean_length(c, type) -
                      static_cast<double>(oracle.span_length)) < 1e-12);
      const double sd = span_distinctiveness(c, type);
      CHECK(std::fabs(sd - static_cast<double>(oracle.span_distinctiveness)) <
            1e-12);
      CHECK(sd >= 0.0);
      if (oracle.boundary_defined) {
        const double bd = boundary_distinctiveness(c, type);
        CHECK(std::fabs(bd - static_cast<double>(
                                 oracle.boundary_distinctiveness)) < 1e-12);
        CHECK(bd >= 0.0);
      } else {
        CHECK_THROWS_AS(boundary_distinctiveness(c, type), ValidationError);
      }
    }
  }
}

TEST_CASE("property: duplicating every document doubles only frequency") {
  testing::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus c = testing::random_corpus(rng, 30, 2);
    std::vector<Document> docs = c.documents();
    for (const auto& d : c.documents()) {
      docs.emplace_back(d.id() + "-copy", d.tokens(), d.spans());
    }
    const Corpus doubled(docs, c.span_types());
    for (const auto& p : profile_corpus(c)) {
      const auto q = profile_span_type(doubled, p.type_id);
      CHECK(q.frequency == 2 * p.frequency);
      CHECK(q.span_length == doctest::Approx(p.span_length).epsilon(1e-12));
      CHECK(q.span_distinctiveness ==
            doctest::Approx(p.span_distinctiveness).epsilon(1e-12));
      REQUIRE(q.boundary_distinctiveness.has_value() ==
              p.boundary_distinctiveness.has_value());
      if (p.boundary_distinctiveness) {
        CHECK(*q.boundary_distinctiveness ==
              doctest::Approx(*p.boundary_distinctiveness).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("kl_divergence requires nested supports") {
  std::vector<std::string> p{"a", "z"}, q{"a", "b"};
  CHECK_THROWS_AS(kl_divergence(unigram_dist(p), unigram_dist(q)),
                  ValidationError);
  CHECK(kl_divergence(unigram_dist(q), unigram_dist(q)) == 0.0);
}
