#include <doctest.h>

#include <sstream>

#include "spanmeta/bio.hpp"
#include "spanmeta/corpus.hpp"
#include "spanmeta/corpus_io.hpp"
#include "spanmeta/error.hpp"
#include "support.hpp"

using namespace spanmeta;

namespace {

Document doc_of(std::vector<std::string> words, std::vector<Span> spans,
                std::string id = "d") {
  std::vector<Token> tokens;
  for (auto& w : words) tokens.emplace_back(w);
  return Document(std::move(id), std::move(tokens), std::move(spans));
}

std::vector<std::string> names(const BioSequence& seq, const LabelSet& ls) {
  return label_names(seq, ls);
}

}  // namespace

TEST_CASE("token and span invariants") {
  CHECK_THROWS_AS(Token(""), ValidationError);
  Token t("x", {"b", "a", "b"});
  CHECK(t.features() == std::vector<std::string>{"a", "b"});
  CHECK(Span{"A", 1, 3}.length() == 2);
}

TEST_CASE("documents reject invalid and overlapping spans") {
  CHECK_THROWS_AS(doc_of({"a", "b"}, {{"A", 1, 1}}), ValidationError);
  CHECK_THROWS_AS(doc_of({"a", "b"}, {{"A", 1, 3}}), ValidationError);
  try {
    doc_of({"a", "b", "c"}, {{"A", 0, 2}, {"B", 1, 3}}, "doc-7");
    FAIL("overlap accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("doc-7") != std::string::npos);
  }
  const Document d = doc_of({"a", "b", "c"}, {{"B", 2, 3}, {"A", 0, 1}});
  CHECK(d.spans().front().start == 0);
}

TEST_CASE("corpus inventory covers every span type") {
  std::vector<Document> docs{doc_of({"a"}, {{"A", 0, 1}})};
  CHECK_THROWS_AS(Corpus(docs, {"B"}), ValidationError);
  CHECK_THROWS_AS(Corpus(docs, {"A", "A"}), ValidationError);
  const Corpus c(docs, {"A", "Z"});
  CHECK(c.has_type("Z"));
  CHECK(Corpus::with_inferred_types(docs).span_types() ==
        std::vector<std::string>{"A"});
}

TEST_CASE("label set has 2n+1 labels") {
  for (std::size_t n = 0; n < 5; ++n) {
    std::vector<std::string> types;
    for (std::size_t i = 0; i < n; ++i) types.push_back("T" + std::to_string(i));
    CHECK(LabelSet(types).size() == 2 * n + 1);
  }
  const LabelSet ls({"A", "B"});
  CHECK(ls.name(0) == "O");
  CHECK(ls.name(ls.begin_label(1)) == "B-B");
  CHECK(ls.parse("I-A") == ls.inside_label(0));
  CHECK_THROWS_AS(ls.parse("I-C"), ValidationError);
}

TEST_CASE("bio_encode examples") {
  const LabelSet ls({"A"});
  CHECK(names(bio_encode(doc_of({"w", "x", "y", "z"}, {{"A", 1, 3}}), ls), ls) ==
        std::vector<std::string>{"O", "B-A", "I-A", "O"});
  CHECK(names(bio_encode(doc_of({"w", "x", "y"}, {}), ls), ls) ==
        std::vector<std::string>{"O", "O", "O"});
  CHECK(names(bio_encode(doc_of({"w", "x"}, {{"A", 0, 1}, {"A", 1, 2}}), ls),
              ls) == std::vector<std::string>{"B-A", "B-A"});
  try {
    bio_encode(doc_of({"w"}, {{"Q", 0, 1}}), ls);
    FAIL("unknown type accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Q") != std::string::npos);
  }
}

TEST_CASE("bio_decode examples") {
  const LabelSet ls({"A", "B"});
  auto labels = [&](std::vector<std::string> v) { return parse_labels(v, ls); };
  CHECK(bio_decode(labels({"O", "B-A", "I-A", "O"}), ls, DecodeMode::strict) ==
        std::vector<Span>{{"A", 1, 3}});
  CHECK(bio_decode(labels({"I-A", "O"}), ls, DecodeMode::lenient) ==
        std::vector<Span>{{"A", 0, 1}});
  CHECK_THROWS_AS(bio_decode(labels({"I-A", "O"}), ls, DecodeMode::strict),
                  ValidationError);
  CHECK(bio_decode(labels({"B-A", "I-B"}), ls, DecodeMode::lenient) ==
        std::vector<Span>{{"A", 0, 1}, {"B", 1, 2}});
  CHECK_THROWS_AS(bio_decode(labels({"B-A", "I-B"}), ls, DecodeMode::strict),
                  ValidationError);
}

TEST_CASE("property: bio round trip over random documents") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Corpus c = testing::random_corpus(rng, 40, 3);
    const LabelSet ls(c.span_types());
    for (const auto& d : c.documents()) {
      const BioSequence seq = bio_encode(d, ls);
      REQUIRE(seq.size() == d.size());
      for (LabelId l : seq) {
        CHECK(l >= 0);
        CHECK(static_cast<std::size_t>(l) < ls.size());
      }
      CHECK(bio_decode(seq, ls, DecodeMode::strict) == d.spans());
      CHECK(bio_decode(seq, ls, DecodeMode::lenient) == d.spans());
    }
  }
}

TEST_CASE("JSONL fixture reads one document") {
  std::istringstream in(
      R"({"id":"s1","tokens":[{"surface":"Aspirin","features":["cap"]},{"surface":"helps","features":[]}],"spans":[{"type":"Chem","start":0,"end":1}]})"
      "\n");
  const ReadResult r = read_corpus(in, CorpusFormat::jsonl);
  REQUIRE(r.corpus.documents().size() == 1);
  CHECK(r.corpus.documents()[0].id() == "s1");
  CHECK(r.corpus.documents()[0].tokens()[0].features() ==
        std::vector<std::string>{"cap"});
  CHECK(r.corpus.span_types() == std::vector<std::string>{"Chem"});
}

TEST_CASE("JSONL errors carry the line number") {
  std::istringstream in(
      "{\"id\":\"a\",\"tokens\":[{\"surface\":\"x\",\"features\":[]}],\"spans\":[]}\n"
      "{not json\n");
  try {
    read_corpus(in, CorpusFormat::jsonl);
    FAIL("malformed line accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("drop_misaligned excludes spans off token boundaries") {
  const std::string line =
      R"({"id":"a","tokens":[{"surface":"x","features":[]},{"surface":"y","features":[]}],"spans":[{"type":"A","start":0,"end":1},{"type":"A","start":1,"end":5},{"type":"A","start":0.5,"end":1}]})";
  {
    std::istringstream in(line + "\n");
    CHECK_THROWS_AS(read_corpus(in, CorpusFormat::jsonl), ValidationError);
  }
  std::istringstream in(line + "\n");
  ReadOptions options;
  options.drop_misaligned = true;
  const ReadResult r = read_corpus(in, CorpusFormat::jsonl, options);
  CHECK(r.dropped_spans == 2);
  CHECK(r.corpus.documents()[0].spans().size() == 1);
}

TEST_CASE("CoNLL reader: documents, features and malformed rows") {
  std::istringstream in(
      "# id = first\n"
      "John\tB-PER\tcap\n"
      "Smith\tI-PER\n"
      "runs\tO\n"
      "\n"
      "Paris\tB-LOC\n");
  const Corpus c = read_corpus(in, CorpusFormat::conll_tsv).corpus;
  REQUIRE(c.documents().size() == 2);
  CHECK(c.documents()[0].id() == "first");
  CHECK(c.documents()[0].spans() == std::vector<Span>{{"PER", 0, 2}});
  CHECK(c.documents()[0].tokens()[0].features() ==
        std::vector<std::string>{"cap"});
  CHECK(c.span_types() == std::vector<std::string>{"LOC", "PER"});

  std::istringstream bad("a\tO\nlonely\n");
  try {
    read_corpus(bad, CorpusFormat::conll_tsv);
    FAIL("one-column row accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("property: file round trip in both formats") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Corpus base = testing::random_corpus(rng, 50, 3);
    // Give tokens feature bags so both formats carry them.
    std::vector<Document> docs;
    for (const auto& d : base.documents()) {
      std::vector<Token> tokens;
      for (const auto& t : d.tokens()) {
        tokens.emplace_back(t.surface(),
                            std::vector<std::string>{"len=" + std::to_string(
                                                         t.surface().size())});
      }
      docs.emplace_back(d.id(), std::move(tokens), d.spans());
    }
    // Readers infer the inventory from used types.
    const Corpus c = Corpus::with_inferred_types(std::move(docs));
    for (CorpusFormat f : {CorpusFormat::jsonl, CorpusFormat::conll_tsv}) {
      std::ostringstream first;
      write_corpus(c, first, f);
      std::istringstream in(first.str());
      const Corpus back = read_corpus(in, f).corpus;
      CHECK(back == c);
      std::ostringstream second;
      write_corpus(back, second, f);
      CHECK(second.str() == first.str());
    }
  }
}

TEST_CASE("path I/O maps missing files to IoError") {
  CHECK_THROWS_AS(read_corpus(std::filesystem::path("/nonexistent/x.jsonl"),
                              CorpusFormat::jsonl),
                  IoError);
  CHECK(format_from_extension("a.jsonl") == CorpusFormat::jsonl);
  CHECK(format_from_extension("a.tsv") == CorpusFormat::conll_tsv);
}
