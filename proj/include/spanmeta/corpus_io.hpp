#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spanmeta/bio.hpp"
#include "spanmeta/corpus.hpp"

namespace spanmeta {

// jsonl:     one document per line,
//            {"id": ..., "tokens": [{"surface": ..., "features": [...]}],
//             "spans": [{"type": ..., "start": i, "end": j}]}
// conll_tsv: one token per row: surface TAB bio-label [TAB feature]...;
//            a blank line ends a document; an optional "# id = <id>" line
//            before the first row names it.
enum class CorpusFormat { jsonl, conll_tsv };

CorpusFormat parse_corpus_format(std::string_view name);
// .jsonl/.json -> jsonl, anything else -> conll_tsv.
CorpusFormat format_from_extension(const std::filesystem::path& path);

struct ReadOptions {
  Partition partition = Partition::train;
  // Inventory to use; inferred (sorted set of used types) when absent.
  std::optional<std::vector<std::string>> span_types;
  // JSONL spans whose bounds are not token boundaries of their document
  // (non-integer or out of range) are dropped and counted instead of
  // rejected.
  bool drop_misaligned = false;
  // BIO decoding of the CoNLL label column. Gold files should stay strict.
  DecodeMode bio_mode = DecodeMode::strict;
};

struct ReadResult {
  Corpus corpus;
  std::size_t dropped_spans = 0;
};

ReadResult read_corpus(std::istream& in, CorpusFormat format,
                       const ReadOptions& options = {});
ReadResult read_corpus(const std::filesystem::path& path, CorpusFormat format,
                       const ReadOptions& options = {});

void write_corpus(const Corpus& corpus, std::ostream& out, CorpusFormat format);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  CorpusFormat format);

}  // namespace spanmeta
