#include "spanmeta/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spanmeta/error.hpp"

namespace spanmeta {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kIdPrefix = "# id = ";

std::string at_line(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

Corpus make_corpus(std::vector<Document> docs, const ReadOptions& options) {
  if (options.span_types) {
    return Corpus(std::move(docs), *options.span_types, options.partition);
  }
  return Corpus::with_inferred_types(std::move(docs), options.partition);
}

// Returns nullopt when the bound is not an integral token index.
std::optional<std::size_t> token_bound(const ordered_json& v) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer()) {
    auto i = v.get<long long>();
    if (i >= 0) return static_cast<std::size_t>(i);
  }
  return std::nullopt;
}

Document parse_jsonl_document(const std::string& line, std::size_t lineno,
                              const ReadOptions& options,
                              std::size_t& dropped) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(at_line(lineno) + "invalid JSON: " + e.what());
  }
  try {
    std::string id = j.at("id").get<std::string>();
    std::vector<Token> tokens;
    for (const auto& tok : j.at("tokens")) {
      std::vector<std::string> features;
      if (tok.contains("features")) {
        features = tok.at("features").get<std::vector<std::string>>();
      }
      tokens.emplace_back(tok.at("surface").get<std::string>(),
                          std::move(features));
    }
    std::vector<Span> spans;
    if (j.contains("spans")) {
      for (const auto& s : j.at("spans")) {
        auto type = s.at("type").get<std::string>();
        auto start = token_bound(s.at("start"));
        auto end = token_bound(s.at("end"));
        const bool aligned =
            start && end && *start < *end && *end <= tokens.size();
        if (!aligned) {
          if (options.drop_misaligned) {
            ++dropped;
            continue;
          }
          throw ValidationError("document '" + id + "': span of type '" +
                                type + "' (" + s.at("start").dump() + ", " +
                                s.at("end").dump() +
                                ") does not align with token boundaries");
        }
        spans.push_back({std::move(type), *start, *end});
      }
    }
    return Document(std::move(id), std::move(tokens), std::move(spans));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(at_line(lineno) + "malformed document: " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(at_line(lineno) + e.what());
  }
}

ReadResult read_jsonl(std::istream& in, const ReadOptions& options) {
  std::vector<Document> docs;
  std::size_t dropped = 0;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    docs.push_back(parse_jsonl_document(line, lineno, options, dropped));
  }
  return {make_corpus(std::move(docs), options), dropped};
}

struct RawRow {
  std::string surface;
  std::string label;
  std::vector<std::string> features;
};

struct RawDocument {
  std::string id;
  std::size_t first_line = 0;
  std::vector<RawRow> rows;
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    cols.push_back(line.substr(pos, tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return cols;
}

ReadResult read_conll(std::istream& in, const ReadOptions& options) {
  std::vector<RawDocument> raw;
  std::set<std::string> types;
  RawDocument current;
  bool pending = false;
  auto flush = [&] {
    if (pending) raw.push_back(std::move(current));
    current = RawDocument{};
    pending = false;
  };

  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (!pending && line.starts_with(kIdPrefix)) {
      current.id = line.substr(kIdPrefix.size());
      current.first_line = lineno;
      pending = true;
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() < 2) {
      throw ValidationError(at_line(lineno) +
                            "expected at least 2 tab-separated columns, got " +
                            std::to_string(cols.size()));
    }
    const std::string& label = cols[1];
    if (label != "O") {
      if (label.size() < 3 || label[1] != '-' ||
          (label[0] != 'B' && label[0] != 'I')) {
        throw ValidationError(at_line(lineno) + "invalid BIO label '" + label +
                              "'");
      }
      types.insert(label.substr(2));
    }
    if (cols[0].empty()) {
      throw ValidationError(at_line(lineno) + "empty token surface");
    }
    if (!pending) {
      current.first_line = lineno;
      pending = true;
    }
    current.rows.push_back(
        {cols[0], label, std::vector<std::string>(cols.begin() + 2, cols.end())});
  }
  flush();

  const std::vector<std::string> inventory =
      options.span_types ? *options.span_types
                         : std::vector<std::string>(types.begin(), types.end());
  const LabelSet labels(inventory);

  std::vector<Document> docs;
  docs.reserve(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    RawDocument& rd = raw[d];
    std::string id = rd.id.empty() ? "doc" + std::to_string(d + 1) : rd.id;
    std::vector<Token> tokens;
    std::vector<std::string> names;
    for (RawRow& row : rd.rows) {
      tokens.emplace_back(std::move(row.surface), std::move(row.features));
      names.push_back(std::move(row.label));
    }
    try {
      auto spans = bio_decode(parse_labels(names, labels), labels,
                              options.bio_mode);
      docs.emplace_back(std::move(id), std::move(tokens), std::move(spans));
    } catch (const ValidationError& e) {
      throw ValidationError("document starting at " + at_line(rd.first_line) +
                            e.what());
    }
  }
  return {Corpus(std::move(docs), inventory, options.partition), 0};
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const Document& doc : corpus.documents()) {
    ordered_json j;
    j["id"] = doc.id();
    j["tokens"] = ordered_json::array();
    for (const Token& tok : doc.tokens()) {
      ordered_json t;
      t["surface"] = tok.surface();
      t["features"] = tok.features();
      j["tokens"].push_back(std::move(t));
    }
    j["spans"] = ordered_json::array();
    for (const Span& span : doc.spans()) {
      ordered_json s;
      s["type"] = span.type;
      s["start"] = span.start;
      s["end"] = span.end;
      j["spans"].push_back(std::move(s));
    }
    out << j.dump() << '\n';
  }
}

void check_tsv_field(const std::string& field, const Document& doc) {
  if (field.find_first_of("\t\n\r") != std::string::npos) {
    throw ValidationError("document '" + doc.id() + "': field '" + field +
                          "' cannot be written as CoNLL TSV");
  }
}

void write_conll(const Corpus& corpus, std::ostream& out) {
  const LabelSet labels(corpus.span_types());
  for (const Document& doc : corpus.documents()) {
    check_tsv_field(doc.id(), doc);
    out << kIdPrefix << doc.id() << '\n';
    const BioSequence seq = bio_encode(doc, labels);
    for (std::size_t t = 0; t < doc.size(); ++t) {
      const Token& tok = doc.tokens()[t];
      check_tsv_field(tok.surface(), doc);
      out << tok.surface() << '\t' << labels.name(seq[t]);
      for (const auto& f : tok.features()) {
        check_tsv_field(f, doc);
        out << '\t' << f;
      }
      out << '\n';
    }
    out << '\n';
  }
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "conll" || name == "conll_tsv" || name == "tsv") {
    return CorpusFormat::conll_tsv;
  }
  throw ValidationError("unknown corpus format '" + std::string(name) + "'");
}

CorpusFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".jsonl" || ext == ".json" ? CorpusFormat::jsonl
                                           : CorpusFormat::conll_tsv;
}

ReadResult read_corpus(std::istream& in, CorpusFormat format,
                       const ReadOptions& options) {
  return format == CorpusFormat::jsonl ? read_jsonl(in, options)
                                       : read_conll(in, options);
}

ReadResult read_corpus(const std::filesystem::path& path, CorpusFormat format,
                       const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  try {
    return read_corpus(in, format, options);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_corpus(const Corpus& corpus, std::ostream& out, CorpusFormat format) {
  if (format == CorpusFormat::jsonl) {
    write_jsonl(corpus, out);
  } else {
    write_conll(corpus, out);
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  CorpusFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_corpus(corpus, out, format);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace spanmeta
