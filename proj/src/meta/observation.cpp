#include "spanmeta/meta/observation.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spanmeta/error.hpp"

namespace spanmeta::meta {
namespace {

constexpr const char* kHeader = "span_type,feat,crf,lstm,bert,freq,length,sd,bd,f1";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

double parse_double(const std::string& s, std::size_t line_no,
                    std::string_view column) {
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ValidationError(where(line_no) + "invalid number '" + s +
                          "' in column " + std::string(column));
  }
  return value;
}

bool parse_flag(const std::string& s, std::size_t line_no,
                std::string_view column) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw ValidationError(where(line_no) + "column " + std::string(column) +
                        " must be 0 or 1, got '" + s + "'");
}

}  // namespace

ArchitectureFeatures parse_architecture_name(std::string_view name) {
  ArchitectureFeatures arch;
  if (name == "Baseline") return arch;
  std::size_t pos = 0;
  while (pos <= name.size()) {
    const std::size_t next = std::min(name.find('+', pos), name.size());
    const std::string_view part = name.substr(pos, next - pos);
    bool* flag = nullptr;
    if (part == "Feat") flag = &arch.feat;
    else if (part == "CRF") flag = &arch.crf;
    else if (part == "LSTM") flag = &arch.lstm;
    else if (part == "BERT") flag = &arch.bert;
    else if (part == "Baseline") flag = nullptr;
    else throw ValidationError("unknown architecture component '" +
                               std::string(part) + "' in '" +
                               std::string(name) + "'");
    if (flag != nullptr) {
      if (*flag) {
        throw ValidationError("duplicate component in architecture '" +
                              std::string(name) + "'");
      }
      *flag = true;
    }
    pos = next + 1;
  }
  return arch;
}

std::string architecture_name(const ArchitectureFeatures& arch) {
  std::string name;
  auto add = [&](bool on, const char* part) {
    if (!on) return;
    if (!name.empty()) name += '+';
    name += part;
  };
  add(arch.bert, "BERT");
  add(arch.feat, "Feat");
  add(arch.lstm, "LSTM");
  add(arch.crf, "CRF");
  return name.empty() ? "Baseline" : name;
}

void validate(const Observation& obs) {
  if (!(obs.f1 >= 0.0 && obs.f1 <= 100.0)) {
    throw ValidationError("observation " + obs.span_type +
                          ": F1 must lie in [0, 100]");
  }
  if (obs.profile.frequency == 0) {
    throw ValidationError("observation " + obs.span_type +
                          ": frequency must be positive");
  }
  if (!(obs.profile.span_length >= 1.0)) {
    throw ValidationError("observation " + obs.span_type +
                          ": span length must be at least 1");
  }
  if (!obs.profile.boundary_distinctiveness) {
    throw ValidationError("observation " + obs.span_type +
                          ": boundary distinctiveness is undefined");
  }
}

std::vector<Observation> read_observations(std::istream& in, bool require_f1) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<Observation> out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      const bool full = line == kHeader;
      const bool without_f1 = line == std::string(kHeader).substr(
                                          0, std::string(kHeader).size() - 3);
      if (!full && !(without_f1 && !require_f1)) {
        throw ValidationError(where(line_no) + "expected header '" + kHeader +
                              "'");
      }
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() == 9 && !require_f1) fields.emplace_back();
    if (fields.size() != 10) {
      throw ValidationError(where(line_no) + "expected 10 columns, got " +
                            std::to_string(fields.size()));
    }
    Observation obs;
    obs.span_type = fields[0];
    if (obs.span_type.empty()) {
      throw ValidationError(where(line_no) + "empty span_type");
    }
    obs.arch.feat = parse_flag(fields[1], line_no, "feat");
    obs.arch.crf = parse_flag(fields[2], line_no, "crf");
    obs.arch.lstm = parse_flag(fields[3], line_no, "lstm");
    obs.arch.bert = parse_flag(fields[4], line_no, "bert");
    const double freq = parse_double(fields[5], line_no, "freq");
    if (freq < 1.0 || freq != std::floor(freq)) {
      throw ValidationError(where(line_no) +
                            "freq must be a positive integer");
    }
    obs.profile.type_id = obs.span_type;
    obs.profile.frequency = static_cast<std::size_t>(freq);
    obs.profile.span_length = parse_double(fields[6], line_no, "length");
    obs.profile.span_distinctiveness = parse_double(fields[7], line_no, "sd");
    obs.profile.boundary_distinctiveness =
        parse_double(fields[8], line_no, "bd");
    if (fields[9].empty()) {
      if (require_f1) throw ValidationError(where(line_no) + "missing f1");
      obs.f1 = std::numeric_limits<double>::quiet_NaN();
    } else {
      obs.f1 = parse_double(fields[9], line_no, "f1");
    }
    try {
      if (!std::isnan(obs.f1)) {
        validate(obs);
      } else {
        Observation probe = obs;
        probe.f1 = 0.0;
        validate(probe);
      }
    } catch (const ValidationError& e) {
      throw ValidationError(where(line_no) + e.what());
    }
    out.push_back(std::move(obs));
  }
  if (!header_seen) throw ValidationError("observation file is empty");
  return out;
}

std::vector<Observation> read_observations(const std::filesystem::path& path,
                                           bool require_f1) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_observations(in, require_f1);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_observations(std::span<const Observation> observations,
                        std::ostream& out) {
  out << kHeader << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& obs : observations) {
    if (obs.span_type.find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("span type '" + obs.span_type +
                            "' cannot be written to CSV");
    }
    out << obs.span_type << ',' << obs.arch.feat << ',' << obs.arch.crf << ','
        << obs.arch.lstm << ',' << obs.arch.bert << ','
        << obs.profile.frequency << ',' << obs.profile.span_length << ','
        << obs.profile.span_distinctiveness << ',';
    if (obs.profile.boundary_distinctiveness) {
      out << *obs.profile.boundary_distinctiveness;
    }
    out << ',';
    if (!std::isnan(obs.f1)) out << obs.f1;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace spanmeta::meta
