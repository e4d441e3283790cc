#include "reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spanmeta/error.hpp"
#include "spanmeta/meta/stats.hpp"

namespace spanmeta::cli {
namespace {

// Coefficients whose direction is the substantive finding; checked on every
// run.
const std::vector<std::pair<std::string, int>> kKeySigns = {
    {"bert", +1},
    {"crf", +1},
    {"lstm", -1},
    {"log_freq", +1},
    {"log_length", -1},
    {"boundary_distinct", +1},
    {"bert:log_freq", -1},
    {"lstm:log_freq", +1},
    {"crf:span_distinct", +1},
    {"crf:boundary_distinct", -1},
    {"crf:bert", -1},
    {"lstm:bert", -1},
};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json profile_json(const metrics::DatasetProfile& p) {
  return {{"frequency", p.frequency},
          {"span_length", p.span_length},
          {"span_distinctiveness", p.span_distinctiveness},
          {"boundary_distinctiveness", p.boundary_distinctiveness}};
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

ReproductionReport reproduce(const ReproduceOptions& options) {
  const paper::EmbeddedTables tables = paper::load_embedded();
  const auto observations = paper::to_observations(tables);

  ReproductionReport report;
  report.alpha = options.alpha;
  report.interactions = options.interactions;

  for (const auto& ref : paper::dataset_reference()) {
    Table1Check c;
    c.task = ref.task;
    c.dataset = ref.dataset;
    c.reference = ref.profile;
    const auto profiles = tables.profiles_of(ref.dataset);
    c.computed = metrics::dataset_profile(profiles);
    c.within_tolerance =
        std::fabs(c.computed.frequency - c.reference.frequency) <= 1.0 &&
        std::fabs(c.computed.span_length - c.reference.span_length) <= 0.01 &&
        std::fabs(c.computed.span_distinctiveness -
                  c.reference.span_distinctiveness) <= 0.01 &&
        std::fabs(c.computed.boundary_distinctiveness -
                  c.reference.boundary_distinctiveness) <= 0.01;
    report.table1.push_back(c);
  }

  std::vector<double> log_freq, sd;
  for (const auto& e : tables.span_types) {
    log_freq.push_back(std::log(static_cast<double>(e.profile.frequency)));
    sd.push_back(e.profile.span_distinctiveness);
  }
  report.correlation.r = meta::pearson_correlation(log_freq, sd);
  report.correlation.pass =
      std::fabs(report.correlation.r - report.correlation.reference) <=
      report.correlation.tolerance;

  meta::FitOptions fit_options;
  fit_options.design.interactions = options.interactions;

  if (options.alpha_search) {
    const auto grid = meta::default_alpha_grid();
    const auto search = meta::select_alpha(observations, grid, fit_options);
    AlphaCheck a;
    a.curve = search.curve;
    a.selected = search.alpha;
    double min_mae = search.curve.front().second;
    for (const auto& [alpha, mae] : search.curve) min_mae = std::min(min_mae, mae);
    const auto at = meta::loso_cv(observations, options.alpha, fit_options);
    a.mae_at_alpha = at.mae;
    a.gap_to_minimum = at.mae - min_mae;
    a.within_one_point = a.gap_to_minimum <= 1.0;
    report.alpha_search = a;
  }

  const auto refs = paper::prediction_error_reference();
  const auto cvs = meta::ablate(observations, options.alpha,
                                options.interactions);
  for (const auto& cv : cvs) {
    Table3Row row;
    row.predictors = cv.predictors;
    row.mae = cv.mae;
    row.r2 = cv.r2;
    for (const auto& ref : refs) {
      if (ref.predictors == cv.predictors) {
        row.reference_mae = ref.mae;
        row.reference_r2 = ref.r2;
      }
    }
    report.table3.push_back(row);
    if (cv.predictors == meta::PredictorSet::full) {
      report.actual = cv.actual;
      report.predicted = cv.predicted;
    }
  }
  report.table3_ordering = true;
  for (std::size_t i = 1; i < report.table3.size(); ++i) {
    report.table3_ordering = report.table3_ordering &&
                             report.table3[i - 1].mae < report.table3[i].mae;
  }
  for (const auto& obs : observations) {
    report.point_labels.push_back(obs.span_type + " " +
                                  meta::architecture_name(obs.arch));
  }

  const meta::MetaModel model =
      meta::fit_meta_model(observations, options.alpha, fit_options);
  const auto coef_refs = paper::coefficient_reference();
  const auto& cols = model.design.columns();
  for (std::size_t j = 1; j < cols.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    Table4Row row;
    row.term = cols[j].name;
    row.estimate = model.coefficients(k);
    row.std_error = model.inference->standard_errors(k);
    row.t = model.inference->t_statistics(k);
    row.p = model.inference->p_values(k);
    row.significant = model.significant(j);
    for (const auto& ref : coef_refs) {
      if (ref.term == row.term) {
        row.reference = ref.value;
        row.reference_significant = ref.significant;
      }
    }
    if (row.reference) {
      ++report.signs_total;
      if ((row.estimate > 0) == (*row.reference > 0)) ++report.signs_agree;
      if (row.significant == row.reference_significant) {
        ++report.significance_agree;
      }
    }
    report.table4.push_back(row);
  }
  for (const auto& [term, sign] : kKeySigns) {
    const double v = model.coefficient(term);
    report.key_signs.push_back({term, sign, v, v * sign > 0});
  }
  const double bert = model.coefficient("bert");
  report.bert_largest_model_effect =
      bert > 0 && bert > model.coefficient("feat") &&
      bert > model.coefficient("crf") && bert > model.coefficient("lstm");
  return report;
}

nlohmann::json to_json(const ReproductionReport& r) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["interactions"] = meta::to_string(r.interactions);

  nlohmann::json t1 = nlohmann::json::array();
  for (const auto& c : r.table1) {
    t1.push_back({{"task", c.task},
                  {"dataset", c.dataset},
                  {"reference", profile_json(c.reference)},
                  {"computed", profile_json(c.computed)},
                  {"delta",
                   {{"frequency", c.computed.frequency - c.reference.frequency},
                    {"span_length",
                     c.computed.span_length - c.reference.span_length},
                    {"span_distinctiveness", c.computed.span_distinctiveness -
                                                 c.reference.span_distinctiveness},
                    {"boundary_distinctiveness",
                     c.computed.boundary_distinctiveness -
                         c.reference.boundary_distinctiveness}}},
                  {"within_tolerance", c.within_tolerance}});
  }
  j["table1_check"] = t1;
  j["correlation_check"] = {{"r", r.correlation.r},
                            {"reference", r.correlation.reference},
                            {"tolerance", r.correlation.tolerance},
                            {"pass", r.correlation.pass}};
  if (r.alpha_search) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [a, mae] : r.alpha_search->curve) {
      curve.push_back({{"alpha", a}, {"mae", mae}});
    }
    j["alpha_search"] = {{"curve", curve},
                         {"selected", r.alpha_search->selected},
                         {"mae_at_alpha", r.alpha_search->mae_at_alpha},
                         {"gap_to_minimum", r.alpha_search->gap_to_minimum},
                         {"within_one_point", r.alpha_search->within_one_point}};
  } else {
    j["alpha_search"] = nullptr;
  }
  nlohmann::json t3 = nlohmann::json::array();
  for (const auto& row : r.table3) {
    t3.push_back({{"predictors", meta::to_string(row.predictors)},
                  {"mae", row.mae},
                  {"r2", optional_json(row.r2)},
                  {"reference_mae", row.reference_mae},
                  {"reference_r2", optional_json(row.reference_r2)}});
  }
  j["table3_block"] = {{"rows", t3}, {"ordering_holds", r.table3_ordering}};

  nlohmann::json coefs = nlohmann::json::array();
  for (const auto& row : r.table4) {
    coefs.push_back({{"term", row.term},
                     {"estimate", row.estimate},
                     {"std_error", row.std_error},
                     {"t", row.t},
                     {"p", row.p},
                     {"significant", row.significant},
                     {"reference", optional_json(row.reference)},
                     {"reference_significant", row.reference_significant}});
  }
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& k : r.key_signs) {
    keys.push_back({{"term", k.term},
                    {"expected_sign", k.expected_sign},
                    {"estimate", k.estimate},
                    {"holds", k.holds}});
  }
  j["table4_block"] = {
      {"coefficients", coefs},
      {"sign_agreement",
       {{"agree", r.signs_agree},
        {"total", r.signs_total},
        {"significance_agree", r.significance_agree},
        {"key_signs", keys},
        {"bert_largest_model_effect", r.bert_largest_model_effect}}}};
  j["scatter_points"] = r.actual.size();
  return j;
}

std::string to_text(const ReproductionReport& r) {
  std::ostringstream out;
  out << "Dataset profiles (frequency-weighted roll-up of span types)\n";
  for (const auto& c : r.table1) {
    out << "  " << c.dataset << " (" << c.task
        << "): freq " << fmt(c.computed.frequency, 1) << " vs "
        << fmt(c.reference.frequency, 0) << ", length "
        << fmt(c.computed.span_length) << " vs " << fmt(c.reference.span_length)
        << ", SD " << fmt(c.computed.span_distinctiveness) << " vs "
        << fmt(c.reference.span_distinctiveness) << ", BD "
        << fmt(c.computed.boundary_distinctiveness) << " vs "
        << fmt(c.reference.boundary_distinctiveness) << "  "
        << (c.within_tolerance ? "ok" : "MISMATCH") << '\n';
  }
  out << "\nCorrelation ln(freq) ~ SD: r = " << fmt(r.correlation.r, 3)
      << " (expected " << fmt(r.correlation.reference) << " +- "
      << fmt(r.correlation.tolerance) << ") "
      << (r.correlation.pass ? "ok" : "MISMATCH") << '\n';
  if (r.alpha_search) {
    out << "\nPadding alpha search (full-model LOSO MAE)\n";
    for (const auto& [a, mae] : r.alpha_search->curve) {
      out << "  alpha " << fmt(a) << ": " << fmt(mae, 3) << '\n';
    }
    out << "  selected " << fmt(r.alpha_search->selected) << "; alpha "
        << fmt(r.alpha) << " is " << fmt(r.alpha_search->gap_to_minimum, 3)
        << " above the minimum\n";
  }
  out << "\nLeave-one-span-type-out prediction error (alpha " << fmt(r.alpha)
      << ")\n";
  for (const auto& row : r.table3) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-16s MAE %6.2f (ref %6.2f)  r2 %s (ref %s)\n",
                  std::string(meta::to_string(row.predictors)).c_str(), row.mae,
                  row.reference_mae, row.r2 ? fmt(*row.r2).c_str() : "  - ",
                  row.reference_r2 ? fmt(*row.reference_r2).c_str() : "  - ");
    out << line;
  }
  out << "  strict MAE ordering: " << (r.table3_ordering ? "holds" : "VIOLATED")
      << '\n';
  out << "\nCoefficients refit on all observations (* : p < 0.002)\n";
  for (const auto& row : r.table4) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-24s %7.3f%s  SE %.3f  p %.2e   ref %s%s\n",
                  row.term.c_str(), row.estimate, row.significant ? "*" : " ",
                  row.std_error, row.p,
                  row.reference ? fmt(*row.reference).c_str() : "-",
                  row.reference && row.reference_significant ? "*" : "");
    out << line;
  }
  out << "  sign agreement " << r.signs_agree << "/" << r.signs_total
      << ", significance agreement " << r.significance_agree << "/"
      << r.signs_total << '\n';
  std::size_t key_ok = 0;
  for (const auto& k : r.key_signs) key_ok += k.holds ? 1 : 0;
  out << "  key signs " << key_ok << "/" << r.key_signs.size()
      << "; BERT largest model effect: "
      << (r.bert_largest_model_effect ? "yes" : "no") << '\n';
  return out.str();
}

std::string scatter_svg(std::span<const double> actual,
                        std::span<const double> predicted,
                        std::string_view title) {
  if (actual.size() != predicted.size()) {
    throw ValidationError("scatter needs equally many actual and predicted "
                          "values");
  }
  constexpr double kSize = 480, kMargin = 56, kPlot = kSize - 2 * kMargin;
  auto px = [&](double v) { return kMargin + kPlot * std::clamp(v, 0.0, 100.0) / 100.0; };
  auto py = [&](double v) {
    return kSize - kMargin - kPlot * std::clamp(v, 0.0, 100.0) / 100.0;
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
    << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << ' ' << kSize
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string escaped;
  for (char c : title) {
    if (c == '<') escaped += "&lt;";
    else if (c == '>') escaped += "&gt;";
    else if (c == '&') escaped += "&amp;";
    else escaped += c;
  }
  s << "<text x=\"" << kSize / 2 << "\" y=\"24\" text-anchor=\"middle\">"
    << escaped << "</text>\n";
  s << "<g stroke=\"#999\" stroke-width=\"0.5\">\n";
  for (int t = 0; t <= 100; t += 20) {
    s << "<line x1=\"" << px(t) << "\" y1=\"" << py(0) << "\" x2=\"" << px(t)
      << "\" y2=\"" << py(100) << "\"/>\n";
    s << "<line x1=\"" << px(0) << "\" y1=\"" << py(t) << "\" x2=\"" << px(100)
      << "\" y2=\"" << py(t) << "\"/>\n";
  }
  s << "</g>\n<g>\n";
  for (int t = 0; t <= 100; t += 20) {
    s << "<text x=\"" << px(t) << "\" y=\"" << py(0) + 16
      << "\" text-anchor=\"middle\">" << t << "</text>\n";
    s << "<text x=\"" << px(0) - 6 << "\" y=\"" << py(t) + 4
      << "\" text-anchor=\"end\">" << t << "</text>\n";
  }
  s << "</g>\n";
  s << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 14
    << "\" text-anchor=\"middle\">actual F1</text>\n";
  s << "<text transform=\"translate(16 " << kSize / 2
    << ") rotate(-90)\" text-anchor=\"middle\">predicted F1</text>\n";
  s << "<line id=\"identity\" x1=\"" << px(0) << "\" y1=\"" << py(0)
    << "\" x2=\"" << px(100) << "\" y2=\"" << py(100)
    << "\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n";
  s << "<g fill=\"#2a6fb0\" fill-opacity=\"0.55\">\n";
  for (std::size_t i = 0; i < actual.size(); ++i) {
    s << "<circle cx=\"" << fmt(px(actual[i])) << "\" cy=\""
      << fmt(py(predicted[i])) << "\" r=\"2.5\"/>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace spanmeta::cli
