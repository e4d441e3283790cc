#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reproduce.hpp"
#include "spanmeta/corpus_io.hpp"
#include "spanmeta/error.hpp"
#include "spanmeta/meta/cross_validation.hpp"
#include "spanmeta/paper_data.hpp"
#include "spanmeta/seqlab/train.hpp"
#include "spanmeta/span_eval.hpp"
#include "spanmeta/task_metrics.hpp"

namespace spanmeta::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Writes to `path`, or to `fallback` when the path is empty or "-".
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot write " + path);
  write(file);
  if (!file) throw IoError("failed writing " + path);
}

std::string number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

CorpusFormat corpus_format(const std::string& flag, const std::string& path) {
  return flag.empty() ? format_from_extension(path) : parse_corpus_format(flag);
}

// --- profile ---------------------------------------------------------------

struct ProfileArgs {
  std::string corpus;
  std::string input_format;
  std::vector<std::string> types;
  std::string format = "csv";
  std::string out;
};

void add_profile(CLI::App& app, ProfileArgs& a) {
  app.add_option("corpus", a.corpus, "Training-partition corpus")
      ->required();
  app.add_option("--input-format", a.input_format,
                 "jsonl or conll (default: from the file extension)");
  app.add_option("--type", a.types, "Span types to profile (default: all)");
  app.add_option("--format", a.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--out", a.out, "Output file (default: stdout)");
}

int run_profile(const ProfileArgs& a, std::ostream& out) {
  const Corpus corpus =
      read_corpus(fs::path(a.corpus), corpus_format(a.input_format, a.corpus))
          .corpus;
  std::vector<metrics::SpanTypeProfile> profiles;
  if (a.types.empty()) {
    profiles = metrics::profile_corpus(corpus);
  } else {
    for (const auto& t : a.types) {
      profiles.push_back(metrics::profile_span_type(corpus, t));
    }
  }
  if (profiles.empty()) throw ValidationError("corpus contains no spans");
  const metrics::DatasetProfile dataset = metrics::dataset_profile(profiles);
  emit(a.out, out, [&](std::ostream& o) {
    if (a.format == "json") {
      json rows = json::array();
      for (const auto& p : profiles) {
        rows.push_back(
            {{"type", p.type_id},
             {"frequency", p.frequency},
             {"span_length", p.span_length},
             {"span_distinctiveness", p.span_distinctiveness},
             {"boundary_distinctiveness",
              optional_number(p.boundary_distinctiveness)}});
      }
      json d = {{"frequency", dataset.frequency},
                {"span_length", dataset.span_length},
                {"span_distinctiveness", dataset.span_distinctiveness},
                {"boundary_distinctiveness",
                 std::isnan(dataset.boundary_distinctiveness)
                     ? json(nullptr)
                     : json(dataset.boundary_distinctiveness)}};
      o << json{{"span_types", rows}, {"dataset", d}}.dump(2) << '\n';
      return;
    }
    o << "type,frequency,span_length,span_distinctiveness,"
         "boundary_distinctiveness\n";
    for (const auto& p : profiles) {
      o << p.type_id << ',' << p.frequency << ',' << number(p.span_length)
        << ',' << number(p.span_distinctiveness) << ','
        << (p.boundary_distinctiveness ? number(*p.boundary_distinctiveness)
                                       : "")
        << '\n';
    }
    o << "*dataset*," << number(dataset.frequency) << ','
      << number(dataset.span_length) << ','
      << number(dataset.span_distinctiveness) << ','
      << number(dataset.boundary_distinctiveness) << '\n';
  });
  return kExitOk;
}

// --- train / tag -----------------------------------------------------------

struct TrainArgs {
  std::string arch = "crf";
  std::string train;
  std::string dev;
  std::string input_format;
  std::string out;
  std::string log;
  seqlab::TrainConfig config;
};

void add_train(CLI::App& app, TrainArgs& a) {
  app.add_option("--arch", a.arch, "Model architecture")
      ->check(CLI::IsMember({"baseline", "crf"}));
  app.add_option("--train", a.train, "Training corpus")->required();
  app.add_option("--dev", a.dev,
                 "Development corpus (default: hold out --dev-fraction of "
                 "the training documents)");
  app.add_option("--input-format", a.input_format,
                 "jsonl or conll (default: from the file extension)");
  app.add_option("--out", a.out, "Where to write the model JSON")->required();
  app.add_option("--log", a.log, "Where to write the per-epoch log (JSON)");
  app.add_option("--seed", a.config.seed, "Random seed");
  app.add_option("--epochs", a.config.max_epochs, "Maximum number of epochs");
  app.add_option("--batch-size", a.config.batch_size, "Documents per batch");
  app.add_option("--lr", a.config.learning_rate, "Adam learning rate");
  app.add_option("--dropout", a.config.feature_dropout,
                 "Feature dropout probability");
  app.add_option("--ema-decay", a.config.ema_decay,
                 "Decay of the early-stopping moving average");
  app.add_option("--dev-fraction", a.config.dev_fraction,
                 "Share of documents held out when --dev is absent");
  app.add_flag("--constrain", a.config.constrain_transitions,
               "Forbid invalid BIO transitions in the CRF");
  app.add_flag("!--no-surface", a.config.surface_features,
               "Do not add the token surface as a feature");
}

int run_train(const TrainArgs& a, std::ostream& out) {
  a.config.validate();
  const auto arch = seqlab::parse_architecture(a.arch);
  const Corpus train =
      read_corpus(fs::path(a.train), corpus_format(a.input_format, a.train))
          .corpus;
  std::optional<seqlab::TrainResult> result;
  if (a.dev.empty()) {
    result.emplace(seqlab::train(arch, train, a.config));
  } else {
    ReadOptions options;
    options.partition = Partition::dev;
    options.span_types = train.span_types();
    const Corpus dev = read_corpus(fs::path(a.dev),
                                   corpus_format(a.input_format, a.dev),
                                   options)
                           .corpus;
    result.emplace(seqlab::train(arch, train, dev, a.config));
  }
  seqlab::save_labeler(result->model, a.out);
  json epochs = json::array();
  for (const auto& r : result->log) epochs.push_back(seqlab::to_json(r));
  const json summary = {{"architecture", a.arch},
                        {"seed", a.config.seed},
                        {"best_epoch", result->best_epoch},
                        {"best_dev_f1", result->best_dev_f1},
                        {"epochs", epochs},
                        {"model", a.out}};
  if (!a.log.empty()) {
    emit(a.log, out, [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  }
  out << summary.dump(2) << '\n';
  return kExitOk;
}

struct TagArgs {
  std::string model;
  std::string input;
  std::string input_format;
  std::string output_format = "jsonl";
  std::string out;
};

void add_tag(CLI::App& app, TagArgs& a) {
  app.add_option("--model", a.model, "Model JSON written by train")
      ->required();
  app.add_option("--input", a.input, "Corpus to label")->required();
  app.add_option("--input-format", a.input_format,
                 "jsonl or conll (default: from the file extension)");
  app.add_option("--output-format", a.output_format, "jsonl or conll")
      ->check(CLI::IsMember({"jsonl", "conll"}));
  app.add_option("-o,--out", a.out, "Output corpus (default: stdout)");
}

int run_tag(const TagArgs& a, std::ostream& out) {
  const auto labeler = seqlab::load_labeler(a.model);
  ReadOptions options;
  options.partition = Partition::test;
  options.span_types = labeler.labels().span_types();
  const Corpus input = read_corpus(fs::path(a.input),
                                   corpus_format(a.input_format, a.input),
                                   options)
                           .corpus;
  const Corpus predicted = labeler.predict_corpus(input);
  emit(a.out, out, [&](std::ostream& o) {
    write_corpus(predicted, o, parse_corpus_format(a.output_format));
  });
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string gold;
  std::string pred;
  std::string input_format;
  std::vector<std::string> types;
  std::string format = "json";
  std::string out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  app.add_option("--gold", a.gold, "Gold corpus")->required();
  app.add_option("--pred", a.pred, "Predicted corpus")->required();
  app.add_option("--input-format", a.input_format,
                 "jsonl or conll (default: from the file extension)");
  app.add_option("--types", a.types,
                 "Span types to score and micro-average (default: all)");
  app.add_option("--format", a.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--out", a.out, "Output file (default: stdout)");
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  ReadOptions gold_options;
  gold_options.partition = Partition::test;
  const Corpus gold = read_corpus(fs::path(a.gold),
                                  corpus_format(a.input_format, a.gold),
                                  gold_options)
                          .corpus;
  ReadOptions pred_options;
  pred_options.partition = Partition::test;
  pred_options.bio_mode = DecodeMode::lenient;
  const Corpus pred = read_corpus(fs::path(a.pred),
                                  corpus_format(a.input_format, a.pred),
                                  pred_options)
                          .corpus;
  const eval::F1Report report =
      eval::f1_report(eval::count_matches(gold, pred), a.types);
  auto scores_json = [](const eval::Scores& s) {
    return json{{"precision", s.precision},
                {"recall", s.recall},
                {"f1", s.f1},
                {"tp", s.counts.true_positives},
                {"fp", s.counts.false_positives},
                {"fn", s.counts.false_negatives}};
  };
  emit(a.out, out, [&](std::ostream& o) {
    if (a.format == "json") {
      json per_type = json::object();
      for (const auto& [type, s] : report.per_type) {
        per_type[type] = scores_json(s);
      }
      o << json{{"per_type", per_type}, {"micro", scores_json(report.micro)}}
               .dump(2)
        << '\n';
      return;
    }
    o << "type,precision,recall,f1,tp,fp,fn\n";
    auto row = [&](const std::string& name, const eval::Scores& s) {
      o << name << ',' << number(s.precision) << ',' << number(s.recall) << ','
        << number(s.f1) << ',' << s.counts.true_positives << ','
        << s.counts.false_positives << ',' << s.counts.false_negatives << '\n';
    };
    for (const auto& [type, s] : report.per_type) row(type, s);
    row("*micro*", report.micro);
  });
  return kExitOk;
}

// --- meta ------------------------------------------------------------------

struct MetaArgs {
  std::string observations;  // empty: embedded observations
  double alpha = meta::kDefaultAlpha;
  std::string predictors = "full";
  std::string interactions = "raw_product";
  double l1 = 0.0;
  double l2 = 0.0;
  std::string model;
  std::string out;
  std::vector<double> grid;
};

void add_observation_options(CLI::App& app, MetaArgs& a) {
  app.add_option("--observations", a.observations,
                 "Observation CSV (span_type,feat,crf,lstm,bert,freq,length,"
                 "sd,bd,f1); default: the embedded 432 observations");
  app.add_option("--interactions", a.interactions,
                 "Scale of interaction factors before z-scoring")
      ->check(CLI::IsMember({"raw_product", "standardized_product"}));
}

void add_alpha(CLI::App& app, MetaArgs& a) {
  app.add_option("--alpha", a.alpha, "Padded-logit alpha in [0, 0.5)");
}

void add_predictors(CLI::App& app, MetaArgs& a) {
  app.add_option("--predictors", a.predictors, "Predictor set")
      ->check(CLI::IsMember(
          {"full", "no_interactions", "arch_only", "task_only", "empty"}));
}

std::vector<meta::Observation> load_observations(const MetaArgs& a) {
  if (a.observations.empty()) {
    return paper::to_observations(paper::load_embedded());
  }
  return meta::read_observations(fs::path(a.observations));
}

meta::FitOptions fit_options(const MetaArgs& a) {
  meta::FitOptions o;
  o.design.predictors = meta::parse_predictor_set(a.predictors);
  o.design.interactions = meta::parse_interaction_scale(a.interactions);
  if (a.l1 != 0.0 || a.l2 != 0.0) {
    o.method = meta::FitMethod::elastic_net;
    o.l1 = a.l1;
    o.l2 = a.l2;
  }
  return o;
}

json cv_json(const meta::CvResult& cv) {
  return {{"predictors", meta::to_string(cv.predictors)},
          {"alpha", cv.alpha},
          {"mae", cv.mae},
          {"r2", optional_number(cv.r2)},
          {"n", cv.actual.size()}};
}

int run_meta_fit(const MetaArgs& a, std::ostream& out) {
  const auto obs = load_observations(a);
  const meta::MetaModel model =
      meta::fit_meta_model(obs, a.alpha, fit_options(a));
  const json j = model.to_json();
  if (!a.out.empty()) meta::save_meta_model(model, a.out);
  if (a.out.empty() || a.out == "-") {
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  for (const auto& c : j.at("coefficients")) {
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %9.4f", 
                  c.at("name").get<std::string>().c_str(),
                  c.at("estimate").get<double>());
    out << line;
    if (c.contains("p")) {
      std::snprintf(line, sizeof line, "  p=%.3g%s", c.at("p").get<double>(),
                    c.at("significant").get<bool>() ? " *" : "");
      out << line;
    }
    out << '\n';
  }
  return kExitOk;
}

int run_meta_cv(const MetaArgs& a, std::ostream& out) {
  const auto obs = load_observations(a);
  const meta::CvResult cv = meta::loso_cv(obs, a.alpha, fit_options(a));
  if (!a.out.empty()) {
    emit(a.out, out, [&](std::ostream& o) {
      o << "span_type,architecture,actual,predicted\n";
      for (std::size_t i = 0; i < obs.size(); ++i) {
        o << obs[i].span_type << ',' << meta::architecture_name(obs[i].arch)
          << ',' << number(cv.actual[i]) << ',' << number(cv.predicted[i])
          << '\n';
      }
    });
  }
  if (a.out != "-") out << cv_json(cv).dump(2) << '\n';
  return kExitOk;
}

int run_meta_ablate(const MetaArgs& a, std::ostream& out) {
  const auto obs = load_observations(a);
  json rows = json::array();
  for (const auto& cv : meta::ablate(
           obs, a.alpha, meta::parse_interaction_scale(a.interactions))) {
    rows.push_back(cv_json(cv));
  }
  emit(a.out, out, [&](std::ostream& o) { o << rows.dump(2) << '\n'; });
  return kExitOk;
}

int run_meta_predict(const MetaArgs& a, std::ostream& out) {
  const meta::MetaModel model = meta::load_meta_model(a.model);
  if (a.observations.empty()) {
    throw ValidationError("meta predict needs --observations");
  }
  const auto obs =
      meta::read_observations(fs::path(a.observations), /*require_f1=*/false);
  emit(a.out, out, [&](std::ostream& o) {
    o << "span_type,feat,crf,lstm,bert,predicted_f1\n";
    for (const auto& x : obs) {
      o << x.span_type << ',' << x.arch.feat << ',' << x.arch.crf << ','
        << x.arch.lstm << ',' << x.arch.bert << ','
        << number(meta::predict(model, x.arch, x.profile)) << '\n';
    }
  });
  return kExitOk;
}

int run_meta_select_alpha(const MetaArgs& a, std::ostream& out) {
  const auto obs = load_observations(a);
  const auto grid = a.grid.empty() ? meta::default_alpha_grid() : a.grid;
  const auto search = meta::select_alpha(obs, grid, fit_options(a));
  json curve = json::array();
  for (const auto& [alpha, mae] : search.curve) {
    curve.push_back({{"alpha", alpha}, {"mae", mae}});
  }
  emit(a.out, out, [&](std::ostream& o) {
    o << json{{"selected", search.alpha}, {"curve", curve}}.dump(2) << '\n';
  });
  return kExitOk;
}

// --- data export -----------------------------------------------------------

struct ExportArgs {
  std::string table;
  std::string out;
};

int run_export(const ExportArgs& a, std::ostream& out) {
  if (a.table == "observations") {
    const auto obs = paper::to_observations(paper::load_embedded());
    emit(a.out, out,
         [&](std::ostream& o) { meta::write_observations(obs, o); });
    return kExitOk;
  }
  const paper::Table t = paper::parse_table(a.table);
  paper::load_embedded();  // checksum verification
  emit(a.out, out, [&](std::ostream& o) { o << paper::embedded_csv(t); });
  return kExitOk;
}

// --- reproduce -------------------------------------------------------------

struct ReproduceArgs {
  std::string out_dir = ".";
  double alpha = meta::kDefaultAlpha;
  std::string interactions = "raw_product";
  bool skip_alpha_search = false;
};

int run_reproduce(const ReproduceArgs& a, std::ostream& out) {
  ReproduceOptions options;
  options.alpha = a.alpha;
  options.alpha_search = !a.skip_alpha_search;
  options.interactions = meta::parse_interaction_scale(a.interactions);
  const ReproductionReport report = reproduce(options);
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
  const fs::path dir(a.out_dir);
  const std::string text = to_text(report);
  emit((dir / "report.json").string(), out, [&](std::ostream& o) {
    o << to_json(report).dump(2) << '\n';
  });
  emit((dir / "report.txt").string(), out,
       [&](std::ostream& o) { o << text; });
  emit((dir / "scatter.svg").string(), out, [&](std::ostream& o) {
    o << scatter_svg(report.actual, report.predicted,
                     "Leave-one-span-type-out: actual vs. predicted F1");
  });
  out << text << "\nwrote " << (dir / "report.json").string() << ", "
      << (dir / "report.txt").string() << ", "
      << (dir / "scatter.svg").string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Span-identification task profiling, sequence labeling and "
               "performance prediction",
               "spanmeta"};
  app.set_config("--config", "",
                 "Read options from a key=value file; flags override it");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  ProfileArgs profile_args;
  add_profile(*app.add_subcommand("profile", "Profile the span types of a "
                                             "corpus"),
              profile_args);
  TrainArgs train_args;
  add_train(*app.add_subcommand("train", "Train a baseline or CRF labeler"),
            train_args);
  TagArgs tag_args;
  add_tag(*app.add_subcommand("tag", "Label a corpus with a trained model"),
          tag_args);
  EvalArgs eval_args;
  add_eval(*app.add_subcommand("eval", "Exact-match span F1 of predictions"),
           eval_args);

  MetaArgs meta_args;
  auto* meta_cmd = app.add_subcommand("meta", "Performance-prediction model");
  meta_cmd->require_subcommand(1);
  auto* fit = meta_cmd->add_subcommand("fit", "Fit on all observations");
  add_observation_options(*fit, meta_args);
  add_alpha(*fit, meta_args);
  add_predictors(*fit, meta_args);
  fit->add_option("--l1", meta_args.l1, "Elastic-net L1 weight");
  fit->add_option("--l2", meta_args.l2, "Elastic-net L2 weight");
  fit->add_option("-o,--out", meta_args.out,
                  "Write the model JSON here (default: print it)");
  auto* cv = meta_cmd->add_subcommand("cv", "Leave-one-span-type-out CV");
  add_observation_options(*cv, meta_args);
  add_alpha(*cv, meta_args);
  add_predictors(*cv, meta_args);
  cv->add_option("--l1", meta_args.l1, "Elastic-net L1 weight");
  cv->add_option("--l2", meta_args.l2, "Elastic-net L2 weight");
  cv->add_option("-o,--out", meta_args.out,
                 "Write per-observation predictions (CSV) here");
  auto* ablate = meta_cmd->add_subcommand("ablate",
                                          "CV for every predictor set");
  add_observation_options(*ablate, meta_args);
  add_alpha(*ablate, meta_args);
  ablate->add_option("-o,--out", meta_args.out, "Output file");
  auto* predict = meta_cmd->add_subcommand("predict",
                                           "Predict F1 with a fitted model");
  predict->add_option("--model", meta_args.model, "Model JSON")->required();
  predict->add_option("--observations", meta_args.observations,
                      "Observation CSV; the f1 column may be empty")
      ->required();
  predict->add_option("-o,--out", meta_args.out, "Output file");
  auto* select = meta_cmd->add_subcommand(
      "select-alpha", "Pick alpha by full-model CV error");
  add_observation_options(*select, meta_args);
  select->add_option("--grid", meta_args.grid,
                     "Candidate alphas (default 0.05 0.10 ... 0.45)");
  select->add_option("-o,--out", meta_args.out, "Output file");

  ExportArgs export_args;
  auto* data_cmd = app.add_subcommand("data", "Embedded reference tables");
  data_cmd->require_subcommand(1);
  auto* export_cmd = data_cmd->add_subcommand("export", "Dump a table as CSV");
  export_cmd
      ->add_option("--table", export_args.table,
                   "profiles, f1, datasets, errors, coefficients or "
                   "observations")
      ->required()
      ->check(CLI::IsMember({"profiles", "f1", "datasets", "errors",
                             "coefficients", "observations"}));
  export_cmd->add_option("-o,--out", export_args.out, "Output file");

  ReproduceArgs reproduce_args;
  auto* reproduce_cmd = app.add_subcommand(
      "reproduce", "Rebuild the reference analyses from embedded data");
  reproduce_cmd->add_option("--out-dir", reproduce_args.out_dir,
                            "Directory for report.json, report.txt and "
                            "scatter.svg");
  reproduce_cmd->add_option("--alpha", reproduce_args.alpha,
                            "Padded-logit alpha");
  reproduce_cmd->add_option("--interactions", reproduce_args.interactions)
      ->check(CLI::IsMember({"raw_product", "standardized_product"}));
  reproduce_cmd->add_flag("--skip-alpha-search",
                          reproduce_args.skip_alpha_search,
                          "Do not rerun the alpha grid search");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "profile") return run_profile(profile_args, out);
    if (name == "train") return run_train(train_args, out);
    if (name == "tag") return run_tag(tag_args, out);
    if (name == "eval") return run_eval(eval_args, out);
    if (name == "reproduce") return run_reproduce(reproduce_args, out);
    if (name == "data") return run_export(export_args, out);
    if (fit->parsed()) return run_meta_fit(meta_args, out);
    if (cv->parsed()) return run_meta_cv(meta_args, out);
    if (ablate->parsed()) return run_meta_ablate(meta_args, out);
    if (predict->parsed()) return run_meta_predict(meta_args, out);
    if (select->parsed()) return run_meta_select_alpha(meta_args, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  err << "error: no command\n";
  return kExitValidation;
}

}  // namespace spanmeta::cli
