// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails or overruns its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "spanmeta/meta/cross_validation.hpp"
#include "spanmeta/meta/regression.hpp"
#include "spanmeta/meta/transform.hpp"
#include "spanmeta/paper_data.hpp"
#include "spanmeta/seqlab/train.hpp"
#include "spanmeta/span_eval.hpp"
#include "spanmeta/task_metrics.hpp"
#include "support.hpp"

using namespace spanmeta;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

struct Criterion {
  std::string id;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

const std::vector<meta::Observation>& observations() {
  static const auto obs = paper::to_observations(paper::load_embedded());
  return obs;
}

void ac1(Outcome& o) {
  const paper::EmbeddedTables tables = paper::load_embedded();
  const auto reference = paper::dataset_reference();
  o.require(reference.size() == 5, "expected five reference datasets");
  for (const auto& ref : reference) {
    const auto profiles = tables.profiles_of(ref.dataset);
    const metrics::DatasetProfile got = metrics::dataset_profile(profiles);
    // Oracle for the roll-up: sum f^2 / sum f and f-weighted means.
    long double sf = 0, sf2 = 0, len = 0, sd = 0, bd = 0;
    for (const auto& p : profiles) {
      const long double f = static_cast<long double>(p.frequency);
      sf += f;
      sf2 += f * f;
      len += f * p.span_length;
      sd += f * p.span_distinctiveness;
      bd += f * p.boundary_distinctiveness.value();
    }
    const double eps = 1e-9;
    o.require(std::fabs(got.frequency - static_cast<double>(sf2 / sf)) < eps * sf,
              ref.dataset + " frequency roll-up");
    o.require(std::fabs(got.span_length - static_cast<double>(len / sf)) < eps,
              ref.dataset + " length roll-up");
    o.require(std::fabs(got.span_distinctiveness - static_cast<double>(sd / sf)) < eps,
              ref.dataset + " SD roll-up");
    o.require(std::fabs(got.boundary_distinctiveness - static_cast<double>(bd / sf)) < eps,
              ref.dataset + " BD roll-up");

    const bool ok =
        std::fabs(got.frequency - ref.profile.frequency) <= 1.0 &&
        std::fabs(got.span_length - ref.profile.span_length) <= 0.01 + 1e-12 &&
        std::fabs(got.span_distinctiveness - ref.profile.span_distinctiveness) <=
            0.01 + 1e-12 &&
        std::fabs(got.boundary_distinctiveness -
                  ref.profile.boundary_distinctiveness) <= 0.01 + 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.0f/%.2f/%.2f/%.2f", ref.dataset.c_str(),
                  got.frequency, got.span_length, got.span_distinctiveness,
                  got.boundary_distinctiveness);
    o.require(ok, buf);
    if (ok) o.detail << buf << ' ';
  }
}

void ac2(Outcome& o) {
  const paper::EmbeddedTables tables = paper::load_embedded();
  std::vector<long double> x, y;
  for (const auto& e : tables.span_types) {
    x.push_back(std::log(static_cast<long double>(e.profile.frequency)));
    y.push_back(e.profile.span_distinctiveness);
  }
  o.require(x.size() == 36, "expected 36 span types");
  // Standardize both, then r = sum(zx zy) / (n - 1).
  auto standardize = [](std::vector<long double>& v) {
    long double m = 0;
    for (auto a : v) m += a;
    m /= v.size();
    long double ss = 0;
    for (auto a : v) ss += (a - m) * (a - m);
    const long double sd = std::sqrt(ss / (v.size() - 1));
    for (auto& a : v) a = (a - m) / sd;
  };
  standardize(x);
  standardize(y);
  long double r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r += x[i] * y[i];
  r /= (x.size() - 1);
  o.detail << "r = " << static_cast<double>(r);
  o.require(std::fabs(static_cast<double>(r) + 0.46) <= 0.03, "r outside -0.46 +- 0.03");
}

void ac3(Outcome& o) {
  const auto rows = meta::ablate(observations(), meta::kDefaultAlpha);
  o.require(rows.size() == 5, "expected five predictor sets");
  const std::vector<meta::PredictorSet> order{
      meta::PredictorSet::full, meta::PredictorSet::no_interactions,
      meta::PredictorSet::arch_only, meta::PredictorSet::task_only,
      meta::PredictorSet::empty};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    o.require(rows[i].predictors == order[i], "unexpected row order");
    o.detail << meta::to_string(rows[i].predictors) << ' ' << rows[i].mae;
    if (rows[i].r2) o.detail << '/' << *rows[i].r2;
    o.detail << ' ';
    if (i > 0) {
      o.require(rows[i - 1].mae < rows[i].mae,
                "ordering broken at " + std::string(meta::to_string(rows[i].predictors)));
    }
  }
  // MAE oracle for the full row: mean |actual - predicted| recomputed here.
  long double abs_sum = 0;
  for (std::size_t i = 0; i < rows[0].actual.size(); ++i) {
    abs_sum += std::fabs(rows[0].actual[i] - rows[0].predicted[i]);
  }
  o.require(std::fabs(static_cast<double>(abs_sum / rows[0].actual.size()) - rows[0].mae) <
                1e-9,
            "MAE disagrees with its definition");
  o.require(rows[0].actual.size() == 432, "expected 432 predictions");
  o.require(rows[0].mae >= 8 && rows[0].mae <= 16, "full MAE outside [8, 16]");
  o.require(rows[0].r2 && *rows[0].r2 >= 0.55 && *rows[0].r2 <= 0.85,
            "full r2 outside [0.55, 0.85]");
  o.require(rows[4].mae >= 20 && rows[4].mae <= 27, "empty MAE outside [20, 27]");
}

void ac4(Outcome& o) {
  const meta::MetaModel m = meta::fit_meta_model(observations(), meta::kDefaultAlpha);
  const std::vector<std::pair<std::string, int>> expected{
      {"bert", 1},
      {"crf", 1},
      {"lstm", -1},
      {"log_freq", 1},
      {"log_length", -1},
      {"boundary_distinct", 1},
      {"bert:log_freq", -1},
      {"lstm:log_freq", 1},
      {"crf:span_distinct", 1},
      {"crf:boundary_distinct", -1},
      {"crf:bert", -1},
      {"lstm:bert", -1}};
  int agree = 0;
  for (const auto& [term, sign] : expected) {
    const double v = m.coefficient(term);
    if (v * sign > 0) ++agree;
    else o.require(false, term + " has the wrong sign");
  }
  o.detail << agree << "/12 signs";
  const double bert = m.coefficient("bert");
  bool largest = bert > 0;
  for (const char* other : {"feat", "crf", "lstm"}) {
    largest = largest && std::fabs(bert) > std::fabs(m.coefficient(other));
  }
  o.require(largest, "bert is not the largest positive model effect");
  if (largest) o.detail << ", bert largest (" << bert << ')';
}

void ac5(Outcome& o) {
  testing::Rng rng(55);
  double worst = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Corpus c = testing::random_corpus(rng, 50, 3);
    for (const auto& type : c.span_types()) {
      const auto oracle = testing::rational_profile(c, type);
      if (metrics::span_frequency(c, type) != oracle.frequency) {
        o.require(false, "frequency mismatch");
        continue;
      }
      if (oracle.frequency == 0) continue;
      ++checked;
      worst = std::max(worst, std::fabs(metrics::geometric_mean_length(c, type) -
                                        static_cast<double>(oracle.span_length)));
      worst = std::max(worst, std::fabs(metrics::span_distinctiveness(c, type) -
                                        static_cast<double>(oracle.span_distinctiveness)));
      if (oracle.boundary_defined) {
        worst = std::max(worst,
                         std::fabs(metrics::boundary_distinctiveness(c, type) -
                                   static_cast<double>(oracle.boundary_distinctiveness)));
      }
    }
  }
  o.detail << checked << " span types, max error " << worst;
  o.require(worst <= 1e-12, "metric error above 1e-12");
}

template <typename Model>
double gradient_error(Model model, std::span<const seqlab::LabeledSequence> batch) {
  std::vector<double> grad(model.parameters().size());
  model.loss_and_gradient(batch, grad);
  std::vector<double> scratch(grad.size());
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const double saved = model.parameters()[k];
    model.parameters()[k] = saved + h;
    const double up = model.loss_and_gradient(batch, scratch);
    model.parameters()[k] = saved - h;
    const double down = model.loss_and_gradient(batch, scratch);
    model.parameters()[k] = saved;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::fabs(numeric - grad[k]) /
                                std::max(1e-3, std::max(std::fabs(numeric),
                                                        std::fabs(grad[k]))));
  }
  return worst;
}

void ac6(Outcome& o) {
  testing::Rng rng(66);
  double worst_z = 0.0, worst_vit = 0.0, worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int labels = testing::uniform_int(rng, 1, 3);
    const int features = testing::uniform_int(rng, 1, 3);
    seqlab::LinearChainCrfModel m(static_cast<std::size_t>(features),
                                  static_cast<std::size_t>(labels));
    for (double& p : m.parameters()) p = testing::uniform_real(rng, -2.0, 2.0);
    std::vector<seqlab::LabeledSequence> batch;
    for (int b = 0; b < 2; ++b) {
      const int n = testing::uniform_int(rng, 1, 4);
      seqlab::FeatureSequence seq;
      BioSequence y;
      for (int t = 0; t < n; ++t) {
        std::vector<int> active;
        for (int f = 0; f < features; ++f) {
          if (testing::uniform_int(rng, 0, 1)) active.push_back(f);
        }
        seq.push_back(active);
        y.push_back(testing::uniform_int(rng, 0, labels - 1));
      }
      const auto truth = testing::enumerate_crf(m, seq);
      worst_z = std::max(worst_z, std::fabs(m.log_partition(seq) -
                                            static_cast<double>(truth.log_z)));
      const BioSequence best = m.viterbi(seq);
      const std::vector<int> path(best.begin(), best.end());
      worst_vit = std::max(worst_vit,
                           std::fabs(testing::brute_force_score(m, seq, path) -
                                     truth.best_score));
      batch.push_back({seq, y});
    }
    worst_grad = std::max(worst_grad, gradient_error(m, batch));
  }
  o.detail << "log Z " << worst_z << ", viterbi " << worst_vit << ", gradient "
           << worst_grad;
  o.require(worst_z <= 1e-10, "log Z off by more than 1e-10");
  o.require(worst_vit <= 1e-10, "Viterbi path is not optimal");
  o.require(worst_grad < 1e-4, "gradient relative error >= 1e-4");
}

void ac7(Outcome& o) {
  testing::Rng rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  double planted = 0, stats = 0, en = 0, ridge = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testing::uniform_int(rng, 40, 200);
    const int p = testing::uniform_int(rng, 2, 10);
    const Eigen::MatrixXd x = testing::gaussian_design(rng, n, p);
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta(j) = testing::uniform_real(rng, -3, 3);

    const Eigen::VectorXd clean = x * beta;
    const auto exact = meta::ordinary_least_squares(x, clean);
    planted = std::max(planted, (exact.coefficients - beta).cwiseAbs().maxCoeff());

    Eigen::VectorXd y = clean;
    for (int i = 0; i < n; ++i) y(i) += noise(rng);
    const auto r = meta::ordinary_least_squares(x, y);
    const auto oracle = testing::ols_oracle(x, y);
    for (int j = 0; j < p; ++j) {
      stats = std::max(stats, std::fabs(r.standard_errors(j) -
                                        static_cast<double>(oracle.se[j])));
      stats = std::max(stats, std::fabs(r.p_values(j) -
                                        static_cast<double>(oracle.p[j])));
    }
    en = std::max(en, (meta::elastic_net(x, y, 0.0, 0.0) - r.coefficients)
                          .cwiseAbs()
                          .maxCoeff());
    const double lambda = testing::uniform_real(rng, 0.01, 20.0);
    std::vector<long double> penalty(static_cast<std::size_t>(p), lambda);
    penalty[0] = 0;  // intercept unpenalized
    const auto closed = testing::penalized_normal_equations(x, y, penalty);
    const Eigen::VectorXd fitted = meta::elastic_net(x, y, 0.0, lambda);
    for (int j = 0; j < p; ++j) {
      ridge = std::max(ridge, std::fabs(fitted(j) - static_cast<double>(closed[j])));
    }
  }
  o.detail << "planted " << planted << ", se/p " << stats << ", EN " << en
           << ", ridge " << ridge;
  o.require(planted <= 1e-8, "planted coefficients not recovered");
  o.require(stats <= 1e-8, "SE or p-values disagree with the oracle");
  o.require(en <= 1e-6, "zero-penalty elastic net differs from OLS");
  o.require(ridge <= 1e-8, "ridge differs from the closed form");
}

// Two span types, each opened by its own marker word and continued by words
// drawn from an interior vocabulary the types share. Interior tokens carry
// no type information of their own; the type comes from the preceding label.
Corpus adjacency_corpus(int docs, std::uint64_t seed, Partition partition) {
  testing::Rng rng(seed);
  std::vector<Document> out;
  for (int d = 0; d < docs; ++d) {
    std::vector<Token> tokens;
    std::vector<Span> spans;
    const int n = testing::uniform_int(rng, 10, 16);
    while (static_cast<int>(tokens.size()) < n) {
      const int len = testing::uniform_int(rng, 2, 4);
      if (testing::uniform_int(rng, 0, 2) == 0 &&
          static_cast<int>(tokens.size()) + len + 1 <= n) {
        const bool first = testing::uniform_int(rng, 0, 1) == 0;
        const std::size_t start = tokens.size();
        tokens.emplace_back(first ? "alpha" : "beta");
        for (int k = 1; k < len; ++k) {
          tokens.emplace_back("in" + std::to_string(testing::uniform_int(rng, 0, 4)));
        }
        spans.push_back({first ? "A" : "B", start, tokens.size()});
      }
      tokens.emplace_back("out" + std::to_string(testing::uniform_int(rng, 0, 7)));
    }
    out.emplace_back("g" + std::to_string(d), std::move(tokens), std::move(spans));
  }
  return Corpus(std::move(out), {"A", "B"}, partition);
}

void ac8(Outcome& o) {
  double crf_sum = 0, base_sum = 0;
  const int seeds = 5;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const Corpus train_c = adjacency_corpus(80, 100 + seed, Partition::train);
    const Corpus dev_c = adjacency_corpus(20, 200 + seed, Partition::dev);
    const Corpus test_c = adjacency_corpus(40, 300 + seed, Partition::test);
    seqlab::TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 30;
    cfg.seed = seed;
    const auto crf = seqlab::train(seqlab::Architecture::crf, train_c, dev_c, cfg);
    const auto base =
        seqlab::train(seqlab::Architecture::baseline, train_c, dev_c, cfg);
    crf_sum += seqlab::micro_f1(crf.model, test_c);
    base_sum += seqlab::micro_f1(base.model, test_c);
  }
  const double crf_f1 = crf_sum / seeds, base_f1 = base_sum / seeds;
  o.detail << "CRF " << crf_f1 << " vs baseline " << base_f1;
  o.require(crf_f1 - base_f1 > 5.0, "CRF margin not above 5 F1 points");
}

void ac9(Outcome& o) {
  double worst = 0.0;
  for (double alpha : {0.0, 0.05, 0.2, 0.45}) {
    for (int k = 0; k <= 1000; ++k) {
      const double f1 = k * 0.1;
      if (alpha == 0.0 && (k == 0 || k == 1000)) continue;  // unbounded ends
      const double back =
          meta::inverse_padded_logit(meta::padded_logit(f1, alpha), alpha);
      worst = std::max(worst, std::fabs(back - f1));
    }
  }
  o.detail << "round trip " << worst;
  o.require(worst <= 1e-9, "padded-logit round trip above 1e-9");

  const std::vector<Span> gold{{"A", 0, 2}, {"B", 3, 4}};
  const std::vector<Span> pred{{"A", 0, 2}, {"B", 3, 5}};
  const eval::F1Report r = eval::f1_report(eval::count_matches(gold, pred));
  o.require(r.micro.precision == 50.0 && r.micro.recall == 50.0 &&
                r.micro.f1 == 50.0,
            "one TP, one FP, one FN is not exactly 50.0");
  eval::EvalCounts two;
  two["A"] = {1, 0, 0};
  two["B"] = {0, 1, 1};
  const eval::F1Report t = eval::f1_report(two);
  o.require(t.micro.f1 == 50.0 && t.per_type.at("A").f1 == 100.0 &&
                t.per_type.at("B").f1 == 0.0,
            "per-type/micro hand case");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC-1", 1.0, ac1},  {"AC-2", 1.0, ac2},  {"AC-3", 60.0, ac3},
      {"AC-4", 60.0, ac4}, {"AC-5", 5.0, ac5},  {"AC-6", 10.0, ac6},
      {"AC-7", 60.0, ac7}, {"AC-8", 120.0, ac8}, {"AC-9", 10.0, ac9}};
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) {
      std::ostringstream why;
      why << "took " << secs << " s, budget " << c.budget_seconds << " s";
      o.require(false, why.str());
    }
    if (!o.pass) ++failures;
    std::printf("%s %s (%.2f s) %s\n", c.id.c_str(), o.pass ? "PASS" : "FAIL",
                secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
