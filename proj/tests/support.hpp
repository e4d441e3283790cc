#pragma once

// Shared generators and reference implementations for the test binaries.
// The oracles deliberately take different computational routes from the
// library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include "spanmeta/corpus.hpp"
#include "spanmeta/seqlab/linear_models.hpp"

namespace testing {

using Rational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_50;
using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random training corpus with at most `max_tokens` tokens in total, at most
// `max_types` span types and a small vocabulary so that words repeat.
inline spanmeta::Corpus random_corpus(Rng& rng, int max_tokens = 50,
                                      int max_types = 3, int vocab = 6) {
  const int num_types = uniform_int(rng, 1, max_types);
  std::vector<std::string> types;
  for (int t = 0; t < num_types; ++t) types.push_back("T" + std::to_string(t));
  int budget = uniform_int(rng, 1, max_tokens);
  std::vector<spanmeta::Document> docs;
  while (budget > 0) {
    const int n = uniform_int(rng, 1, std::min(budget, 15));
    budget -= n;
    std::vector<spanmeta::Token> tokens;
    for (int i = 0; i < n; ++i) {
      tokens.emplace_back("w" + std::to_string(uniform_int(rng, 0, vocab - 1)));
    }
    std::vector<spanmeta::Span> spans;
    int pos = 0;
    while (pos < n) {
      if (uniform_int(rng, 0, 2) == 0) {
        const int len = uniform_int(rng, 1, std::min(4, n - pos));
        spans.push_back({types[static_cast<std::size_t>(
                             uniform_int(rng, 0, num_types - 1))],
                         static_cast<std::size_t>(pos),
                         static_cast<std::size_t>(pos + len)});
        pos += len;
      } else {
        ++pos;
      }
    }
    docs.emplace_back("d" + std::to_string(docs.size()), std::move(tokens),
                      std::move(spans));
  }
  return spanmeta::Corpus(std::move(docs), types);
}

// Exact counts of the four metric inputs, gathered by walking token
// positions with a per-position type array rather than iterating spans.
struct RationalProfile {
  std::size_t frequency = 0;
  BigFloat span_length;  // geometric mean
  BigFloat span_distinctiveness;
  bool boundary_defined = false;
  BigFloat boundary_distinctiveness;
};

inline BigFloat rational_kl(const std::map<std::string, std::size_t>& p,
                            const std::map<std::string, std::size_t>& q) {
  Rational p_total = 0, q_total = 0;
  for (const auto& [w, c] : p) p_total += c;
  for (const auto& [w, c] : q) q_total += c;
  BigFloat kl = 0;
  for (const auto& [w, c] : p) {
    const Rational pw = Rational(c) / p_total;
    const Rational qw = Rational(q.at(w)) / q_total;
    kl += BigFloat(pw) * boost::multiprecision::log(BigFloat(pw / qw));
  }
  return kl;
}

inline RationalProfile rational_profile(const spanmeta::Corpus& corpus,
                                        const std::string& type) {
  std::map<std::string, std::size_t> all, inside, boundary;
  std::vector<std::size_t> lengths;
  for (const auto& doc : corpus.documents()) {
    const std::size_t n = doc.size();
    // span id covering each position, or -1
    std::vector<long> owner(n, -1);
    for (std::size_t s = 0; s < doc.spans().size(); ++s) {
      for (std::size_t i = doc.spans()[s].start; i < doc.spans()[s].end; ++i) {
        owner[i] = static_cast<long>(s);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& w = doc.tokens()[i].surface();
      ++all[w];
      if (owner[i] < 0) continue;
      const auto& span = doc.spans()[static_cast<std::size_t>(owner[i])];
      if (span.type != type) continue;
      ++inside[w];
      const bool first = i == 0 || owner[i - 1] != owner[i];
      const bool last = i + 1 == n || owner[i + 1] != owner[i];
      if (first) {
        std::size_t len = 0;
        while (i + len < n && owner[i + len] == owner[i]) ++len;
        lengths.push_back(len);
        if (i > 0) ++boundary[doc.tokens()[i - 1].surface()];
      }
      if (last && i + 1 < n) ++boundary[doc.tokens()[i + 1].surface()];
    }
  }
  RationalProfile out;
  out.frequency = lengths.size();
  if (lengths.empty()) return out;
  BigFloat log_sum = 0;
  for (std::size_t len : lengths) log_sum += boost::multiprecision::log(BigFloat(len));
  out.span_length = boost::multiprecision::exp(log_sum / lengths.size());
  out.span_distinctiveness = rational_kl(inside, all);
  out.boundary_defined = !boundary.empty();
  if (out.boundary_defined) {
    out.boundary_distinctiveness = rational_kl(boundary, all);
  }
  return out;
}

// Score of one labeling from the model's accessors, written out term by
// term; -inf for masked transitions.
inline double brute_force_score(const spanmeta::seqlab::LinearChainCrfModel& m,
                                const spanmeta::seqlab::FeatureSequence& seq,
                                const std::vector<int>& y) {
  double s = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    s += m.bias(y[t]);
    for (int f : seq[t]) s += m.weight(f, y[t]);
    if (t == 0) {
      if (!m.start_allowed(y[0])) return -std::numeric_limits<double>::infinity();
      s += m.start(y[0]);
    } else {
      if (!m.transition_allowed(y[t - 1], y[t])) {
        return -std::numeric_limits<double>::infinity();
      }
      s += m.transition(y[t - 1], y[t]);
    }
  }
  return s + m.stop(y.back());
}

// Every label sequence of length n over L labels, in lexicographic order.
inline std::vector<std::vector<int>> all_labelings(std::size_t n, int labels) {
  std::vector<std::vector<int>> out;
  std::vector<int> y(n, 0);
  while (true) {
    out.push_back(y);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++y[k] < labels) break;
      y[k] = 0;
      if (k == 0) return out;
    }
    if (n == 0) return out;
  }
}

struct EnumerationResult {
  long double log_z = 0;
  std::vector<int> best;
  double best_score = -std::numeric_limits<double>::infinity();
};

inline EnumerationResult enumerate_crf(
    const spanmeta::seqlab::LinearChainCrfModel& m,
    const spanmeta::seqlab::FeatureSequence& seq) {
  EnumerationResult r;
  std::vector<double> scores;
  for (const auto& y : all_labelings(seq.size(),
                                     static_cast<int>(m.num_labels()))) {
    const double s = brute_force_score(m, seq, y);
    scores.push_back(s);
    if (s > r.best_score) {
      r.best_score = s;
      r.best = y;
    }
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  long double acc = 0;
  for (double s : scores) acc += std::exp(static_cast<long double>(s - mx));
  r.log_z = mx + std::log(acc);
  return r;
}

// Textbook OLS in extended precision: normal equations solved by
// Gauss-Jordan elimination with partial pivoting.
struct OlsOracle {
  std::vector<long double> beta, se, t, p;
  long double sigma2 = 0;
  int df = 0;
};

inline std::vector<std::vector<long double>> invert(
    std::vector<std::vector<long double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<long double>> inv(n, std::vector<long double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const long double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// (X'X + diag(penalty))^-1 X'y.
inline std::vector<long double> penalized_normal_equations(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
    const std::vector<long double>& penalty,
    std::vector<std::vector<long double>>* inverse_out = nullptr) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0));
  std::vector<long double> xty(p, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      const long double xa = x(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(a));
      xty[a] += xa * y(static_cast<Eigen::Index>(i));
      for (std::size_t b = 0; b < p; ++b) {
        xtx[a][b] += xa * static_cast<long double>(
                              x(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(b)));
      }
    }
  }
  for (std::size_t a = 0; a < p; ++a) xtx[a][a] += penalty[a];
  const auto inv = invert(xtx);
  std::vector<long double> beta(p, 0);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) beta[a] += inv[a][b] * xty[b];
  }
  if (inverse_out != nullptr) *inverse_out = inv;
  return beta;
}

inline OlsOracle ols_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  std::vector<std::vector<long double>> inv;
  OlsOracle o;
  o.beta = penalized_normal_equations(x, y, std::vector<long double>(p, 0),
                                      &inv);
  long double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double fit = 0;
    for (std::size_t a = 0; a < p; ++a) {
      fit += o.beta[a] * x(static_cast<Eigen::Index>(i),
                           static_cast<Eigen::Index>(a));
    }
    const long double r = y(static_cast<Eigen::Index>(i)) - fit;
    rss += r * r;
  }
  o.df = static_cast<int>(n - p);
  o.sigma2 = rss / o.df;
  boost::math::students_t_distribution<long double> dist(o.df);
  for (std::size_t a = 0; a < p; ++a) {
    o.se.push_back(std::sqrt(o.sigma2 * inv[a][a]));
    o.t.push_back(o.beta[a] / o.se.back());
    o.p.push_back(2 * boost::math::cdf(boost::math::complement(
                          dist, std::fabs(o.t.back()))));
  }
  return o;
}

// Design with an intercept column followed by standard-normal columns.
inline Eigen::MatrixXd gaussian_design(Rng& rng, int n, int p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) x(i, j) = normal(rng);
  }
  return x;
}

}  // namespace testing
