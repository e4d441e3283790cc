#include "spanmeta/meta/regression.hpp"

#include <cmath>

#include "spanmeta/error.hpp"
#include "spanmeta/meta/stats.hpp"

namespace spanmeta::meta {

OlsResult ordinary_least_squares(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y,
                                 std::span<const std::string> names) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (y.size() != n) {
    throw ValidationError("response has " + std::to_string(y.size()) +
                          " rows, design has " + std::to_string(n));
  }
  if (p == 0) throw ValidationError("design matrix has no columns");
  if (n <= p) {
    throw ValidationError("least squares needs more rows (" +
                          std::to_string(n) + ") than columns (" +
                          std::to_string(p) + ")");
  }
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != p) {
    throw ValidationError("column name count does not match the design");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string msg = "design matrix is rank deficient (rank " +
                      std::to_string(qr.rank()) + " of " + std::to_string(p) +
                      "); dependent columns:";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      const auto col = perm(k);
      msg += ' ';
      msg += names.empty() ? std::to_string(col)
                           : names[static_cast<std::size_t>(col)];
    }
    throw ValidationError(msg);
  }

  OlsResult r;
  r.coefficients = qr.solve(y);
  r.residuals = y - x * r.coefficients;
  r.residual_df = static_cast<int>(n - p);
  r.residual_variance = r.residuals.squaredNorm() / r.residual_df;

  // (X'X)^-1 = P R^-1 R^-T P' for X P = Q R.
  const Eigen::MatrixXd upper =
      qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      upper.triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_permuted = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation().indices();
  r.standard_errors.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    r.standard_errors(perm(k)) =
        std::sqrt(r.residual_variance * cov_permuted(k, k));
  }
  r.t_statistics = r.coefficients.cwiseQuotient(r.standard_errors);
  r.p_values.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    r.p_values(k) = student_t_two_sided_p(r.t_statistics(k), r.residual_df);
  }
  return r;
}

Eigen::VectorXd elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double l1, double l2,
                            const ElasticNetOptions& options) {
  if (l1 < 0.0 || l2 < 0.0 || !std::isfinite(l1) || !std::isfinite(l2)) {
    throw ValidationError("elastic-net weights must be finite and "
                          "non-negative");
  }
  const Eigen::Index n = x.rows(), p = x.cols();
  if (y.size() != n) {
    throw ValidationError("response has " + std::to_string(y.size()) +
                          " rows, design has " + std::to_string(n));
  }
  if (p == 0) throw ValidationError("design matrix has no columns");

  const Eigen::VectorXd col_sq = x.colwise().squaredNorm().transpose();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = y;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0, max_abs = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool penalized = !(options.intercept_first && j == 0);
      const double lam1 = penalized ? l1 : 0.0;
      const double lam2 = penalized ? l2 : 0.0;
      const double denom = col_sq(j) + lam2;
      if (denom == 0.0) continue;  // all-zero unpenalized column
      const double rho = x.col(j).dot(residual) + col_sq(j) * beta(j);
      double updated = 0.0;
      if (rho > lam1) updated = (rho - lam1) / denom;
      else if (rho < -lam1) updated = (rho + lam1) / denom;
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        residual -= delta * x.col(j);
        beta(j) = updated;
      }
      max_change = std::max(max_change, std::fabs(delta));
      max_abs = std::max(max_abs, std::fabs(updated));
    }
    if (max_change <= options.tolerance * (1.0 + max_abs)) return beta;
  }
  throw Error("elastic net did not converge within " +
              std::to_string(options.max_sweeps) + " sweeps");
}

}  // namespace spanmeta::meta
