#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spanmeta::meta {

struct OlsResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;  // sqrt(diag(sigma^2 (X'X)^-1))
  Eigen::VectorXd t_statistics;
  Eigen::VectorXd p_values;  // two-sided, t distribution with residual_df
  Eigen::VectorXd residuals;
  double residual_variance = 0.0;  // RSS / (n - p)
  int residual_df = 0;
};

// Least squares through a column-pivoted QR decomposition. Requires more
// rows than columns and full column rank; a rank-deficient X raises a
// ValidationError listing the columns (by `names`, when given) that are
// linearly dependent on the others.
OlsResult ordinary_least_squares(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y,
                                 std::span<const std::string> names = {});

struct ElasticNetOptions {
  // Column 0 is an intercept and is not penalized.
  bool intercept_first = true;
  int max_sweeps = 200000;
  double tolerance = 1e-13;
};

// Minimizes 0.5 ||y - X b||^2 + l1 sum |b_j| + 0.5 l2 sum b_j^2 over the
// penalized columns by cyclic coordinate descent.
Eigen::VectorXd elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double l1, double l2,
                            const ElasticNetOptions& options = {});

}  // namespace spanmeta::meta
