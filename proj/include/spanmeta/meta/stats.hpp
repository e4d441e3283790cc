#pragma once

#include <span>

namespace spanmeta::meta {

// I_x(a, b), continued-fraction evaluation (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);
// P(|T| >= |t|) for T ~ t(df).
double student_t_two_sided_p(double t, double df);

double mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> values);
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace spanmeta::meta
