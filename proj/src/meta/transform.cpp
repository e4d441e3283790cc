#include "spanmeta/meta/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spanmeta/error.hpp"

namespace spanmeta::meta {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw ValidationError("padding alpha must lie in [0, 0.5), got " +
                          std::to_string(alpha));
  }
}

double padded_logit(double f1, double alpha) {
  check_alpha(alpha);
  if (!(f1 >= 0.0 && f1 <= 100.0)) {
    throw ValidationError("F1 score must lie in [0, 100], got " +
                          std::to_string(f1));
  }
  const double q = (1.0 - alpha) * f1 / 100.0 + alpha * (100.0 - f1) / 100.0;
  return std::log(q) - std::log1p(-q);
}

double inverse_padded_logit_unclamped(double transformed, double alpha) {
  check_alpha(alpha);
  const double sigmoid = 1.0 / (1.0 + std::exp(-transformed));
  return 100.0 * (sigmoid - alpha) / (1.0 - 2.0 * alpha);
}

double inverse_padded_logit(double transformed, double alpha) {
  return std::clamp(inverse_padded_logit_unclamped(transformed, alpha), 0.0,
                    100.0);
}

}  // namespace spanmeta::meta
