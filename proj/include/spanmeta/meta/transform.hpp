#pragma once

namespace spanmeta::meta {

// logit((1 - alpha) * f1/100 + alpha * (100 - f1)/100): maps [0, 100] onto
// [logit(alpha), logit(1 - alpha)], finite at 0 and 100.
// Requires 0 <= f1 <= 100 and 0 <= alpha < 0.5.
double padded_logit(double f1, double alpha);

// 100 * (sigmoid(x) - alpha) / (1 - 2 alpha), before clamping.
double inverse_padded_logit_unclamped(double transformed, double alpha);

// The unclamped inverse clamped to [0, 100].
double inverse_padded_logit(double transformed, double alpha);

void check_alpha(double alpha);

}  // namespace spanmeta::meta
