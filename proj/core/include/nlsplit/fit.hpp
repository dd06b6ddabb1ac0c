#pragma once

#include <string>
#include <vector>

namespace nlsplit {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;   // RMS of log-residuals
  double ci_low = 0.0;     // 95% confidence interval of the slope
  double ci_high = 0.0;    // (infinite for two points)
  int points_used = 0;
  int points_excluded = 0;  // non-positive values dropped
};

/// Ordinary least squares of log(y) on log(x). Non-positive pairs are
/// excluded and counted. Throws ValidationError with fewer than two
/// positive pairs.
FitResult fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlsplit
