#pragma once

#include <span>
#include <vector>

namespace eqppo::harness {

struct MannKendallResult {
  long long s = 0;
  double variance = 0.0;  // tie-corrected
  double z = 0.0;
  double p_two_sided = 1.0;
  double p_increasing = 1.0;  // one-sided, alternative: upward trend
  double sen_slope = 0.0;     // median pairwise slope per index step
};

/// Mann-Kendall trend test with the normal approximation and continuity
/// correction. Fewer than 3 points give S = 0, p = 1.
MannKendallResult mann_kendall(std::span<const double> series);

/// Element-wise mean of equally long curves; shorter curves truncate the result.
std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1); 0 for fewer than 2 points.
double stddev(std::span<const double> x);

}  // namespace eqppo::harness
