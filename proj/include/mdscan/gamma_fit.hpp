#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdscan {

struct GammaFitConfig {
  double alpha = 0.1;            // lower-tail exclusion uses alpha / n at the current fit
  unsigned max_iterations = 20;
  std::size_t min_used = 10;
};

// Rate of the exponential law P(p_min < v) = 1 - exp(-gamma v) fitted to the
// null part of a p_min sample.
struct ExponentialFit {
  double gamma = 0.0;
  std::size_t n_used = 0;
  std::size_t n_trimmed_low = 0;   // presumed-relevant small values
  std::size_t n_trimmed_high = 0;  // outlying large values
  double fit_error = 0.0;          // weighted mean squared quantile error of the retained set
  unsigned iterations = 0;
  bool refused = false;
  // retained[i] is true when input value i entered the final estimate.
  std::vector<bool> retained;
};

// Iterates: drop values whose exponential p-value at the current gamma is
// below alpha/n, trim the T largest values (T chosen to minimize the
// quantile error), re-estimate gamma as the reciprocal of the mean.
ExponentialFit estimate_gamma(std::span<const double> p_mins, const GammaFitConfig& config = {});

// Weighted mean squared error between sorted values and exponential(gamma)
// quantiles at plotting positions (i - 0.5) / m. Weights are the inverse
// variances of exponential order statistics.
double quantile_fit_error(std::span<const double> sorted_values, double gamma);

}  // namespace mdscan
