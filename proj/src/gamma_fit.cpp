#include "mdscan/gamma_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mdscan/distributions.hpp"
#include "mdscan/error.hpp"

namespace mdscan {
namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double quantile_fit_error(std::span<const double> sorted_values, double gamma) {
  const std::size_t m = sorted_values.size();
  if (m == 0 || !(gamma > 0.0)) return std::numeric_limits<double>::infinity();
  // Var of the i-th of m exponential order statistics, in units of 1/gamma^2:
  // sum_{j = m-i+1}^{m} 1/j^2.
  double variance = 0.0;
  double weighted = 0.0;
  double weights = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double j = static_cast<double>(m - i);
    variance += 1.0 / (j * j);
    const double position = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double model = -std::log1p(-position);
    const double d = gamma * sorted_values[i] - model;
    const double w = 1.0 / variance;
    weighted += w * d * d;
    weights += w;
  }
  return weighted / weights;
}

ExponentialFit estimate_gamma(std::span<const double> p_mins, const GammaFitConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail(ErrorCode::InvalidArgument, "fit alpha must be in (0, 1)");
  for (double p : p_mins)
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "p_min values must lie in [0, 1]");

  const std::size_t n = p_mins.size();
  ExponentialFit fit;
  fit.retained.assign(n, false);
  if (n < config.min_used || n == 0) {
    fit.refused = true;
    return fit;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_mins[a] < p_mins[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = p_mins[order[i]];

  const double mean_all = mean_of(sorted);
  if (!(mean_all > 0.0)) {
    fit.refused = true;
    return fit;
  }
  double gamma = 1.0 / mean_all;
  const std::size_t max_trim = std::max<std::size_t>(2, n / 100);
  const double threshold = config.alpha / static_cast<double>(n);

  std::size_t low = 0, high = 0;
  for (unsigned iteration = 1; iteration <= config.max_iterations; ++iteration) {
    fit.iterations = iteration;
    // (a) presumed-relevant lower tail under the current fit
    std::size_t new_low = 0;
    while (new_low < n && exponential_pvalue(sorted[new_low], gamma) < threshold) ++new_low;
    const std::size_t remaining = n - new_low;
    if (remaining < config.min_used) {
      low = new_low;
      high = 0;
      fit.refused = true;
      break;
    }
    // (b) trim T largest values, T minimizing the quantile error
    std::size_t best_t = 0;
    double best_error = std::numeric_limits<double>::infinity();
    double best_gamma = gamma;
    for (std::size_t t = 0; t <= max_trim && remaining - t >= config.min_used; ++t) {
      const std::span<const double> kept(sorted.data() + new_low, remaining - t);
      const double mean = mean_of(kept);
      if (!(mean > 0.0)) continue;
      const double g = 1.0 / mean;
      const double error = quantile_fit_error(kept, g);
      if (error < best_error) {
        best_error = error;
        best_t = t;
        best_gamma = g;
      }
    }
    if (!std::isfinite(best_error)) {
      low = new_low;
      fit.refused = true;
      break;
    }
    // (c) reciprocal of the mean of the retained values
    const bool stable = iteration > 1 && new_low == low && best_t == high;
    low = new_low;
    high = best_t;
    gamma = best_gamma;
    fit.fit_error = best_error;
    if (stable) break;
  }

  fit.n_trimmed_low = low;
  fit.n_trimmed_high = fit.refused ? 0 : high;
  if (fit.refused) {
    fit.n_used = n - low;
    fit.gamma = 0.0;
    return fit;
  }
  fit.gamma = gamma;
  fit.n_used = n - low - high;
  for (std::size_t i = low; i < n - high; ++i) fit.retained[order[i]] = true;
  return fit;
}

}  // namespace mdscan
