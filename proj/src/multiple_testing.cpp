#include "mdscan/multiple_testing.hpp"

#include <algorithm>
#include <numeric>

#include "mdscan/error.hpp"

namespace mdscan {
namespace {

void check(std::span<const double> p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidArgument, "p-values must lie in [0, 1]");
}

std::vector<std::size_t> ascending(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return order;
}

}  // namespace

Selection holm_select(std::span<const double> p, double alpha) {
  check(p, alpha);
  const std::size_t m = p.size();
  Selection out{std::vector<bool>(m, false), std::vector<double>(m, 1.0)};
  const auto order = ascending(p);
  bool rejecting = true;
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double factor = static_cast<double>(m - i);
    const double q = p[order[i]];
    rejecting = rejecting && q <= alpha / factor;
    out.relevant[order[i]] = rejecting;
    running = std::max(running, std::min(1.0, factor * q));
    out.adjusted[order[i]] = running;
  }
  return out;
}

Selection bh_select(std::span<const double> p, double alpha) {
  check(p, alpha);
  const std::size_t m = p.size();
  Selection out{std::vector<bool>(m, false), std::vector<double>(m, 1.0)};
  const auto order = ascending(p);
  std::size_t cutoff = 0;  // number of rejections
  for (std::size_t i = m; i > 0; --i) {
    if (p[order[i - 1]] <= static_cast<double>(i) * alpha / static_cast<double>(m)) {
      cutoff = i;
      break;
    }
  }
  double running = 1.0;
  for (std::size_t i = m; i > 0; --i) {
    const double q = p[order[i - 1]];
    running = std::min(running, static_cast<double>(m) * q / static_cast<double>(i));
    out.adjusted[order[i - 1]] = std::min(1.0, running);
    out.relevant[order[i - 1]] = i <= cutoff;
  }
  return out;
}

}  // namespace mdscan
