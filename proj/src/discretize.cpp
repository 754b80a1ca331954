#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "mdscan/dataset.hpp"
#include "mdscan/error.hpp"

namespace mdscan {
namespace {

// Sorted view of a column: run r holds the r-th distinct value, and
// prefix[r] counts the objects in runs [0, r).
struct Runs {
  std::vector<std::size_t> order;     // object indices sorted by value
  std::vector<std::size_t> run_of;    // run index per sorted position
  std::vector<std::size_t> prefix;    // size D + 1
  std::size_t count() const { return prefix.size() - 1; }
};

Runs make_runs(std::span<const double> values) {
  Runs runs;
  runs.order.resize(values.size());
  std::iota(runs.order.begin(), runs.order.end(), std::size_t{0});
  std::stable_sort(runs.order.begin(), runs.order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  runs.run_of.resize(values.size());
  runs.prefix.push_back(0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && values[runs.order[i]] != values[runs.order[i - 1]]) runs.prefix.push_back(i);
    runs.run_of[i] = runs.prefix.size() - 1;
  }
  runs.prefix.push_back(values.size());
  return runs;
}

// Allowed group sizes for integer deviation bound e: |C s - N| <= e.
struct Band {
  std::size_t lo;
  std::size_t hi;
};

Band band_for(std::uint64_t e, std::size_t n, unsigned c_target) {
  const auto N = static_cast<std::int64_t>(n);
  const auto C = static_cast<std::int64_t>(c_target);
  const auto E = static_cast<std::int64_t>(e);
  std::int64_t lo = N - E <= 0 ? 1 : (N - E + C - 1) / C;
  std::int64_t hi = (N + E) / C;
  lo = std::max<std::int64_t>(lo, 1);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max<std::int64_t>(hi, 0))};
}

// True when runs can be split into exactly `groups` contiguous groups with
// every group size inside the band.
bool feasible(const std::vector<std::size_t>& prefix, unsigned groups, Band band) {
  if (band.hi < band.lo) return false;
  const std::size_t D = prefix.size() - 1;
  std::vector<char> reach(D + 1, 0), next(D + 1, 0);
  std::vector<std::size_t> cumulative(D + 2, 0);
  reach[0] = 1;
  for (unsigned step = 0; step < groups; ++step) {
    for (std::size_t p = 0; p <= D; ++p) cumulative[p + 1] = cumulative[p] + static_cast<std::size_t>(reach[p]);
    std::fill(next.begin(), next.end(), 0);
    std::size_t pa = 0;  // first p with prefix[p] >= prefix[q] - hi
    std::size_t pb = 0;  // first p with prefix[p] > prefix[q] - lo
    bool any = false;
    for (std::size_t q = 1; q <= D; ++q) {
      const std::size_t at = prefix[q];
      while (pa < q && prefix[pa] + band.hi < at) ++pa;
      while (pb < q && prefix[pb] + band.lo <= at) ++pb;
      if (pb > pa && cumulative[pb] - cumulative[pa] > 0) {
        next[q] = 1;
        any = true;
      }
    }
    if (!any) return false;
    reach.swap(next);
  }
  return reach[D] != 0;
}

// Smallest feasible deviation for exactly `groups` groups within [0, upper];
// returns upper + 1 when none.
std::uint64_t min_deviation(const std::vector<std::size_t>& prefix, unsigned groups, unsigned c_target,
                            std::uint64_t upper) {
  const std::size_t n = prefix.back();
  if (!feasible(prefix, groups, band_for(upper, n, c_target))) return upper + 1;
  std::uint64_t lo = 0, hi = upper;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (feasible(prefix, groups, band_for(mid, n, c_target)))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

// Among splits with every size in the band, minimizes sum (C s - N)^2 and
// breaks ties toward the lexicographically smallest boundary sequence.
// Returns the interior boundaries as run indices.
std::vector<std::size_t> best_partition(const std::vector<std::size_t>& prefix, unsigned groups, unsigned c_target,
                                        Band band) {
  const std::size_t D = prefix.size() - 1;
  const double N = static_cast<double>(prefix.back());
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](std::size_t size) {
    const double d = static_cast<double>(c_target) * static_cast<double>(size) - N;
    return d * d;
  };
  auto first_q = [&](std::size_t p) {
    return static_cast<std::size_t>(std::lower_bound(prefix.begin() + static_cast<std::ptrdiff_t>(p) + 1, prefix.end(),
                                                     prefix[p] + band.lo) -
                                    prefix.begin());
  };
  // f[j][p]: cheapest split of runs [p, D) into j groups.
  std::vector<std::vector<double>> f(groups + 1, std::vector<double>(D + 1, inf));
  f[0][D] = 0.0;
  for (unsigned j = 1; j <= groups; ++j) {
    for (std::size_t p = 0; p < D; ++p) {
      double best = inf;
      for (std::size_t q = first_q(p); q <= D && prefix[q] - prefix[p] <= band.hi; ++q) {
        if (f[j - 1][q] == inf) continue;
        best = std::min(best, cost(prefix[q] - prefix[p]) + f[j - 1][q]);
      }
      f[j][p] = best;
    }
  }
  if (f[groups][0] == inf) fail(ErrorCode::Internal, "equipotent split: infeasible band");
  std::vector<std::size_t> boundaries;
  std::size_t p = 0;
  for (unsigned j = groups; j > 1; --j) {
    for (std::size_t q = first_q(p); q <= D; ++q) {
      if (f[j - 1][q] != inf && cost(prefix[q] - prefix[p]) + f[j - 1][q] == f[j][p]) {
        boundaries.push_back(q);
        p = q;
        break;
      }
    }
  }
  return boundaries;
}

Discretized codes_from_boundaries(const Runs& runs, const std::vector<std::size_t>& boundaries) {
  const std::size_t D = runs.count();
  std::vector<std::uint8_t> group_of_run(D);
  std::size_t g = 0, b = 0;
  for (std::size_t r = 0; r < D; ++r) {
    while (b < boundaries.size() && boundaries[b] <= r) {
      ++b;
      ++g;
    }
    group_of_run[r] = static_cast<std::uint8_t>(g);
  }
  Discretized out;
  out.cardinality = static_cast<unsigned>(boundaries.size() + 1);
  out.codes.resize(runs.order.size());
  for (std::size_t i = 0; i < runs.order.size(); ++i) out.codes[runs.order[i]] = group_of_run[runs.run_of[i]];
  return out;
}

void check_args(std::span<const double> values, unsigned n_categories) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "cannot discretize an empty column");
  if (n_categories < 2 || n_categories > kMaxCategories) fail(ErrorCode::InvalidArgument, "n_categories must be in [2, 255]");
}

}  // namespace

std::optional<Discretized> discretize_equipotent(std::span<const double> values, unsigned n_categories) {
  check_args(values, n_categories);
  const Runs runs = make_runs(values);
  const std::size_t D = runs.count();
  if (D < 2) return std::nullopt;

  // Minimize the largest |C s - N| first; on ties keep more categories.
  const std::uint64_t upper = static_cast<std::uint64_t>(n_categories) * values.size();
  const unsigned max_groups = static_cast<unsigned>(std::min<std::size_t>(n_categories, D));
  unsigned best_groups = 0;
  std::uint64_t best_e = upper + 1;
  for (unsigned c = max_groups; c >= 1; --c) {
    if (best_e == 0) break;
    const std::uint64_t e = min_deviation(runs.prefix, c, n_categories, best_groups ? best_e - 1 : upper);
    if (e < best_e) {
      best_e = e;
      best_groups = c;
    }
  }
  if (best_groups < 2) {
    // A single group cannot beat two when D >= 2 and C >= 2, but guard anyway.
    best_groups = 2;
    best_e = min_deviation(runs.prefix, 2, n_categories, upper);
  }
  const auto boundaries = best_partition(runs.prefix, best_groups, n_categories, band_for(best_e, values.size(), n_categories));
  return codes_from_boundaries(runs, boundaries);
}

std::optional<Discretized> discretize_shifted(std::span<const double> values, unsigned n_categories,
                                              double shift_magnitude, CounterRng& rng) {
  check_args(values, n_categories);
  if (!(shift_magnitude >= 0.0 && shift_magnitude < 0.5))
    fail(ErrorCode::InvalidArgument, "shift_magnitude must be in [0, 0.5)");
  // Draw first so the stream position does not depend on the data.
  std::vector<double> offsets(n_categories - 1);
  for (auto& u : offsets) u = rng.uniform(-shift_magnitude, shift_magnitude);
  if (shift_magnitude == 0.0) return discretize_equipotent(values, n_categories);

  const Runs runs = make_runs(values);
  const std::size_t D = runs.count();
  if (D < 2) return std::nullopt;

  const double n = static_cast<double>(values.size());
  const double width = n / n_categories;
  std::vector<std::size_t> boundaries;
  for (unsigned i = 1; i < n_categories; ++i) {
    const double target = width * i + offsets[i - 1] * width;
    // Nearest interior run boundary; ties go to the lower one.
    auto it = std::lower_bound(runs.prefix.begin() + 1, runs.prefix.end() - 1, target,
                               [](std::size_t p, double t) { return static_cast<double>(p) < t; });
    std::size_t q = static_cast<std::size_t>(it - runs.prefix.begin());
    if (q > D - 1) q = D - 1;
    if (q > 1 && std::abs(static_cast<double>(runs.prefix[q - 1]) - target) <= std::abs(static_cast<double>(runs.prefix[q]) - target))
      --q;
    if (boundaries.empty() || boundaries.back() < q) boundaries.push_back(q);
  }
  return codes_from_boundaries(runs, boundaries);
}

}  // namespace mdscan
