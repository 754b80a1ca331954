#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mdscan/combinatorics.hpp"
#include "mdscan/dataset.hpp"

namespace mdscan {

enum class ScanMode {
  Auto,              // EqualCardinality when every descriptor has the same C, else Mixed
  EqualCardinality,  // track the maximum CMI, convert to a p-value once per variable
  Mixed,             // chi-squared p-value per (tuple, member), track the minimum
};

enum class ScanKernel { Auto, Bitset, Counting };

// Per-variable extreme statistics over every tuple that contains it.
struct VariableScore {
  unsigned variable = 0;
  double max_cmi = -1.0;  // nats; -1 until a tuple has been seen
  Tuple best_tuple;
  std::uint64_t best_df = 0;
  // ln of the minimum chi-squared p-value. In equal-cardinality mode it is the
  // p-value of max_cmi at best_df.
  double log_min_p = 0.0;
  Tuple min_p_tuple;
  std::uint64_t min_p_df = 0;
  std::uint64_t n_tests = 0;

  double min_chi2_p() const;
};

using ProgressCallback = std::function<void(std::uint64_t done, std::uint64_t total)>;

struct ScanOptions {
  unsigned k = 1;
  ScanMode mode = ScanMode::Auto;
  unsigned workers = 1;  // 0 = hardware concurrency
  ScanKernel kernel = ScanKernel::Auto;
  ProgressCallback progress;
  std::uint64_t progress_stride = 0;  // 0 disables progress reports
};

struct ScanResult {
  ScanMode mode = ScanMode::EqualCardinality;  // resolved, never Auto
  unsigned k = 0;
  std::size_t n_objects = 0;
  std::vector<VariableScore> scores;
};

ScanMode resolve_mode(const DiscreteMatrix& matrix, ScanMode requested);

ScanResult scan_k(const DiscreteMatrix& matrix, const ScanOptions& options);

// Scans only tuples with lexicographic rank in [begin, end). Partial results
// combine with merge_scores; finalize_scores then derives p-values.
ScanResult scan_range(const DiscreteMatrix& matrix, const ScanOptions& options, std::uint64_t begin,
                      std::uint64_t end);

// Elementwise extreme over lists covering the same variables: larger max_cmi,
// smaller log_min_p, ties to the lexicographically smaller tuple, then to the
// earlier list. n_tests are summed.
ScanResult merge_scores(std::span<const ScanResult> lists);

// Equal-cardinality mode: sets log_min_p from max_cmi at best_df.
void finalize_scores(ScanResult& result);

}  // namespace mdscan
