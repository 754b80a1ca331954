#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mdscan {

using Tuple = std::vector<unsigned>;

// C(n, k); throws on 64-bit overflow.
std::uint64_t binomial(unsigned n, unsigned k);

// Lexicographic rank of a strictly increasing k-tuple drawn from [0, n).
std::uint64_t rank_combination(std::span<const unsigned> tuple, unsigned n);

// Inverse of rank_combination.
Tuple unrank_combination(std::uint64_t rank, unsigned n, unsigned k);

// Advances to the lexicographic successor; false when `tuple` was the last one.
bool next_combination(std::span<unsigned> tuple, unsigned n);

// Streams tuples with ranks in [begin, end) in lexicographic order.
class TupleRange {
 public:
  TupleRange(unsigned n, unsigned k, std::uint64_t begin, std::uint64_t end);
  TupleRange(unsigned n, unsigned k);

  std::uint64_t size() const { return end_ - begin_; }
  std::uint64_t begin_rank() const { return begin_; }
  std::uint64_t end_rank() const { return end_; }

  template <typename F>
  void for_each(F&& visit) const {
    if (begin_ == end_) return;
    Tuple t = unrank_combination(begin_, n_, k_);
    for (std::uint64_t r = begin_; r < end_; ++r) {
      visit(std::as_const(t));
      next_combination(t, n_);
    }
  }

 private:
  unsigned n_;
  unsigned k_;
  std::uint64_t begin_;
  std::uint64_t end_;
};

std::vector<Tuple> enumerate_tuples(unsigned n, unsigned k);

// Splits [0, total) into `parts` contiguous ranges of near-equal size.
std::vector<std::pair<std::uint64_t, std::uint64_t>> split_ranges(std::uint64_t total, std::uint64_t parts);

}  // namespace mdscan
