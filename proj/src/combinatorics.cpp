#include "mdscan/combinatorics.hpp"

#include <limits>
#include <string>

#include "mdscan/error.hpp"

namespace mdscan {

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (unsigned i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays exact because result is C(n-k+i-1, i-1).
    const std::uint64_t factor = n - k + i;
    const std::uint64_t g = result / i;
    const std::uint64_t r = result % i;
    if (g > std::numeric_limits<std::uint64_t>::max() / factor)
      fail(ErrorCode::InvalidArgument, "binomial coefficient overflows 64 bits");
    result = g * factor + (r * factor) / i;
  }
  return result;
}

std::uint64_t rank_combination(std::span<const unsigned> tuple, unsigned n) {
  const auto k = static_cast<unsigned>(tuple.size());
  std::uint64_t rank = 0;
  unsigned next = 0;
  for (unsigned i = 0; i < k; ++i) {
    if (tuple[i] >= n || tuple[i] < next) fail(ErrorCode::InvalidArgument, "tuple is not strictly increasing in [0, n)");
    for (unsigned v = next; v < tuple[i]; ++v) rank += binomial(n - 1 - v, k - 1 - i);
    next = tuple[i] + 1;
  }
  return rank;
}

Tuple unrank_combination(std::uint64_t rank, unsigned n, unsigned k) {
  if (k == 0 || k > n) fail(ErrorCode::InvalidArgument, "tuple size must be in [1, n]");
  const std::uint64_t total = binomial(n, k);
  if (rank >= total)
    fail(ErrorCode::InvalidArgument, "tuple rank " + std::to_string(rank) + " out of range [0, " + std::to_string(total) + ")");
  Tuple tuple(k);
  unsigned v = 0;
  for (unsigned i = 0; i < k; ++i) {
    for (;; ++v) {
      const std::uint64_t block = binomial(n - 1 - v, k - 1 - i);
      if (rank < block) break;
      rank -= block;
    }
    tuple[i] = v++;
  }
  return tuple;
}

bool next_combination(std::span<unsigned> tuple, unsigned n) {
  const std::size_t k = tuple.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (tuple[i] < n - k + i) {
      ++tuple[i];
      for (std::size_t j = i + 1; j < k; ++j) tuple[j] = tuple[j - 1] + 1;
      return true;
    }
  }
  return false;
}

TupleRange::TupleRange(unsigned n, unsigned k, std::uint64_t begin, std::uint64_t end)
    : n_(n), k_(k), begin_(begin), end_(end) {
  if (k == 0 || k > n) fail(ErrorCode::InvalidArgument, "tuple size k=" + std::to_string(k) + " exceeds variable count " + std::to_string(n));
  if (begin > end || end > binomial(n, k)) fail(ErrorCode::InvalidArgument, "tuple rank range out of bounds");
}

TupleRange::TupleRange(unsigned n, unsigned k)
    : TupleRange(n, k, 0, (k == 0 || k > n) ? 0 : binomial(n, k)) {}

std::vector<Tuple> enumerate_tuples(unsigned n, unsigned k) {
  TupleRange range(n, k);
  std::vector<Tuple> out;
  out.reserve(range.size());
  range.for_each([&](const Tuple& t) { out.push_back(t); });
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> split_ranges(std::uint64_t total, std::uint64_t parts) {
  if (parts == 0) parts = 1;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  const std::uint64_t base = total / parts;
  const std::uint64_t extra = total % parts;
  std::uint64_t at = 0;
  for (std::uint64_t p = 0; p < parts; ++p) {
    const std::uint64_t len = base + (p < extra ? 1 : 0);
    if (len == 0) continue;
    out.emplace_back(at, at + len);
    at += len;
  }
  return out;
}

}  // namespace mdscan
