#include "mdscan/scan.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <thread>

#include "mdscan/distributions.hpp"
#include "mdscan/error.hpp"
#include "mdscan/information.hpp"

namespace mdscan {
namespace {

constexpr std::size_t kMaxTableCells = std::size_t{1} << 24;
constexpr std::size_t kMaxBitsetPrefixCells = 4096;

using Word = std::uint64_t;

bool tuple_less(const Tuple& a, const Tuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Running per-variable extremes for one worker.
class Accumulator {
 public:
  Accumulator(std::size_t n_variables, ScanMode mode) : mode_(mode), scores_(n_variables) {
    for (std::size_t v = 0; v < n_variables; ++v) scores_[v].variable = static_cast<unsigned>(v);
  }

  void record(unsigned v, const Tuple& tuple, double cmi, double g, std::uint64_t df) {
    VariableScore& s = scores_[v];
    ++s.n_tests;
    if (cmi > s.max_cmi) {
      s.max_cmi = cmi;
      s.best_tuple = tuple;
      s.best_df = df;
    }
    if (mode_ == ScanMode::Mixed) {
      const double log_p = chi2_log_survival(g, df);
      if (s.min_p_tuple.empty() || log_p < s.log_min_p) {
        s.log_min_p = log_p;
        s.min_p_tuple = tuple;
        s.min_p_df = df;
      }
    }
  }

  std::vector<VariableScore>& scores() { return scores_; }

 private:
  ScanMode mode_;
  std::vector<VariableScore> scores_;
};

void merge_into(VariableScore& into, const VariableScore& other) {
  into.n_tests += other.n_tests;
  if (other.max_cmi > into.max_cmi ||
      (other.max_cmi == into.max_cmi && !other.best_tuple.empty() && tuple_less(other.best_tuple, into.best_tuple))) {
    into.max_cmi = other.max_cmi;
    into.best_tuple = other.best_tuple;
    into.best_df = other.best_df;
  }
  if (other.min_p_tuple.empty()) return;
  if (into.min_p_tuple.empty() || other.log_min_p < into.log_min_p ||
      (other.log_min_p == into.log_min_p && tuple_less(other.min_p_tuple, into.min_p_tuple))) {
    into.log_min_p = other.log_min_p;
    into.min_p_tuple = other.min_p_tuple;
    into.min_p_df = other.min_p_df;
  }
}

// Builds the contingency table of each tuple in lexicographic order,
// rebuilding only the prefix levels whose variable changed.
class CountingKernel {
 public:
  CountingKernel(const DiscreteMatrix& m, unsigned k) : m_(m), k_(k), prefix_(k > 1 ? k - 1 : 0), cached_(k, ~0u) {
    for (auto& p : prefix_) p.resize(m.n_objects);
  }

  void fill(const Tuple& t, std::vector<std::uint32_t>& counts, std::size_t cells) {
    const std::size_t n = m_.n_objects;
    std::size_t stride = m_.response_cardinality;
    bool dirty = false;
    for (unsigned l = 0; l + 1 < k_; ++l) {
      if (dirty || cached_[l] != t[l]) {
        dirty = true;
        cached_[l] = t[l];
        const std::uint8_t* codes = m_.codes[t[l]].data();
        std::uint32_t* out = prefix_[l].data();
        const auto s = static_cast<std::uint32_t>(stride);
        if (l == 0) {
          const std::uint8_t* y = m_.response_codes.data();
          for (std::size_t o = 0; o < n; ++o) out[o] = y[o] + s * codes[o];
        } else {
          const std::uint32_t* in = prefix_[l - 1].data();
          for (std::size_t o = 0; o < n; ++o) out[o] = in[o] + s * codes[o];
        }
      }
      stride *= m_.cardinalities[t[l]];
    }
    const std::uint8_t* last = m_.codes[t[k_ - 1]].data();
    const auto s = static_cast<std::uint32_t>(stride);
    // Four interleaved histograms hide store-to-load latency on hot cells.
    lanes_.assign(4 * cells, 0);
    std::uint32_t* h0 = lanes_.data();
    std::uint32_t* h1 = h0 + cells;
    std::uint32_t* h2 = h1 + cells;
    std::uint32_t* h3 = h2 + cells;
    std::size_t o = 0;
    if (k_ == 1) {
      const std::uint8_t* y = m_.response_codes.data();
      for (; o + 4 <= n; o += 4) {
        ++h0[y[o] + s * last[o]];
        ++h1[y[o + 1] + s * last[o + 1]];
        ++h2[y[o + 2] + s * last[o + 2]];
        ++h3[y[o + 3] + s * last[o + 3]];
      }
      for (; o < n; ++o) ++h0[y[o] + s * last[o]];
    } else {
      const std::uint32_t* p = prefix_[k_ - 2].data();
      for (; o + 4 <= n; o += 4) {
        ++h0[p[o] + s * last[o]];
        ++h1[p[o + 1] + s * last[o + 1]];
        ++h2[p[o + 2] + s * last[o + 2]];
        ++h3[p[o + 3] + s * last[o + 3]];
      }
      for (; o < n; ++o) ++h0[p[o] + s * last[o]];
    }
    counts.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) counts[c] = h0[c] + h1[c] + h2[c] + h3[c];
  }

 private:
  const DiscreteMatrix& m_;
  unsigned k_;
  std::vector<std::vector<std::uint32_t>> prefix_;
  std::vector<unsigned> cached_;
  std::vector<std::uint32_t> lanes_;
};

// One bit per object and category. The table of a tuple comes from
// popcounts of ANDed category bitsets; prefix levels hold the bitsets of
// every category combination of the leading members.
class BitsetKernel {
 public:
  BitsetKernel(const DiscreteMatrix& m, unsigned k)
      : m_(m), k_(k), words_((m.n_objects + 63) / 64), cy_(m.response_cardinality), cached_(k, ~0u) {
    offsets_.resize(m.n_variables());
    std::size_t total = 0;
    for (std::size_t v = 0; v < m.n_variables(); ++v) {
      offsets_[v] = total;
      total += m.cardinalities[v] * words_;
    }
    bits_.assign(total, 0);
    for (std::size_t v = 0; v < m.n_variables(); ++v) {
      Word* base = bits_.data() + offsets_[v];
      const std::uint8_t* codes = m.codes[v].data();
      for (std::size_t o = 0; o < m.n_objects; ++o) base[codes[o] * words_ + o / 64] |= Word{1} << (o % 64);
    }
    response_.assign(cy_ * words_, 0);
    for (std::size_t o = 0; o < m.n_objects; ++o)
      response_[m.response_codes[o] * words_ + o / 64] |= Word{1} << (o % 64);
    all_.assign(words_, ~Word{0});
    if (m.n_objects % 64) all_.back() = (Word{1} << (m.n_objects % 64)) - 1;
    levels_.resize(k > 1 ? k - 1 : 0);
    level_cells_.resize(levels_.size());
  }

  // Bitset cost per tuple relative to a counting pass; used by Auto.
  static bool preferred(const DiscreteMatrix& m, unsigned k) {
    std::vector<unsigned> c = m.cardinalities;
    std::sort(c.rbegin(), c.rend());
    double prefix = 1.0;
    for (unsigned i = 0; i + 1 < k; ++i) prefix *= c[i];
    if (prefix > kMaxBitsetPrefixCells) return false;
    const double last = k >= 1 ? std::max(1u, c[k - 1] - 1) : 1;
    const double words = static_cast<double>((m.n_objects + 63) / 64);
    const double bitset_cost = prefix * last * m.response_cardinality * words;
    const double counting_cost = 1.5 * static_cast<double>(m.n_objects);
    return bitset_cost < counting_cost;
  }

  void fill(const Tuple& t, std::vector<std::uint32_t>& counts, std::size_t cells) {
    bool dirty = false;
    for (unsigned l = 0; l + 1 < k_; ++l) {
      if (dirty || cached_[l] != t[l]) {
        dirty = true;
        cached_[l] = t[l];
        build_level(l, t[l]);
      }
    }
    if (dirty || !summary_ready_) build_summary();

    const unsigned last_v = t[k_ - 1];
    const unsigned cl = m_.cardinalities[last_v];
    const Word* last = bits_.data() + offsets_[last_v];
    const std::size_t cells_prefix = prefix_cells();
    counts.assign(cells, 0);
    const std::size_t partial_y = cy_ - 1;
    const std::size_t per_cell = cy_;  // total + (cy - 1) masked
    acc_.resize((cl - 1) * per_cell);

    for (std::size_t s = 0; s < cells_prefix; ++s) {
      const std::uint32_t n_s = totals_[s * per_cell];
      if (n_s == 0) continue;
      const Word* ps = prefix_bits(s);
      const Word* py = masked_.data() + s * partial_y * words_;
      std::fill(acc_.begin(), acc_.end(), 0);
      for (unsigned c = 0; c + 1 < cl; ++c) {
        const Word* lc = last + c * words_;
        std::uint32_t* a = acc_.data() + c * per_cell;
        std::uint64_t tot = 0;
        for (std::size_t w = 0; w < words_; ++w) tot += std::popcount(ps[w] & lc[w]);
        a[0] = static_cast<std::uint32_t>(tot);
        for (std::size_t y = 0; y < partial_y; ++y) {
          const Word* pyy = py + y * words_;
          std::uint64_t cnt = 0;
          for (std::size_t w = 0; w < words_; ++w) cnt += std::popcount(pyy[w] & lc[w]);
          a[1 + y] = static_cast<std::uint32_t>(cnt);
        }
      }
      // Scatter into [y + cy * (s + P * c)], deriving the last category of
      // the last member and the last response class by subtraction.
      for (unsigned c = 0; c < cl; ++c) {
        std::uint32_t* dst = counts.data() + cy_ * (s + cells_prefix * c);
        std::uint32_t tot;
        if (c + 1 < cl) {
          const std::uint32_t* a = acc_.data() + c * per_cell;
          tot = a[0];
          for (std::size_t y = 0; y < partial_y; ++y) dst[y] = a[1 + y];
        } else {
          tot = n_s;
          for (std::size_t y = 0; y < partial_y; ++y) {
            std::uint32_t rest = totals_[s * per_cell + 1 + y];
            for (unsigned c2 = 0; c2 + 1 < cl; ++c2) rest -= acc_[c2 * per_cell + 1 + y];
            dst[y] = rest;
          }
          for (unsigned c2 = 0; c2 + 1 < cl; ++c2) tot -= acc_[c2 * per_cell];
        }
        std::uint32_t rest = tot;
        for (std::size_t y = 0; y < partial_y; ++y) rest -= dst[y];
        dst[partial_y] = rest;
      }
    }
  }

 private:
  std::size_t prefix_cells() const { return k_ > 1 ? level_cells_[k_ - 2] : 1; }

  const Word* prefix_bits(std::size_t s) const {
    return k_ > 1 ? levels_[k_ - 2].data() + s * words_ : all_.data();
  }

  void build_level(unsigned l, unsigned v) {
    const unsigned cv = m_.cardinalities[v];
    const Word* vb = bits_.data() + offsets_[v];
    if (l == 0) {
      level_cells_[0] = cv;
      levels_[0].assign(vb, vb + cv * words_);
    } else {
      const std::size_t prev = level_cells_[l - 1];
      level_cells_[l] = prev * cv;
      levels_[l].resize(level_cells_[l] * words_);
      for (unsigned c = 0; c < cv; ++c)
        for (std::size_t s = 0; s < prev; ++s) {
          const Word* a = levels_[l - 1].data() + s * words_;
          const Word* b = vb + c * words_;
          Word* out = levels_[l].data() + (s + prev * c) * words_;
          for (std::size_t w = 0; w < words_; ++w) out[w] = a[w] & b[w];
        }
    }
    summary_ready_ = false;
  }

  // Response-masked copies of the deepest prefix level plus their popcounts.
  void build_summary() {
    const std::size_t cells_prefix = prefix_cells();
    const std::size_t partial_y = cy_ - 1;
    masked_.resize(cells_prefix * partial_y * words_);
    totals_.assign(cells_prefix * cy_, 0);
    for (std::size_t s = 0; s < cells_prefix; ++s) {
      const Word* ps = prefix_bits(s);
      std::uint64_t tot = 0;
      for (std::size_t w = 0; w < words_; ++w) tot += std::popcount(ps[w]);
      totals_[s * cy_] = static_cast<std::uint32_t>(tot);
      for (std::size_t y = 0; y < partial_y; ++y) {
        const Word* ry = response_.data() + y * words_;
        Word* out = masked_.data() + (s * partial_y + y) * words_;
        std::uint64_t cnt = 0;
        for (std::size_t w = 0; w < words_; ++w) {
          out[w] = ps[w] & ry[w];
          cnt += std::popcount(out[w]);
        }
        totals_[s * cy_ + 1 + y] = static_cast<std::uint32_t>(cnt);
      }
    }
    summary_ready_ = true;
  }

  const DiscreteMatrix& m_;
  unsigned k_;
  std::size_t words_;
  std::size_t cy_;
  std::vector<std::size_t> offsets_;
  std::vector<Word> bits_;
  std::vector<Word> response_;
  std::vector<Word> all_;
  std::vector<std::vector<Word>> levels_;
  std::vector<std::size_t> level_cells_;
  std::vector<unsigned> cached_;
  std::vector<Word> masked_;
  std::vector<std::uint32_t> totals_;
  std::vector<std::uint32_t> acc_;
  bool summary_ready_ = false;
};

void check_scan(const DiscreteMatrix& m, unsigned k) {
  if (m.n_variables() == 0) fail(ErrorCode::InvalidArgument, "no variables to scan");
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  if (k > m.n_variables())
    fail(ErrorCode::InvalidArgument,
         "k=" + std::to_string(k) + " exceeds the variable count " + std::to_string(m.n_variables()));
  if (m.response_codes.size() != m.n_objects) fail(ErrorCode::Data, "response length mismatch");
  for (std::size_t v = 0; v < m.n_variables(); ++v)
    if (m.codes[v].size() != m.n_objects) fail(ErrorCode::Data, "column length mismatch in discrete matrix");
  std::vector<unsigned> c = m.cardinalities;
  std::sort(c.rbegin(), c.rend());
  double cells = m.response_cardinality;
  for (unsigned i = 0; i < k; ++i) cells *= c[i];
  if (cells > static_cast<double>(kMaxTableCells))
    fail(ErrorCode::InvalidArgument, "contingency tables for k=" + std::to_string(k) + " exceed 2^24 cells");
}

template <typename Kernel>
void scan_chunk(const DiscreteMatrix& m, unsigned k, Kernel& kernel, TableEvaluator& evaluator, std::uint64_t begin,
                std::uint64_t end, Accumulator& acc) {
  const auto n = static_cast<unsigned>(m.n_variables());
  Tuple t = unrank_combination(begin, n, k);
  std::vector<std::uint32_t> counts;
  std::vector<unsigned> shape(k + 1);
  std::vector<double> g(k);
  const double two_n = 2.0 * static_cast<double>(m.n_objects);
  shape[0] = m.response_cardinality;
  for (std::uint64_t r = begin; r < end; ++r) {
    std::size_t cells = shape[0];
    for (unsigned i = 0; i < k; ++i) {
      shape[i + 1] = m.cardinalities[t[i]];
      cells *= shape[i + 1];
    }
    kernel.fill(t, counts, cells);
    evaluator.g_statistics(counts, shape, g);
    for (unsigned i = 0; i < k; ++i) {
      const double g_clamped = std::max(0.0, g[i]);
      acc.record(t[i], t, g_clamped / two_n, g_clamped, degrees_of_freedom(shape, i));
    }
    next_combination(t, n);
  }
}

ScanKernel resolve_kernel(const DiscreteMatrix& m, const ScanOptions& options) {
  if (options.kernel != ScanKernel::Auto) return options.kernel;
  return BitsetKernel::preferred(m, options.k) ? ScanKernel::Bitset : ScanKernel::Counting;
}

}  // namespace

double VariableScore::min_chi2_p() const { return std::exp(log_min_p); }

ScanMode resolve_mode(const DiscreteMatrix& matrix, ScanMode requested) {
  if (requested == ScanMode::Auto) return matrix.equal_cardinality() ? ScanMode::EqualCardinality : ScanMode::Mixed;
  if (requested == ScanMode::EqualCardinality && !matrix.equal_cardinality())
    fail(ErrorCode::InvalidArgument, "equal-cardinality mode requested but descriptor cardinalities differ");
  return requested;
}

ScanResult scan_range(const DiscreteMatrix& matrix, const ScanOptions& options, std::uint64_t begin,
                      std::uint64_t end) {
  check_scan(matrix, options.k);
  const auto n = static_cast<unsigned>(matrix.n_variables());
  const std::uint64_t total = binomial(n, options.k);
  if (begin > end || end > total) fail(ErrorCode::InvalidArgument, "tuple rank range out of bounds");

  ScanResult result;
  result.mode = resolve_mode(matrix, options.mode);
  result.k = options.k;
  result.n_objects = matrix.n_objects;

  unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
  const std::uint64_t span = end - begin;
  if (span < 2 * static_cast<std::uint64_t>(workers)) workers = 1;
  const ScanKernel kernel_kind = resolve_kernel(matrix, options);

  // Chunks are claimed dynamically; the merge is order-independent, so the
  // result does not depend on which worker scanned which chunk.
  auto chunks = split_ranges(span, std::max<std::uint64_t>(1, std::min<std::uint64_t>(span, workers * 16ull)));
  for (auto& c : chunks) {
    c.first += begin;
    c.second += begin;
  }
  std::atomic<std::size_t> next_chunk{0};
  std::atomic<std::uint64_t> done{0};
  std::mutex progress_mutex;
  std::uint64_t reported = 0;

  std::vector<Accumulator> partials;
  partials.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) partials.emplace_back(matrix.n_variables(), result.mode);
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](unsigned w) {
    try {
      TableEvaluator evaluator(matrix.n_objects);
      auto drive = [&](auto& kernel) {
        for (std::size_t c = next_chunk++; c < chunks.size(); c = next_chunk++) {
          scan_chunk(matrix, options.k, kernel, evaluator, chunks[c].first, chunks[c].second, partials[w]);
          const std::uint64_t now = done += chunks[c].second - chunks[c].first;
          if (options.progress && options.progress_stride > 0) {
            std::lock_guard lock(progress_mutex);
            if (now / options.progress_stride > reported / options.progress_stride || now == span) {
              reported = now;
              options.progress(now, span);
            }
          }
        }
      };
      if (kernel_kind == ScanKernel::Bitset) {
        BitsetKernel kernel(matrix, options.k);
        drive(kernel);
      } else {
        CountingKernel kernel(matrix, options.k);
        drive(kernel);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next_chunk = chunks.size();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  result.scores = std::move(partials[0].scores());
  for (unsigned w = 1; w < workers; ++w)
    for (std::size_t v = 0; v < result.scores.size(); ++v) merge_into(result.scores[v], partials[w].scores()[v]);
  return result;
}

void finalize_scores(ScanResult& result) {
  if (result.mode != ScanMode::EqualCardinality) return;
  for (auto& s : result.scores) {
    if (s.best_tuple.empty()) continue;
    s.log_min_p = chi2_log_survival(2.0 * static_cast<double>(result.n_objects) * s.max_cmi, s.best_df);
    s.min_p_tuple = s.best_tuple;
    s.min_p_df = s.best_df;
  }
}

ScanResult scan_k(const DiscreteMatrix& matrix, const ScanOptions& options) {
  check_scan(matrix, options.k);
  ScanResult r = scan_range(matrix, options, 0, binomial(static_cast<unsigned>(matrix.n_variables()), options.k));
  finalize_scores(r);
  return r;
}

ScanResult merge_scores(std::span<const ScanResult> lists) {
  if (lists.empty()) fail(ErrorCode::InvalidArgument, "nothing to merge");
  // In equal-cardinality mode every test of a list shares one df; a
  // variable absent from a partial range reports df 0 and is skipped.
  auto list_df = [](const ScanResult& r) -> std::uint64_t {
    for (const auto& s : r.scores)
      if (s.best_df != 0) return s.best_df;
    return 0;
  };
  ScanResult out = lists[0];
  bool equal = out.mode == ScanMode::EqualCardinality;
  std::uint64_t df0 = list_df(out);
  for (std::size_t i = 1; i < lists.size(); ++i) {
    const ScanResult& other = lists[i];
    if (other.scores.size() != out.scores.size() || other.k != out.k || other.n_objects != out.n_objects)
      fail(ErrorCode::InvalidArgument, "score lists cover different variables");
    for (std::size_t v = 0; v < out.scores.size(); ++v) {
      if (other.scores[v].variable != out.scores[v].variable)
        fail(ErrorCode::InvalidArgument, "score lists cover different variables");
      merge_into(out.scores[v], other.scores[v]);
    }
    const std::uint64_t df = list_df(other);
    if (df0 == 0) df0 = df;
    equal = equal && other.mode == ScanMode::EqualCardinality && (df == 0 || df == df0);
  }
  out.mode = equal ? ScanMode::EqualCardinality : ScanMode::Mixed;
  return out;
}

}  // namespace mdscan
