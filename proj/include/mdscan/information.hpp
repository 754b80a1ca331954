#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdscan/contingency.hpp"

namespace mdscan {

// Plug-in entropy in nats with 0 log 0 = 0. `counts` must sum to n > 0.
double entropy(std::span<const std::uint32_t> counts, std::size_t n);

struct MemberStatistic {
  double cmi = 0.0;          // nats, clamped at 0
  double raw_cmi = 0.0;      // before clamping
  double g_statistic = 0.0;  // 2 N cmi
  std::uint64_t df = 0;
};

struct TupleResult {
  Tuple tuple;
  std::vector<double> cmi_per_member;
  std::vector<std::uint64_t> df_per_member;
};

// (C_Y - 1)(C_X - 1) prod C_S.
std::uint64_t degrees_of_freedom(std::span<const unsigned> shape, std::size_t member);

// I(Y; X | S) where X is the tuple member at `member` and S the remaining
// members. With a single member this is plain mutual information.
MemberStatistic conditional_mutual_information(const ContingencyTable& table, std::size_t member);

TupleResult evaluate_tuple(const ContingencyTable& table);

// -H(Y,X1,X2) + H(Y,X1) + H(Y,X2) + H(X1,X2) - H(Y) - H(X1) - H(X2).
// Diagnostic only; requires a two-member table.
double interaction_information(const ContingencyTable& table);

// Evaluates every member of a table from sums of n ln n over its marginals.
// Reuses scratch storage, so one instance per thread.
class TableEvaluator {
 public:
  explicit TableEvaluator(std::size_t n_objects);

  std::size_t n_objects() const { return n_; }

  // Fills g[m] = 2 N I(Y; X_m | rest) (unclamped) for every member.
  void g_statistics(std::span<const std::uint32_t> counts, std::span<const unsigned> shape,
                    std::span<double> g);

  double sum_nlogn(std::span<const std::uint32_t> counts) const;

 private:
  double nlogn(std::uint32_t c) const { return c < table_.size() ? table_[c] : slow_nlogn(c); }
  static double slow_nlogn(std::uint32_t c);

  std::size_t n_;
  std::vector<double> table_;
  std::vector<std::uint32_t> no_y_;
  std::vector<std::uint32_t> no_x_;
  std::vector<std::uint32_t> no_xy_;
};

}  // namespace mdscan
