#include "mdscan/information.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdscan/error.hpp"

namespace mdscan {
namespace {

// out[low + high * inner] = sum over w of in[low + inner * (w + width * high)]
void marginalize_axis(std::span<const std::uint32_t> in, std::size_t inner, std::size_t width,
                      std::vector<std::uint32_t>& out) {
  const std::size_t outer = in.size() / (inner * width);
  out.assign(inner * outer, 0);
  for (std::size_t high = 0; high < outer; ++high) {
    std::uint32_t* dst = out.data() + high * inner;
    const std::uint32_t* src = in.data() + high * inner * width;
    for (std::size_t w = 0; w < width; ++w, src += inner)
      for (std::size_t low = 0; low < inner; ++low) dst[low] += src[low];
  }
}

constexpr std::size_t kMaxNLogNTable = std::size_t{1} << 22;

}  // namespace

double entropy(std::span<const std::uint32_t> counts, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "entropy of an empty sample");
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total != n) fail(ErrorCode::InvalidArgument, "counts do not sum to N");
  const double inv = 1.0 / static_cast<double>(n);
  double h = 0.0;
  for (std::uint32_t c : counts) {
    if (c == 0) continue;
    const double p = c * inv;
    h -= p * std::log(p);
  }
  return h;
}

std::uint64_t degrees_of_freedom(std::span<const unsigned> shape, std::size_t member) {
  if (member + 1 >= shape.size()) fail(ErrorCode::InvalidArgument, "member index out of range");
  std::uint64_t df = static_cast<std::uint64_t>(shape[0] - 1) * (shape[member + 1] - 1);
  for (std::size_t a = 1; a < shape.size(); ++a)
    if (a != member + 1) df *= shape[a];
  return df;
}

TableEvaluator::TableEvaluator(std::size_t n_objects) : n_(n_objects) {
  table_.resize(std::min(n_objects, kMaxNLogNTable - 1) + 1);
  for (std::size_t c = 1; c < table_.size(); ++c) table_[c] = static_cast<double>(c) * std::log(static_cast<double>(c));
}

double TableEvaluator::slow_nlogn(std::uint32_t c) {
  return c == 0 ? 0.0 : static_cast<double>(c) * std::log(static_cast<double>(c));
}

double TableEvaluator::sum_nlogn(std::span<const std::uint32_t> counts) const {
  double s = 0.0;
  for (std::uint32_t c : counts) s += nlogn(c);
  return s;
}

void TableEvaluator::g_statistics(std::span<const std::uint32_t> counts, std::span<const unsigned> shape,
                                  std::span<double> g) {
  const std::size_t members = shape.size() - 1;
  const std::size_t cy = shape[0];
  // N I(Y;X|S) = T(Y,X,S) - T(X,S) - T(Y,S) + T(S), T = sum n ln n.
  const double t_full = sum_nlogn(counts);
  marginalize_axis(counts, 1, cy, no_y_);
  const double t_no_y = sum_nlogn(no_y_);
  std::size_t inner_full = cy;  // stride of member axis in the full table
  std::size_t inner_no_y = 1;   // stride of member axis in the Y-marginal
  for (std::size_t m = 0; m < members; ++m) {
    const std::size_t width = shape[m + 1];
    marginalize_axis(counts, inner_full, width, no_x_);
    marginalize_axis(no_y_, inner_no_y, width, no_xy_);
    const double t_ys = sum_nlogn(no_x_);
    const double t_s = sum_nlogn(no_xy_);
    g[m] = 2.0 * ((t_full - t_no_y) - (t_ys - t_s));
    inner_full *= width;
    inner_no_y *= width;
  }
}

MemberStatistic conditional_mutual_information(const ContingencyTable& table, std::size_t member) {
  if (table.rank() < 2) fail(ErrorCode::InvalidArgument, "table has no tuple members");
  if (member + 1 >= table.rank()) fail(ErrorCode::InvalidArgument, "member index out of range");
  if (table.n_objects == 0) fail(ErrorCode::InvalidArgument, "empty table");
  TableEvaluator evaluator(table.n_objects);
  std::vector<double> g(table.rank() - 1);
  evaluator.g_statistics(table.counts, table.shape, g);
  MemberStatistic out;
  out.raw_cmi = g[member] / (2.0 * static_cast<double>(table.n_objects));
  out.cmi = std::max(0.0, out.raw_cmi);
  out.g_statistic = 2.0 * static_cast<double>(table.n_objects) * out.cmi;
  out.df = degrees_of_freedom(table.shape, member);
  return out;
}

TupleResult evaluate_tuple(const ContingencyTable& table) {
  if (table.rank() < 2) fail(ErrorCode::InvalidArgument, "table has no tuple members");
  TableEvaluator evaluator(table.n_objects);
  const std::size_t members = table.rank() - 1;
  std::vector<double> g(members);
  evaluator.g_statistics(table.counts, table.shape, g);
  TupleResult out;
  out.tuple = table.tuple;
  for (std::size_t m = 0; m < members; ++m) {
    out.cmi_per_member.push_back(std::max(0.0, g[m] / (2.0 * static_cast<double>(table.n_objects))));
    out.df_per_member.push_back(degrees_of_freedom(table.shape, m));
  }
  return out;
}

double interaction_information(const ContingencyTable& table) {
  if (table.rank() != 3) fail(ErrorCode::InvalidArgument, "interaction information needs a (Y, X1, X2) table");
  const std::size_t n = table.n_objects;
  const ContingencyTable y_x1 = table.marginalize(2);
  const ContingencyTable y_x2 = table.marginalize(1);
  const ContingencyTable x1_x2 = table.marginalize(0);
  const ContingencyTable y = y_x1.marginalize(1);
  const ContingencyTable x1 = y_x1.marginalize(0);
  const ContingencyTable x2 = y_x2.marginalize(0);
  return -entropy(table.counts, n) + entropy(y_x1.counts, n) + entropy(y_x2.counts, n) + entropy(x1_x2.counts, n) -
         entropy(y.counts, n) - entropy(x1.counts, n) - entropy(x2.counts, n);
}

}  // namespace mdscan
