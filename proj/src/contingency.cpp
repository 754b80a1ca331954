#include "mdscan/contingency.hpp"

#include <functional>
#include <numeric>

#include "mdscan/error.hpp"

namespace mdscan {

std::size_t ContingencyTable::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = 0; a < axis; ++a) s *= shape[a];
  return s;
}

std::size_t ContingencyTable::index(std::span<const unsigned> coordinates) const {
  if (coordinates.size() != shape.size()) fail(ErrorCode::InvalidArgument, "coordinate rank mismatch");
  std::size_t idx = 0;
  for (std::size_t a = shape.size(); a-- > 0;) {
    if (coordinates[a] >= shape[a]) fail(ErrorCode::InvalidArgument, "coordinate out of range");
    idx = idx * shape[a] + coordinates[a];
  }
  return idx;
}

ContingencyTable ContingencyTable::marginalize(std::size_t axis) const {
  if (axis >= shape.size()) fail(ErrorCode::InvalidArgument, "axis out of range");
  ContingencyTable out;
  out.n_objects = n_objects;
  out.shape = shape;
  out.shape.erase(out.shape.begin() + static_cast<std::ptrdiff_t>(axis));
  if (axis > 0) {
    out.tuple = tuple;
    out.tuple.erase(out.tuple.begin() + static_cast<std::ptrdiff_t>(axis - 1));
  } else {
    out.tuple = tuple;
  }
  const std::size_t inner = stride(axis);
  const std::size_t width = shape[axis];
  out.counts.assign(counts.size() / width, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t low = i % inner;
    const std::size_t high = i / (inner * width);
    out.counts[low + high * inner] += counts[i];
  }
  return out;
}

ContingencyTable make_table(std::vector<unsigned> shape, std::vector<std::uint32_t> counts) {
  const std::size_t cells = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  if (shape.empty() || cells != counts.size()) fail(ErrorCode::InvalidArgument, "table shape does not match counts");
  ContingencyTable t;
  t.shape = std::move(shape);
  t.counts = std::move(counts);
  t.n_objects = std::accumulate(t.counts.begin(), t.counts.end(), std::size_t{0});
  t.tuple.resize(t.shape.size() - 1);
  std::iota(t.tuple.begin(), t.tuple.end(), 0u);
  return t;
}

ContingencyTable build_contingency(const DiscreteMatrix& matrix, std::span<const unsigned> tuple) {
  ContingencyTable t;
  t.n_objects = matrix.n_objects;
  t.tuple.assign(tuple.begin(), tuple.end());
  t.shape.push_back(matrix.response_cardinality);
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= matrix.n_variables()) fail(ErrorCode::InvalidArgument, "tuple index out of range");
    if (i > 0 && tuple[i] <= tuple[i - 1]) fail(ErrorCode::InvalidArgument, "tuple must be strictly increasing");
    t.shape.push_back(matrix.cardinalities[tuple[i]]);
  }
  std::size_t cells = 1;
  for (unsigned s : t.shape) cells *= s;
  t.counts.assign(cells, 0);

  std::vector<std::size_t> strides(t.shape.size());
  strides[0] = 1;
  for (std::size_t a = 1; a < t.shape.size(); ++a) strides[a] = strides[a - 1] * t.shape[a - 1];

  std::vector<const std::uint8_t*> columns;
  for (unsigned v : tuple) columns.push_back(matrix.codes[v].data());
  const std::uint8_t* y = matrix.response_codes.data();
  for (std::size_t o = 0; o < matrix.n_objects; ++o) {
    std::size_t idx = y[o];
    for (std::size_t i = 0; i < columns.size(); ++i) idx += strides[i + 1] * columns[i][o];
    ++t.counts[idx];
  }
  return t;
}

}  // namespace mdscan
