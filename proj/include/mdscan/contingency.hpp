#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdscan/combinatorics.hpp"
#include "mdscan/dataset.hpp"

namespace mdscan {

// Dense counts over (Y, v1, ..., vk). Axis 0 is the response and varies
// fastest: index = y + C_Y * (c1 + C_1 * (c2 + ...)).
struct ContingencyTable {
  std::vector<std::uint32_t> counts;
  std::vector<unsigned> shape;  // [C_Y, C_v1, ..., C_vk]
  Tuple tuple;
  std::size_t n_objects = 0;

  std::size_t rank() const { return shape.size(); }
  std::size_t size() const { return counts.size(); }
  std::size_t stride(std::size_t axis) const;
  std::size_t index(std::span<const unsigned> coordinates) const;
  std::uint32_t at(std::span<const unsigned> coordinates) const { return counts[index(coordinates)]; }

  // Sums out one axis; the result keeps the remaining axes in order.
  ContingencyTable marginalize(std::size_t axis) const;
};

ContingencyTable make_table(std::vector<unsigned> shape, std::vector<std::uint32_t> counts);

// Single pass over the objects of `matrix`.
ContingencyTable build_contingency(const DiscreteMatrix& matrix, std::span<const unsigned> tuple);

}  // namespace mdscan
