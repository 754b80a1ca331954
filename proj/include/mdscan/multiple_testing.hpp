#pragma once

#include <span>
#include <vector>

namespace mdscan {

struct Selection {
  std::vector<bool> relevant;
  std::vector<double> adjusted;
};

// Step-down Bonferroni-Holm; rejections are inclusive (p <= threshold).
Selection holm_select(std::span<const double> p, double alpha);

// Step-up Benjamini-Hochberg; rejections are inclusive.
Selection bh_select(std::span<const double> p, double alpha);

}  // namespace mdscan
