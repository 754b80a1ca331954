#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdscan/dataset.hpp"
#include "mdscan/report.hpp"
#include "mdscan/scan.hpp"

namespace mdscan {

struct RunConfig {
  unsigned k = 1;
  unsigned bins = 3;
  unsigned response_bins = 0;
  unsigned n_shifts = 0;
  double shift_magnitude = 0.25;
  Method method = Method::Fdr;
  double alpha = 0.1;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  unsigned contrast_copies = 0;
  ScanMode mode = ScanMode::Auto;
  ProgressCallback progress;
  std::uint64_t progress_stride = 0;
};

void validate(const RunConfig& config);

struct RunOutcome {
  SelectionReport report;
  int exit_code = 0;  // 0 ok, 2 when the gamma fit was refused
};

// ingest -> discretize (every shift) -> scan_k per shift -> merge ->
// calibrate -> Holm/BH -> report.
RunOutcome run(const RawDataset& raw, const RunConfig& config);

// Appends `copies` permuted duplicates of randomly chosen descriptors named
// "__contrast_<i>".
RawDataset with_contrast_variables(const RawDataset& raw, unsigned copies, std::uint64_t seed);

}  // namespace mdscan
