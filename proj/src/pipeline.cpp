#include "mdscan/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mdscan/error.hpp"
#include "mdscan/rng.hpp"

namespace mdscan {
namespace {

constexpr std::string_view kContrastPrefix = "__contrast_";
constexpr std::uint64_t kContrastStream = 0x434f4e5452415354ULL;

}  // namespace

void validate(const RunConfig& config) {
  if (config.k < 1) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  if (config.bins < 2 || config.bins > kMaxCategories) fail(ErrorCode::InvalidArgument, "bins must be in [2, 255]");
  if (config.response_bins == 1 || config.response_bins > kMaxCategories)
    fail(ErrorCode::InvalidArgument, "response bins must be 0 or in [2, 255]");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
  if (!(config.shift_magnitude >= 0.0 && config.shift_magnitude < 0.5))
    fail(ErrorCode::InvalidArgument, "shift magnitude must be in [0, 0.5)");
}

RawDataset with_contrast_variables(const RawDataset& raw, unsigned copies, std::uint64_t seed) {
  RawDataset out = raw;
  if (copies == 0) return out;
  if (raw.descriptors.empty()) fail(ErrorCode::InvalidArgument, "no descriptors to copy as contrasts");
  CounterRng pick(seed, kContrastStream);
  for (unsigned i = 0; i < copies; ++i) {
    const Column& source = raw.descriptors[pick.below(raw.descriptors.size())];
    Column c = source;
    c.name = std::string(kContrastPrefix) + std::to_string(i);
    std::vector<std::size_t> perm(raw.n_objects);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    CounterRng shuffle(seed, kContrastStream + 1, i);
    for (std::size_t j = perm.size(); j > 1; --j) std::swap(perm[j - 1], perm[shuffle.below(j)]);
    for (std::size_t r = 0; r < raw.n_objects; ++r) {
      if (c.kind == ColumnKind::Continuous)
        c.values[r] = source.values[perm[r]];
      else
        c.labels[r] = source.labels[perm[r]];
    }
    out.descriptors.push_back(std::move(c));
    if (!out.groups.empty()) out.groups.push_back("contrast");
  }
  return out;
}

RunOutcome run(const RawDataset& input, const RunConfig& config) {
  validate(config);
  validate(input);
  const RawDataset raw = with_contrast_variables(input, config.contrast_copies, config.seed);
  const std::size_t n_original = input.descriptors.size();

  DiscretizationSpec spec;
  spec.n_categories = config.bins;
  spec.n_shifts = config.n_shifts;
  spec.shift_magnitude = config.shift_magnitude;
  spec.seed = config.seed;
  spec.response_categories = config.response_bins;

  ScanOptions options;
  options.k = config.k;
  options.mode = config.mode;
  options.workers = config.workers;
  options.progress = config.progress;
  options.progress_stride = config.progress_stride;

  std::vector<ScanResult> per_shift;
  DiscreteMatrix first;
  for (unsigned s = 0; s <= config.n_shifts; ++s) {
    DiscreteMatrix matrix = discretize_dataset(raw, spec, s);
    if (s == 0) {
      first.names = matrix.names;
      first.source_columns = matrix.source_columns;
      first.warnings = matrix.warnings;
    } else if (matrix.source_columns != first.source_columns) {
      fail(ErrorCode::Internal, "shifted discretization changed the variable set");
    }
    per_shift.push_back(scan_k(matrix, options));
  }
  const ScanResult merged = merge_scores(per_shift);

  GammaFitConfig fit_config;
  fit_config.alpha = config.alpha;
  const CalibrationResult calibration = calibrate(merged, fit_config);

  ReportInputs inputs;
  inputs.scores = &merged;
  inputs.names = first.names;
  inputs.is_contrast.resize(first.names.size());
  for (std::size_t v = 0; v < first.names.size(); ++v) {
    const std::size_t source = first.source_columns[v];
    inputs.is_contrast[v] = source >= n_original;
    if (!raw.groups.empty()) inputs.groups.push_back(raw.groups[source]);
  }

  RunOutcome outcome;
  outcome.report = build_report(inputs, calibration, config.method, config.alpha);
  outcome.report.warnings = first.warnings;
  if (calibration.calibration == Calibration::Fallback) {
    outcome.report.warnings.push_back(
        {"gamma", "fit refused: fewer than " + std::to_string(fit_config.min_used) +
                      " null p_min values; gamma set to n_tests, final p-values are conservative"});
    outcome.exit_code = 2;
  }
  if (calibration.capped) outcome.report.warnings.push_back({"gamma", "fitted gamma exceeded n_tests and was capped"});
  return outcome;
}

}  // namespace mdscan
