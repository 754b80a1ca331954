#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdscan/rng.hpp"

namespace mdscan {

enum class ColumnKind { Continuous, Categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<double> values;       // populated for Continuous
  std::vector<std::string> labels;  // populated for Categorical

  std::size_t size() const { return kind == ColumnKind::Continuous ? values.size() : labels.size(); }
};

// Structured record for a variable that was dropped or altered before the scan.
struct Warning {
  std::string name;
  std::string reason;
};

struct RawDataset {
  std::vector<Column> descriptors;
  Column response;
  std::size_t n_objects = 0;
  std::size_t dropped_rows = 0;
  // Optional ground-truth group label per descriptor (synthetic data only).
  std::vector<std::string> groups;

  const Column* find(std::string_view name) const;
};

struct IngestOptions {
  char delimiter = 0;  // 0 picks '\t' when the header contains a tab, ',' otherwise
};

// Parses delimiter-separated text with a mandatory header row. Rows with any
// empty or NA cell are dropped and counted. A column is continuous when every
// remaining cell parses as a number.
RawDataset ingest(std::istream& in, std::string_view response_name, const IngestOptions& options = {});
RawDataset ingest_file(const std::filesystem::path& path, std::string_view response_name,
                       const IngestOptions& options = {});

// Throws unless the dataset is internally consistent.
void validate(const RawDataset& raw);

struct DiscretizationSpec {
  unsigned n_categories = 3;
  unsigned n_shifts = 0;
  double shift_magnitude = 0.25;
  std::uint64_t seed = 0;
  // 0 recodes the response densely; >= 2 discretizes a continuous response.
  unsigned response_categories = 0;
};

void validate(const DiscretizationSpec& spec);

// Category codes for one variable; codes are dense in [0, cardinality).
struct Discretized {
  std::vector<std::uint8_t> codes;
  unsigned cardinality = 0;
};

inline constexpr unsigned kMaxCategories = 255;

// Equipotent split. Returns nullopt for a constant (degenerate) column.
std::optional<Discretized> discretize_equipotent(std::span<const double> values, unsigned n_categories);

// Equipotent split with every quantile point displaced by an independent
// uniform draw of at most `shift_magnitude` quantile widths.
std::optional<Discretized> discretize_shifted(std::span<const double> values, unsigned n_categories,
                                              double shift_magnitude, CounterRng& rng);

// Column-major matrix of category codes, the scan's only input.
struct DiscreteMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<unsigned> cardinalities;
  std::vector<std::size_t> source_columns;  // index into RawDataset::descriptors
  std::vector<std::uint8_t> response_codes;
  unsigned response_cardinality = 0;
  std::size_t n_objects = 0;
  std::vector<Warning> warnings;

  std::size_t n_variables() const { return codes.size(); }
  bool equal_cardinality() const;
};

// shift_index 0 is the unshifted split; 1..n_shifts draw shifted splits.
DiscreteMatrix discretize_dataset(const RawDataset& raw, const DiscretizationSpec& spec, unsigned shift_index);

}  // namespace mdscan
