#include "mdscan/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "mdscan/error.hpp"

namespace mdscan {
namespace {

// RFC-4180 record reader: quoted fields may hold delimiters, doubled quotes
// and line breaks. Returns false at end of input.
bool read_record(std::istream& in, char delimiter, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\r') {
      if (in.peek() == '\n') continue;
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) fail(ErrorCode::Parse, "unterminated quoted field near line " + std::to_string(line + 1));
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

bool parse_number(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace

const Column* RawDataset::find(std::string_view name) const {
  if (response.name == name) return &response;
  for (const auto& c : descriptors)
    if (c.name == name) return &c;
  return nullptr;
}

RawDataset ingest(std::istream& in, std::string_view response_name, const IngestOptions& options) {
  std::size_t line = 0;
  std::vector<std::string> header;

  char delimiter = options.delimiter;
  if (delimiter == 0) {
    // Peek the header line to pick the delimiter.
    std::string first;
    std::getline(in, first);
    if (!in && first.empty()) fail(ErrorCode::Parse, "empty input: header row is mandatory");
    delimiter = first.find('\t') != std::string::npos ? '\t' : ',';
    std::istringstream header_stream(first + "\n");
    std::size_t header_line = 0;
    read_record(header_stream, delimiter, header, header_line);
    line = 1;
  } else if (!read_record(in, delimiter, header, line)) {
    fail(ErrorCode::Parse, "empty input: header row is mandatory");
  }
  for (auto& h : header) h = std::string(trim(h));
  if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().erase(0, 3);

  std::set<std::string> seen;
  for (const auto& h : header) {
    if (h.empty()) fail(ErrorCode::Parse, "empty column name in header");
    if (!seen.insert(h).second) fail(ErrorCode::Parse, "duplicate column name \"" + h + "\"");
  }
  const auto response_it = std::find(header.begin(), header.end(), response_name);
  if (response_it == header.end()) fail(ErrorCode::InvalidArgument, "missing response column \"" + std::string(response_name) + "\"");
  const auto response_index = static_cast<std::size_t>(response_it - header.begin());
  if (header.size() < 2) fail(ErrorCode::Data, "no descriptor columns besides the response");

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t dropped = 0;
  std::vector<std::string> fields;
  while (read_record(in, delimiter, fields, line)) {
    if (blank_record(fields)) continue;
    if (fields.size() != header.size())
      fail(ErrorCode::Parse, "line " + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                                 " fields, found " + std::to_string(fields.size()));
    if (std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return is_missing(f); })) {
      ++dropped;
      continue;
    }
    for (std::size_t c = 0; c < fields.size(); ++c) cells[c].push_back(std::string(trim(fields[c])));
  }

  const std::size_t n = cells[0].size();
  if (n == 0) fail(ErrorCode::Data, "zero usable rows");
  if (n >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    fail(ErrorCode::Data, "too many rows: counts are limited to 2^31 - 1");

  RawDataset raw;
  raw.n_objects = n;
  raw.dropped_rows = dropped;
  for (std::size_t c = 0; c < header.size(); ++c) {
    Column col;
    col.name = header[c];
    std::vector<double> numbers(n);
    bool numeric = true;
    for (std::size_t r = 0; r < n && numeric; ++r) numeric = parse_number(cells[c][r], numbers[r]);
    if (numeric) {
      col.kind = ColumnKind::Continuous;
      col.values = std::move(numbers);
    } else {
      col.kind = ColumnKind::Categorical;
      col.labels = std::move(cells[c]);
    }
    cells[c].clear();
    cells[c].shrink_to_fit();
    if (c == response_index)
      raw.response = std::move(col);
    else
      raw.descriptors.push_back(std::move(col));
  }
  return raw;
}

RawDataset ingest_file(const std::filesystem::path& path, std::string_view response_name, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open input file " + path.string());
  return ingest(in, response_name, options);
}

void validate(const RawDataset& raw) {
  if (raw.n_objects == 0) fail(ErrorCode::Data, "zero usable rows");
  if (raw.response.size() != raw.n_objects) fail(ErrorCode::Data, "response column length mismatch");
  std::set<std::string> names{raw.response.name};
  for (const auto& c : raw.descriptors) {
    if (c.size() != raw.n_objects) fail(ErrorCode::Data, "column \"" + c.name + "\" length mismatch");
    if (!names.insert(c.name).second) fail(ErrorCode::Data, "duplicate column name \"" + c.name + "\"");
  }
  if (!raw.groups.empty() && raw.groups.size() != raw.descriptors.size())
    fail(ErrorCode::Data, "group labels do not match descriptors");
}

void validate(const DiscretizationSpec& spec) {
  if (spec.n_categories < 2 || spec.n_categories > kMaxCategories)
    fail(ErrorCode::InvalidArgument, "n_categories must be in [2, 255]");
  if (!(spec.shift_magnitude >= 0.0 && spec.shift_magnitude < 0.5))
    fail(ErrorCode::InvalidArgument, "shift_magnitude must be in [0, 0.5)");
  if (spec.response_categories == 1 || spec.response_categories > kMaxCategories)
    fail(ErrorCode::InvalidArgument, "response categories must be 0 or in [2, 255]");
}

bool DiscreteMatrix::equal_cardinality() const {
  return std::adjacent_find(cardinalities.begin(), cardinalities.end(), std::not_equal_to<>()) == cardinalities.end();
}

namespace {

template <typename T>
std::optional<Discretized> dense_recode(const std::vector<T>& values) {
  std::map<T, std::uint8_t> levels;
  for (const auto& v : values) levels.emplace(v, 0);
  if (levels.size() > kMaxCategories) return std::nullopt;
  std::uint8_t next = 0;
  for (auto& [value, code] : levels) code = next++;
  Discretized out;
  out.cardinality = static_cast<unsigned>(levels.size());
  out.codes.reserve(values.size());
  for (const auto& v : values) out.codes.push_back(levels.at(v));
  return out;
}

std::optional<Discretized> dense_recode(const Column& column) {
  return column.kind == ColumnKind::Continuous ? dense_recode(column.values) : dense_recode(column.labels);
}

}  // namespace

DiscreteMatrix discretize_dataset(const RawDataset& raw, const DiscretizationSpec& spec, unsigned shift_index) {
  validate(spec);
  validate(raw);
  if (shift_index > spec.n_shifts) fail(ErrorCode::InvalidArgument, "shift index exceeds n_shifts");

  DiscreteMatrix m;
  m.n_objects = raw.n_objects;

  std::optional<Discretized> response;
  if (raw.response.kind == ColumnKind::Continuous && spec.response_categories >= 2)
    response = discretize_equipotent(raw.response.values, spec.response_categories);
  else
    response = dense_recode(raw.response);
  if (!response) fail(ErrorCode::Data, "response column \"" + raw.response.name + "\" has more than 255 classes");
  if (response->cardinality < 2) fail(ErrorCode::Data, "response column \"" + raw.response.name + "\" is constant");
  m.response_codes = std::move(response->codes);
  m.response_cardinality = response->cardinality;

  for (std::size_t i = 0; i < raw.descriptors.size(); ++i) {
    const Column& col = raw.descriptors[i];
    std::optional<Discretized> d;
    if (col.kind == ColumnKind::Continuous) {
      if (shift_index == 0 || spec.shift_magnitude == 0.0) {
        d = discretize_equipotent(col.values, spec.n_categories);
      } else {
        CounterRng rng(spec.seed, 0x5348494654ULL + shift_index, i);
        d = discretize_shifted(col.values, spec.n_categories, spec.shift_magnitude, rng);
      }
    } else {
      d = dense_recode(col);
      if (!d) {
        m.warnings.push_back({col.name, "more than 255 categories"});
        continue;
      }
      if (d->cardinality < 2) d.reset();
    }
    if (!d) {
      m.warnings.push_back({col.name, "constant column"});
      continue;
    }
    m.names.push_back(col.name);
    m.codes.push_back(std::move(d->codes));
    m.cardinalities.push_back(d->cardinality);
    m.source_columns.push_back(i);
  }
  if (m.codes.empty()) fail(ErrorCode::Data, "all descriptors are degenerate");
  return m;
}

}  // namespace mdscan
