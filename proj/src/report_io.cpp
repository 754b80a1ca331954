#include "mdscan/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mdscan/error.hpp"

namespace mdscan {
namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

bool has_groups(const SelectionReport& report) {
  return std::any_of(report.variables.begin(), report.variables.end(),
                     [](const VariableReport& v) { return !v.group.empty(); });
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string format_probability(double value, double log_value) {
  if (value >= 1e-300 || !std::isfinite(log_value)) return format_number(value);
  const double l10 = log_value / std::numbers::ln10;
  auto exponent = static_cast<long long>(std::floor(l10));
  double mantissa = std::pow(10.0, l10 - static_cast<double>(exponent));
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.5f", mantissa);
  if (buf[0] == '1' && buf[1] == '0') {  // rounded up to 10
    mantissa /= 10.0;
    ++exponent;
  }
  std::snprintf(buf, sizeof buf, "%.6ge%lld", mantissa, exponent);
  return buf;
}

void write_report_tsv(const SelectionReport& report, std::ostream& out) {
  const bool groups = has_groups(report);
  out << "name\t";
  if (groups) out << "group\t";
  out << "max_cmi_nats\tbest_tuple\tp_min\tfinal_p\tadjusted_p\trelevant\trank\n";
  for (const auto& v : report.variables) {
    out << v.name << '\t';
    if (groups) out << v.group << '\t';
    out << format_number(v.max_cmi) << '\t' << join(v.best_tuple, ',') << '\t'
        << format_probability(v.p_min, v.log_p_min) << '\t' << format_probability(v.final_p, v.log_final_p) << '\t'
        << format_number(v.adjusted_p) << '\t' << (v.relevant ? 1 : 0) << '\t' << v.rank << '\n';
  }
}

void write_summary_json(const SelectionReport& report, std::ostream& out, std::size_t dropped_rows) {
  nlohmann::ordered_json j;
  j["k"] = report.k;
  j["method"] = to_string(report.method);
  j["alpha"] = report.alpha;
  j["mode"] = to_string(report.mode);
  j["n_objects"] = report.n_objects;
  j["dropped_rows"] = dropped_rows;
  j["n_variables"] = report.variables.size();
  j["n_tests"] = report.n_tests;
  j["calibration"] = to_string(report.calibration);
  j["gamma"] = report.gamma;
  j["gamma_capped"] = report.gamma_capped;
  j["fit"] = {{"gamma", report.fit.gamma},
              {"n_used", report.fit.n_used},
              {"n_trimmed_low", report.fit.n_trimmed_low},
              {"n_trimmed_high", report.fit.n_trimmed_high},
              {"fit_error", report.fit.fit_error},
              {"iterations", report.fit.iterations},
              {"refused", report.fit.refused},
              {"lower_tail_rule", "exclude 1-exp(-gamma p_min) < alpha/n at the current fit"},
              {"trim_rule", "drop T in [0, max(2, n/100)] largest values minimizing the weighted quantile error"},
              {"weights", "inverse variance of exponential order statistics"}};
  j["relevant_count"] = report.relevant_count();
  nlohmann::ordered_json relevant = nlohmann::ordered_json::array();
  for (const auto& v : report.variables)
    if (v.relevant) relevant.push_back(v.name);
  j["relevant"] = std::move(relevant);
  nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
  for (const auto& w : report.warnings) warnings.push_back({{"name", w.name}, {"reason", w.reason}});
  j["warnings"] = std::move(warnings);
  out << j.dump(2) << '\n';
}

void write_pp_tsv(const SelectionReport& report, std::ostream& out) {
  out << "name\tp_min\tempirical\tmodel\n";
  for (const auto& p : report.pp)
    out << p.name << '\t' << format_number(p.p_min) << '\t' << format_number(p.empirical) << '\t'
        << format_number(p.model) << '\n';
}

void export_selected_csv(const RawDataset& raw, const SelectionReport& report, std::ostream& out) {
  std::vector<const Column*> cols;
  for (const auto& c : raw.descriptors) {
    const bool selected = std::any_of(report.variables.begin(), report.variables.end(),
                                      [&](const VariableReport& v) { return v.relevant && v.name == c.name; });
    if (selected) cols.push_back(&c);
  }
  cols.push_back(&raw.response);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << csv_field(cols[c]->name);
  out << '\n';
  for (std::size_t r = 0; r < raw.n_objects; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      const Column& col = *cols[c];
      out << (col.kind == ColumnKind::Continuous ? shortest(col.values[r]) : csv_field(col.labels[r]));
    }
    out << '\n';
  }
}

std::vector<ReportRow> read_report_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Parse, "empty report");
  const auto header = split(line, '\t');
  auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorCode::Parse, std::string("report lacks column \"") + name + "\"");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t name_col = column("name"), relevant_col = column("relevant"), rank_col = column("rank");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != header.size()) fail(ErrorCode::Parse, "report row has " + std::to_string(f.size()) + " fields");
    ReportRow row;
    row.name = f[name_col];
    row.relevant = f[relevant_col] == "1";
    const auto& r = f[rank_col];
    if (std::from_chars(r.data(), r.data() + r.size(), row.rank).ec != std::errc())
      fail(ErrorCode::Parse, "bad rank \"" + r + "\"");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::string> read_manifest_groups(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.contains("columns") || !j["columns"].is_array()) fail(ErrorCode::Parse, "manifest lacks a columns array");
  std::map<std::string, std::string> groups;
  for (const auto& c : j["columns"]) {
    if (!c.contains("name") || !c.contains("group")) fail(ErrorCode::Parse, "manifest column lacks name or group");
    groups[c["name"].get<std::string>()] = c["group"].get<std::string>();
  }
  return groups;
}

namespace {

std::size_t group_index(const std::string& label) {
  if (label.size() == 2 && label[0] == 'G' && label[1] >= '1' && label[1] <= '7')
    return static_cast<std::size_t>(label[1] - '1');
  return kSynthGroups;
}

}  // namespace

BenchScore score_report(const std::vector<ReportRow>& rows, const std::map<std::string, std::string>& groups) {
  BenchScore score;
  for (const auto& [name, label] : groups) {
    const std::size_t g = group_index(label);
    if (g < kSynthGroups) ++score.sizes[g];
  }
  for (const auto& row : rows) {
    const auto it = groups.find(row.name);
    if (it == groups.end()) fail(ErrorCode::Data, "report variable \"" + row.name + "\" is not in the manifest");
    const std::size_t g = group_index(it->second);
    if (g >= kSynthGroups) continue;
    if (row.relevant) ++score.found[g];
    score.ranks[g].push_back(row.rank);
  }
  for (auto& r : score.ranks) std::sort(r.begin(), r.end());
  return score;
}

std::vector<std::size_t> rank_summary(const BenchScore& score, std::size_t group) {
  if (group >= kSynthGroups) fail(ErrorCode::InvalidArgument, "group index out of range");
  const auto& r = score.ranks[group];
  if (r.empty()) return {};
  if (group <= 1) return r;
  if (group <= 4) return {r.front(), r.back()};
  return {r.front()};
}

void write_bench_score(const BenchScore& score, std::ostream& out) {
  out << "table1";
  for (std::size_t g = 0; g < kSynthGroups; ++g) out << "\tG" << g + 1;
  out << "\nsize";
  for (std::size_t g = 0; g < kSynthGroups; ++g) out << '\t' << score.sizes[g];
  out << "\nfound";
  for (std::size_t g = 0; g < kSynthGroups; ++g) out << '\t' << score.found[g];
  out << "\ntable2";
  for (std::size_t g = 0; g < kSynthGroups; ++g) out << "\tG" << g + 1;
  out << "\nranks";
  for (std::size_t g = 0; g < kSynthGroups; ++g) {
    out << '\t';
    const auto summary = rank_summary(score, g);
    for (std::size_t i = 0; i < summary.size(); ++i) out << (i ? " " : "") << summary[i];
  }
  out << '\n';
}

}  // namespace mdscan
