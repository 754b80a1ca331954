#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mdscan/dataset.hpp"
#include "mdscan/report.hpp"
#include "mdscan/synth.hpp"

namespace mdscan {

// Numbers with 6 significant digits; p-values below the double range are
// printed from their logarithm.
std::string format_number(double value);
std::string format_probability(double value, double log_value);

// Columns: name, [group,] max_cmi_nats, best_tuple, p_min, final_p,
// adjusted_p, relevant, rank. Rows in rank order.
void write_report_tsv(const SelectionReport& report, std::ostream& out);
void write_summary_json(const SelectionReport& report, std::ostream& out, std::size_t dropped_rows = 0);
void write_pp_tsv(const SelectionReport& report, std::ostream& out);

// Relevant descriptors plus the response, values as ingested.
void export_selected_csv(const RawDataset& raw, const SelectionReport& report, std::ostream& out);

struct ReportRow {
  std::string name;
  bool relevant = false;
  std::size_t rank = 0;
};

std::vector<ReportRow> read_report_tsv(std::istream& in);

// Column name -> group label ("G1" .. "G7").
std::map<std::string, std::string> read_manifest_groups(std::istream& in);

struct BenchScore {
  std::array<std::size_t, kSynthGroups> found{};
  std::array<std::size_t, kSynthGroups> sizes{};
  std::array<std::vector<std::size_t>, kSynthGroups> ranks;  // ascending
};

BenchScore score_report(const std::vector<ReportRow>& rows, const std::map<std::string, std::string>& groups);

// Table-1 layout (found counts) followed by Table-2 layout (all ranks for
// G1/G2, min and max for G3-G5, best rank for G6/G7).
void write_bench_score(const BenchScore& score, std::ostream& out);
std::vector<std::size_t> rank_summary(const BenchScore& score, std::size_t group);

}  // namespace mdscan
