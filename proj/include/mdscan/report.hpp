#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mdscan/dataset.hpp"
#include "mdscan/gamma_fit.hpp"
#include "mdscan/scan.hpp"

namespace mdscan {

enum class Method { Fdr, Fwer };

const char* to_string(Method method);
const char* to_string(ScanMode mode);

struct VariableReport {
  std::string name;
  std::string group;  // empty unless ground truth is known
  double max_cmi = 0.0;
  std::vector<std::string> best_tuple;
  std::uint64_t best_df = 0;
  double p_min = 1.0;
  double log_p_min = 0.0;
  double final_p = 1.0;
  double log_final_p = 0.0;
  double adjusted_p = 1.0;
  bool relevant = false;
  std::size_t rank = 0;
  std::uint64_t n_tests = 0;
};

struct PPPoint {
  std::string name;
  double p_min = 0.0;
  double empirical = 0.0;  // (i - 0.5) / m over the retained null set
  double model = 0.0;      // 1 - exp(-gamma p_min)
};

enum class Calibration {
  Exponential,  // fitted gamma
  Fallback,     // fit refused, gamma = n_tests
  Direct,       // one test per variable, final_p = p_min
};

const char* to_string(Calibration calibration);

struct SelectionReport {
  unsigned k = 0;
  Method method = Method::Fdr;
  double alpha = 0.1;
  ScanMode mode = ScanMode::EqualCardinality;
  std::size_t n_objects = 0;
  std::uint64_t n_tests = 0;  // tests per variable
  Calibration calibration = Calibration::Exponential;
  ExponentialFit fit;
  double gamma = 0.0;  // value used for final p-values
  bool gamma_capped = false;
  std::vector<VariableReport> variables;
  std::vector<PPPoint> pp;
  std::vector<Warning> warnings;

  std::size_t relevant_count() const;
};

struct ReportInputs {
  const ScanResult* scores = nullptr;    // merged over shifts
  std::vector<std::string> names;        // one per scored variable
  std::vector<std::string> groups;       // empty or one per scored variable
  std::vector<bool> is_contrast;         // empty or one per scored variable
};

// Derives gamma (or the direct/fallback calibration) from the merged scores.
struct CalibrationResult {
  Calibration calibration = Calibration::Exponential;
  ExponentialFit fit;
  double gamma = 0.0;
  bool capped = false;
};

CalibrationResult calibrate(const ScanResult& scores, const GammaFitConfig& config);

// ln of the chi-squared extreme p-value of a score.
double log_pmin_from_score(const VariableScore& score, ScanMode mode, std::size_t n_objects);
double pmin_from_score(const VariableScore& score, ScanMode mode, std::size_t n_objects);

// Assembles per-variable fields, applies Holm or BH to the non-contrast
// variables, ranks by final_p ascending (ties by name) and attaches P-P data.
SelectionReport build_report(const ReportInputs& inputs, const CalibrationResult& calibration, Method method,
                             double alpha);

}  // namespace mdscan
