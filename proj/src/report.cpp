#include "mdscan/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdscan/distributions.hpp"
#include "mdscan/error.hpp"
#include "mdscan/multiple_testing.hpp"

namespace mdscan {

const char* to_string(Method method) { return method == Method::Fwer ? "fwer" : "fdr"; }

const char* to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::Auto: return "auto";
    case ScanMode::EqualCardinality: return "equal-cardinality";
    case ScanMode::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(Calibration calibration) {
  switch (calibration) {
    case Calibration::Exponential: return "exponential";
    case Calibration::Fallback: return "fallback";
    case Calibration::Direct: return "direct";
  }
  return "?";
}

std::size_t SelectionReport::relevant_count() const {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(), [](const VariableReport& v) { return v.relevant; }));
}

double log_pmin_from_score(const VariableScore& score, ScanMode mode, std::size_t n_objects) {
  if (mode == ScanMode::EqualCardinality) {
    if (score.best_tuple.empty() || score.max_cmi <= 0.0) return 0.0;
    return chi2_log_survival(2.0 * static_cast<double>(n_objects) * score.max_cmi, score.best_df);
  }
  return score.min_p_tuple.empty() ? 0.0 : score.log_min_p;
}

double pmin_from_score(const VariableScore& score, ScanMode mode, std::size_t n_objects) {
  return std::exp(log_pmin_from_score(score, mode, n_objects));
}

namespace {

std::uint64_t tests_per_variable(const ScanResult& scores) {
  std::uint64_t n = 0;
  for (const auto& s : scores.scores) n = std::max(n, s.n_tests);
  return n;
}

}  // namespace

CalibrationResult calibrate(const ScanResult& scores, const GammaFitConfig& config) {
  CalibrationResult out;
  const std::uint64_t n_tests = tests_per_variable(scores);
  if (n_tests == 0) fail(ErrorCode::InvalidArgument, "no tests were recorded");
  if (n_tests == 1) {
    // A single test per variable needs no extreme-value correction.
    out.calibration = Calibration::Direct;
    out.gamma = 1.0;
    out.fit.retained.assign(scores.scores.size(), true);
    out.fit.n_used = scores.scores.size();
    return out;
  }
  std::vector<double> p(scores.scores.size());
  for (std::size_t v = 0; v < p.size(); ++v) p[v] = pmin_from_score(scores.scores[v], scores.mode, scores.n_objects);
  out.fit = estimate_gamma(p, config);
  if (out.fit.refused) {
    out.calibration = Calibration::Fallback;
    out.gamma = static_cast<double>(n_tests);
    return out;
  }
  out.calibration = Calibration::Exponential;
  out.gamma = out.fit.gamma;
  if (out.gamma > static_cast<double>(n_tests)) {
    out.gamma = static_cast<double>(n_tests);
    out.capped = true;
  }
  return out;
}

SelectionReport build_report(const ReportInputs& inputs, const CalibrationResult& calibration, Method method,
                             double alpha) {
  if (inputs.scores == nullptr) fail(ErrorCode::InvalidArgument, "report needs scores");
  const ScanResult& scores = *inputs.scores;
  const std::size_t n = scores.scores.size();
  if (inputs.names.size() != n) fail(ErrorCode::InvalidArgument, "one name per scored variable is required");
  if (!inputs.groups.empty() && inputs.groups.size() != n) fail(ErrorCode::InvalidArgument, "group count mismatch");
  if (!inputs.is_contrast.empty() && inputs.is_contrast.size() != n)
    fail(ErrorCode::InvalidArgument, "contrast flag count mismatch");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");

  SelectionReport report;
  report.k = scores.k;
  report.method = method;
  report.alpha = alpha;
  report.mode = scores.mode;
  report.n_objects = scores.n_objects;
  report.n_tests = tests_per_variable(scores);
  report.calibration = calibration.calibration;
  report.fit = calibration.fit;
  report.gamma = calibration.gamma;
  report.gamma_capped = calibration.capped;

  std::vector<double> log_p(n);
  std::vector<double> log_final(n);
  for (std::size_t v = 0; v < n; ++v) {
    log_p[v] = log_pmin_from_score(scores.scores[v], scores.mode, scores.n_objects);
    log_final[v] = calibration.calibration == Calibration::Direct ? log_p[v]
                                                                   : log_exponential_pvalue(log_p[v], calibration.gamma);
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (!inputs.is_contrast.empty() && inputs.is_contrast[v]) continue;
    const VariableScore& s = scores.scores[v];
    VariableReport r;
    r.name = inputs.names[v];
    if (!inputs.groups.empty()) r.group = inputs.groups[v];
    r.max_cmi = std::max(0.0, s.max_cmi);
    const Tuple& tuple = scores.mode == ScanMode::EqualCardinality ? s.best_tuple : s.min_p_tuple;
    for (unsigned idx : tuple) r.best_tuple.push_back(inputs.names.at(idx));
    r.best_df = scores.mode == ScanMode::EqualCardinality ? s.best_df : s.min_p_df;
    r.log_p_min = log_p[v];
    r.p_min = std::exp(log_p[v]);
    r.log_final_p = log_final[v];
    r.final_p = std::clamp(std::exp(log_final[v]), 0.0, 1.0);
    r.n_tests = s.n_tests;
    report.variables.push_back(std::move(r));
  }

  std::vector<double> finals;
  finals.reserve(report.variables.size());
  for (const auto& r : report.variables) finals.push_back(r.final_p);
  if (!finals.empty()) {
    const Selection sel = method == Method::Fwer ? holm_select(finals, alpha) : bh_select(finals, alpha);
    for (std::size_t i = 0; i < finals.size(); ++i) {
      report.variables[i].relevant = sel.relevant[i];
      report.variables[i].adjusted_p = std::max(sel.adjusted[i], report.variables[i].final_p);
    }
  }

  // Ranks follow ln(final_p) so that p-values below the double range still
  // order correctly; ties go to the name.
  std::vector<std::size_t> order(report.variables.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = report.variables[a];
    const auto& y = report.variables[b];
    if (x.log_final_p != y.log_final_p) return x.log_final_p < y.log_final_p;
    return x.name < y.name;
  });
  std::vector<VariableReport> ranked;
  ranked.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    ranked.push_back(std::move(report.variables[order[i]]));
    ranked.back().rank = i + 1;
  }
  report.variables = std::move(ranked);

  // P-P data over the null set that entered the fit.
  std::vector<std::size_t> null_set;
  for (std::size_t v = 0; v < n; ++v)
    if (v < calibration.fit.retained.size() && calibration.fit.retained[v]) null_set.push_back(v);
  std::stable_sort(null_set.begin(), null_set.end(), [&](std::size_t a, std::size_t b) { return log_p[a] < log_p[b]; });
  for (std::size_t i = 0; i < null_set.size(); ++i) {
    const std::size_t v = null_set[i];
    PPPoint pt;
    pt.name = inputs.names[v];
    pt.p_min = std::exp(log_p[v]);
    pt.empirical = (static_cast<double>(i) + 0.5) / static_cast<double>(null_set.size());
    pt.model = calibration.calibration == Calibration::Direct ? pt.p_min
                                                               : exponential_pvalue(pt.p_min, calibration.gamma);
    report.pp.push_back(std::move(pt));
  }
  return report;
}

}  // namespace mdscan
