#include "mdscan/distributions.hpp"

#include <cmath>
#include <limits>

#include "mdscan/error.hpp"

namespace mdscan {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

// ln of x^a e^-x / Gamma(a)
double log_prefactor(double a, double x) { return -x + a * std::log(x) - std::lgamma(a); }

// Series for the lower regularized function P(a, x); converges fast for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * sum;
}

// ln of the continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double log_upper_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::log(h);
}

}  // namespace

double log_gamma_q(double a, double x) {
  if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "incomplete gamma needs a > 0");
  if (std::isnan(x)) fail(ErrorCode::InvalidArgument, "incomplete gamma of NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) return std::log1p(-lower_series(a, x));
  return log_prefactor(a, x) + log_upper_fraction(a, x);
}

double chi2_log_survival(double statistic, std::uint64_t df) {
  if (df == 0) fail(ErrorCode::InvalidArgument, "chi-squared needs df >= 1");
  if (std::isnan(statistic)) fail(ErrorCode::InvalidArgument, "chi-squared statistic is NaN");
  if (statistic <= 0.0) return 0.0;
  return log_gamma_q(0.5 * static_cast<double>(df), 0.5 * statistic);
}

double chi2_survival(double statistic, std::uint64_t df) { return std::exp(chi2_log_survival(statistic, df)); }

double exponential_pvalue(double p_min, double gamma) {
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "exponential rate must be positive");
  if (p_min <= 0.0) return 0.0;
  return -std::expm1(-gamma * p_min);
}

double log_exponential_pvalue(double log_p_min, double gamma) {
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "exponential rate must be positive");
  if (log_p_min == -std::numeric_limits<double>::infinity()) return log_p_min;
  const double lx = std::log(gamma) + log_p_min;  // ln(gamma p)
  // ln(1 - e^-x) = ln x - x/2 + O(x^2)
  if (lx < -30.0) return lx - 0.5 * std::exp(lx);
  return std::log(-std::expm1(-std::exp(lx)));
}

}  // namespace mdscan
