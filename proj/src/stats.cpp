#include "pairinfer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "pairinfer/error.hpp"

namespace pairinfer::stats {

namespace {

// Acklam's rational approximation, lower region and central region coefficients.
constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                         1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                         6.680131188771972e+01,  -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                         -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                         3.754408661907416e+00};

double acklam_lower(double p) {
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
         (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

double gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_pdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  const double k = dof / 2.0;
  return std::exp((k - 1.0) * std::log(x) - x / 2.0 - k * std::numbers::ln2 - std::lgamma(k));
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("normal quantile needs p in [0, 1]");
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = acklam_lower(p);
  // Halley refinement on Phi(x) - p.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x -= u / (1.0 + x * u / 2.0);
  return x;
}

double wald_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  return normal_quantile(0.5 + level / 2.0);
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("incomplete gamma needs a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("incomplete gamma needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi_square_cdf(double x, double dof) { return x <= 0.0 ? 0.0 : regularized_gamma_p(dof / 2.0, x / 2.0); }

double chi_square_sf(double x, double dof) { return x <= 0.0 ? 1.0 : regularized_gamma_q(dof / 2.0, x / 2.0); }

double chi_square_quantile(double p, double dof) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("chi-square quantile needs p in [0, 1)");
  if (!(dof > 0.0)) throw DomainError("chi-square quantile needs dof > 0");
  if (p == 0.0) return 0.0;
  if (dof == 2.0) return -2.0 * std::log1p(-p);

  const double z = normal_quantile(p);
  const double h = 2.0 / (9.0 * dof);
  double x = dof * std::pow(std::max(1.0 - h + z * std::sqrt(h), 1e-3), 3.0);

  double lo = 0.0;
  double hi = std::max(2.0 * x, 1.0);
  while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double f = chi_square_cdf(x, dof) - p;
    if (f > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double pdf = chi_square_pdf(x, dof);
    double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

ChiSquareTest chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                    int min_pooled) {
  if (a.empty() || b.empty()) throw DomainError("two-sample chi-square needs non-empty samples");
  std::map<std::int64_t, std::pair<double, double>> histogram;
  for (auto v : a) histogram[v].first += 1.0;
  for (auto v : b) histogram[v].second += 1.0;

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> open{0.0, 0.0};
  for (const auto& [value, counts] : histogram) {
    open.first += counts.first;
    open.second += counts.second;
    if (open.first + open.second >= min_pooled) {
      bins.push_back(open);
      open = {0.0, 0.0};
    }
  }
  if (open.first + open.second > 0.0) {
    if (bins.empty()) {
      bins.push_back(open);
    } else {
      bins.back().first += open.first;
      bins.back().second += open.second;
    }
  }

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  ChiSquareTest out;
  out.bins = static_cast<int>(bins.size());
  for (const auto& [ca, cb] : bins) {
    const double diff = ca * ka - cb * kb;
    out.statistic += diff * diff / (ca + cb);
  }
  out.dof = out.bins - 1;
  out.p_value = out.dof > 0 ? chi_square_sf(out.statistic, out.dof) : 1.0;
  return out;
}

double sign_test_p_value(int positives, int trials) {
  if (trials <= 0 || positives < 0 || positives > trials) throw DomainError("sign test needs 0 <= k <= n, n > 0");
  const int k = std::min(positives, trials - positives);
  const double n = trials;
  double tail = 0.0;
  for (int i = 0; i <= k; ++i) {
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::numbers::ln2);
  }
  return std::min(1.0, 2.0 * tail);
}

}  // namespace pairinfer::stats
