#pragma once

#include <cstdint>
#include <vector>

namespace pairinfer::stats {

double normal_cdf(double x);

/// Inverse standard normal CDF. Rational approximation followed by one
/// Halley step against erfc; accurate to ~1e-15 relative on (0, 1).
double normal_quantile(double p);

/// Two-sided Wald multiplier, e.g. 1.959964 for level 0.95.
double wald_z(double level);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

double chi_square_cdf(double x, double dof);
double chi_square_sf(double x, double dof);
/// Closed form for two degrees of freedom, Wilson-Hilferty start plus Newton
/// refinement otherwise.
double chi_square_quantile(double p, double dof);

struct ChiSquareTest {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int bins = 0;
};

/// Two-sample chi-square homogeneity test on integer-valued samples. Adjacent
/// values are pooled until every pooled bin holds at least `min_pooled` of the
/// combined observations.
ChiSquareTest chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                    int min_pooled = 10);

/// Two-sided exact sign test p-value for `positives` out of `trials`.
double sign_test_p_value(int positives, int trials);

}  // namespace pairinfer::stats
