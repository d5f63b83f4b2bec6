#pragma once

#include <optional>

#include "pairinfer/dataset.hpp"
#include "pairinfer/types.hpp"

namespace pairinfer {

/// Counts at the two ends of a single observation window. Real-valued so
/// that exact model expectations can be fed straight back in.
struct TwoPointCounts {
  double ss0 = 0, si0 = 0, ii0 = 0;
  double ss_t = 0, si_t = 0, ii_t = 0;
  double horizon = 0;  // T, years

  double total() const { return ss0 + si0 + ii0; }
  /// Requires exactly two observation times.
  static TwoPointCounts from(const Dataset& data);
};

struct GenderTwoPointCounts {
  double ss0 = 0, is0 = 0, si0 = 0, ii0 = 0;
  double ss_t = 0, is_t = 0, si_t = 0, ii_t = 0;
  double horizon = 0;

  double total() const { return ss0 + is0 + si0 + ii0; }
  static GenderTwoPointCounts from(const Dataset& data);
};

struct LambdaHat {
  double value = 0.0;
  /// Susceptible pairs grew over the window; the estimate is negative.
  bool susceptibles_increased = false;
};

/// (1 / 2T) log(SS0 / SS_T). Zero SS counts raise DomainError.
LambdaHat lambda_hat_closed_form(const TwoPointCounts& c);
LambdaHat lambda_hat_closed_form(const Dataset& data);

/// Binomial-expansion estimate of phi, evaluated exactly as published, with
/// the two tau conventions that appear alongside it.
struct PhiExpansion {
  double phi = 0.0;
  double tau_two_phi_plus_one = 0.0;  // tau = (2 phi + 1) lambda
  double tau_phi_plus_one = 0.0;      // tau = (phi + 1) lambda
  /// Same quantities clamped into the optimiser box [0, tau_max].
  double tau_two_phi_plus_one_clamped = 0.0;
  double tau_phi_plus_one_clamped = 0.0;
  bool clamped = false;
};

/// nullopt when SS_T == SS0 or SI_T == 0: the expansion is undefined and the
/// root solve should be used instead.
std::optional<PhiExpansion> phi_hat_binomial(const TwoPointCounts& c, double lambda_hat, double tau_max = 10.0);

/// Same expansion with the sign of the first-order solution of the
/// stationarity condition corrected; reported for comparison only.
std::optional<double> phi_hat_first_order(const TwoPointCounts& c);

/// Solves P_SI(T; lambda_hat, tau) = SI_T (N - P_SS(T; lambda_hat)) / (N - SS_T)
/// for tau by bisection. Throws NoRootError when no bracket exists below 1e3.
double tau_hat_rootsolve(const TwoPointCounts& c, double lambda_hat);
double tau_hat_rootsolve(const Dataset& data, double lambda_hat);

struct CfaEstimate {
  NonGenderParams params;
  bool lambda_clamped = false;
  bool tau_clamped = false;
};

/// Seroincidence warm start:
///   lambda = (SI_T - SI0) / (2 T SS0),  tau = (II_T - II0) / (2 T SI0),
/// negative values clamped to zero.
CfaEstimate cfa(const TwoPointCounts& c);
CfaEstimate cfa(const Dataset& data);

struct ThetaApprox {
  double theta_m = 0.0;
  double theta_f = 0.0;
  GenderParams rates;  // reparam_to_rates({lambda_hat, q, theta_m, theta_f})
};

/// First-order theta_m, theta_f given q; lambda_hat only enters the implied
/// rates. Warm starts only.
ThetaApprox gender_theta_approx(const GenderTwoPointCounts& c, double q, double lambda_hat);
ThetaApprox gender_theta_approx(const Dataset& data, double q, double lambda_hat);

/// Everything the closed forms give for a two-time dataset.
struct AnalyticEstimate {
  LambdaHat lambda_hat;
  std::optional<PhiExpansion> expansion;
  std::optional<double> phi_first_order;
  std::optional<double> tau_hat_rootsolve;  // absent when no root exists
  CfaEstimate cfa;
};

AnalyticEstimate analytic_estimate(const Dataset& data);

}  // namespace pairinfer
