#include "pairinfer/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "pairinfer/error.hpp"
#include "pairinfer/pair_model.hpp"

namespace pairinfer {

namespace {

constexpr double kTauSearchStart = 1.0;
constexpr double kTauSearchLimit = 1e3;
constexpr double kRootTolerance = 1e-10;

void require_two_times(const Dataset& data) {
  if (data.size() != 2) throw DomainError("closed-form estimators need exactly two observation times");
}

}  // namespace

TwoPointCounts TwoPointCounts::from(const Dataset& data) {
  require_two_times(data);
  const PairCounts a = data.counts(0);
  const PairCounts b = data.counts(1);
  return {static_cast<double>(a.ss), static_cast<double>(a.si), static_cast<double>(a.ii),
          static_cast<double>(b.ss), static_cast<double>(b.si), static_cast<double>(b.ii),
          data.elapsed(1)};
}

GenderTwoPointCounts GenderTwoPointCounts::from(const Dataset& data) {
  require_two_times(data);
  const GenderPairCounts& a = data.gender_counts(0);
  const GenderPairCounts& b = data.gender_counts(1);
  GenderTwoPointCounts c;
  c.ss0 = static_cast<double>(a.ss);
  c.is0 = static_cast<double>(a.is);
  c.si0 = static_cast<double>(a.si);
  c.ii0 = static_cast<double>(a.ii);
  c.ss_t = static_cast<double>(b.ss);
  c.is_t = static_cast<double>(b.is);
  c.si_t = static_cast<double>(b.si);
  c.ii_t = static_cast<double>(b.ii);
  c.horizon = data.elapsed(1);
  return c;
}

LambdaHat lambda_hat_closed_form(const TwoPointCounts& c) {
  if (!(c.ss0 > 0.0) || !(c.ss_t > 0.0)) throw DomainError("lambda_hat needs SS counts > 0 at both times");
  if (!(c.horizon > 0.0)) throw DomainError("lambda_hat needs a positive observation window");
  LambdaHat out;
  out.value = std::log(c.ss0 / c.ss_t) / (2.0 * c.horizon);
  out.susceptibles_increased = c.ss_t > c.ss0;
  return out;
}

LambdaHat lambda_hat_closed_form(const Dataset& data) { return lambda_hat_closed_form(TwoPointCounts::from(data)); }

std::optional<PhiExpansion> phi_hat_binomial(const TwoPointCounts& c, double lambda_hat, double tau_max) {
  const double depletion = c.ss_t - c.ss0;
  if (depletion == 0.0 || c.si_t == 0.0 || c.ss0 == 0.0) return std::nullopt;

  PhiExpansion e;
  e.phi = (c.ss_t / depletion) * (c.si0 * c.ss_t / (c.ss0 * c.si_t) - 1.0 - depletion / c.si_t);
  e.tau_two_phi_plus_one = (2.0 * e.phi + 1.0) * lambda_hat;
  e.tau_phi_plus_one = (e.phi + 1.0) * lambda_hat;
  e.tau_two_phi_plus_one_clamped = std::clamp(e.tau_two_phi_plus_one, 0.0, tau_max);
  e.tau_phi_plus_one_clamped = std::clamp(e.tau_phi_plus_one, 0.0, tau_max);
  e.clamped = e.tau_two_phi_plus_one_clamped != e.tau_two_phi_plus_one ||
              e.tau_phi_plus_one_clamped != e.tau_phi_plus_one;
  return e;
}

std::optional<double> phi_hat_first_order(const TwoPointCounts& c) {
  const double depletion = c.ss_t - c.ss0;
  if (depletion == 0.0 || c.si_t == 0.0 || c.ss0 == 0.0 || c.ss_t == 0.0) return std::nullopt;
  const double ratio_t = c.si_t / c.ss_t;
  const double ratio_0 = c.si0 / c.ss0;
  return (1.0 + (c.ss_t / depletion) * (ratio_t - ratio_0)) / ratio_t;
}

double tau_hat_rootsolve(const TwoPointCounts& c, double lambda_hat) {
  if (!(lambda_hat >= 0.0) || !std::isfinite(lambda_hat)) throw DomainError("tau root solve needs lambda_hat >= 0");
  const double n = c.total();
  if (!(n - c.ss_t > 0.0)) throw DomainError("tau root solve needs pairs outside SS at time T");

  const PairState init{c.ss0, c.si0, c.ii0};
  const double t = c.horizon;
  const double p_ss = solve_nongender({lambda_hat, 0.0}, init, t).ss;
  const double target = c.si_t * (n - p_ss) / (n - c.ss_t);
  // P_SI is strictly decreasing in tau, so g changes sign once.
  const auto g = [&](double tau) { return solve_nongender({lambda_hat, tau}, init, t).si - target; };

  double lo = lambda_hat * (1.0 + 1e-9);
  double g_lo = g(lo);
  if (std::abs(g_lo) <= 1e-12 * std::max(1.0, target)) return lo;

  double hi;
  if (g_lo > 0.0) {
    hi = kTauSearchStart;
    while (g(hi) > 0.0) {
      if (hi >= kTauSearchLimit) throw NoRootError("no tau in [lambda_hat, 1e3] reproduces the discordant count");
      lo = hi;
      hi = std::min(2.0 * hi, kTauSearchLimit);
    }
  } else {
    // Root lies below lambda_hat.
    hi = lo;
    lo = 0.0;
    if (g(lo) < 0.0) throw NoRootError("no non-negative tau reproduces the discordant count");
  }

  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double tau_hat_rootsolve(const Dataset& data, double lambda_hat) {
  return tau_hat_rootsolve(TwoPointCounts::from(data), lambda_hat);
}

CfaEstimate cfa(const TwoPointCounts& c) {
  if (!(c.horizon > 0.0)) throw DomainError("CFA needs a positive observation window");
  if (c.ss0 == 0.0 || c.si0 == 0.0) throw DomainError("CFA needs SS0 > 0 and SI0 > 0");
  CfaEstimate out;
  const double lambda = (c.si_t - c.si0) / (2.0 * c.horizon * c.ss0);
  const double tau = (c.ii_t - c.ii0) / (2.0 * c.horizon * c.si0);
  out.lambda_clamped = lambda < 0.0;
  out.tau_clamped = tau < 0.0;
  out.params = {std::max(lambda, 0.0), std::max(tau, 0.0)};
  return out;
}

CfaEstimate cfa(const Dataset& data) { return cfa(TwoPointCounts::from(data)); }

ThetaApprox gender_theta_approx(const GenderTwoPointCounts& c, double q, double lambda_hat) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
  if (!(lambda_hat >= 0.0)) throw DomainError("lambda_hat must be non-negative");
  const double depletion = c.ss_t - c.ss0;
  if (depletion == 0.0) throw DomainError("theta approximation undefined when SS_T == SS0");
  if (c.ss0 == 0.0 || c.ss_t == 0.0 || c.is_t == 0.0 || c.si_t == 0.0) {
    throw DomainError("theta approximation needs non-zero SS and discordant counts");
  }
  const double lead = c.ss_t / depletion;
  ThetaApprox out;
  out.theta_m = (q + lead * (c.is_t / c.ss_t - c.is0 / c.ss0)) * c.ss_t / c.is_t;
  out.theta_f = (1.0 - q + lead * (c.si_t / c.ss_t - c.si0 / c.ss0)) * c.ss_t / c.si_t;
  out.rates = reparam_to_rates({lambda_hat, q, out.theta_m, out.theta_f});
  return out;
}

ThetaApprox gender_theta_approx(const Dataset& data, double q, double lambda_hat) {
  return gender_theta_approx(GenderTwoPointCounts::from(data), q, lambda_hat);
}

AnalyticEstimate analytic_estimate(const Dataset& data) {
  const TwoPointCounts c = TwoPointCounts::from(data);
  AnalyticEstimate out;
  out.lambda_hat = lambda_hat_closed_form(c);
  out.expansion = phi_hat_binomial(c, out.lambda_hat.value);
  out.phi_first_order = phi_hat_first_order(c);
  if (out.lambda_hat.value >= 0.0) {
    try {
      out.tau_hat_rootsolve = tau_hat_rootsolve(c, out.lambda_hat.value);
    } catch (const NoRootError&) {
      out.tau_hat_rootsolve.reset();
    }
  }
  out.cfa = cfa(c);
  return out;
}

}  // namespace pairinfer
