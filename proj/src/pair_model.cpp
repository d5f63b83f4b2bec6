#include "pairinfer/pair_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairinfer/error.hpp"

namespace pairinfer {

namespace {

void require_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError(std::string("rate ") + name + " must be finite and non-negative, got " + std::to_string(value));
  }
}

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("time must be finite and non-negative, got " + std::to_string(t));
  }
}

void require_count(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError("initial pair counts must be finite and non-negative");
  }
}

}  // namespace

double decay_integral(double x, double t, double scale) {
  if (std::abs(x) < kSingularThreshold * std::max(1.0, scale)) {
    // t (1 - xt/2 + (xt)^2/6); the leading term is the exact limit at x = 0.
    const double xt = x * t;
    return t * (1.0 - xt / 2.0 + xt * xt / 6.0);
  }
  return -std::expm1(-x * t) / x;
}

PairState to_state(const PairCounts& c) {
  return {static_cast<double>(c.ss), static_cast<double>(c.si), static_cast<double>(c.ii)};
}

GenderPairState to_state(const GenderPairCounts& c) {
  return {static_cast<double>(c.ss), static_cast<double>(c.is), static_cast<double>(c.si),
          static_cast<double>(c.ii)};
}

PairState solve_nongender(const NonGenderParams& params, const PairState& init, double t) {
  require_rate(params.lambda, "lambda");
  require_rate(params.tau, "tau");
  require_time(t);
  require_count(init.ss);
  require_count(init.si);
  require_count(init.ii);
  if (t == 0.0) return init;

  const double lambda = params.lambda;
  const double tau = params.tau;
  const double n = init.total();
  const double gap = tau - lambda;

  PairState out;
  out.ss = init.ss * std::exp(-2.0 * lambda * t);
  out.si = init.si * std::exp(-(lambda + tau) * t) +
           2.0 * lambda * init.ss * decay_integral(gap, t, lambda + tau) * std::exp(-2.0 * lambda * t);
  out.ii = std::clamp(n - out.ss - out.si, 0.0, n);
  return out;
}

PairState solve_nongender(const NonGenderParams& params, const PairCounts& init, double t) {
  return solve_nongender(params, to_state(init), t);
}

GenderPairState solve_gender(const GenderParams& params, const GenderPairState& init, double t) {
  require_rate(params.lambda_m, "lambda_m");
  require_rate(params.lambda_f, "lambda_f");
  require_rate(params.tau_mf, "tau_mf");
  require_rate(params.tau_fm, "tau_fm");
  require_time(t);
  require_count(init.ss);
  require_count(init.is);
  require_count(init.si);
  require_count(init.ii);
  if (t == 0.0) return init;

  const auto& p = params;
  const double n = init.total();
  const double ss_decay = std::exp(-(p.lambda_m + p.lambda_f) * t);
  const double gap_m = p.tau_mf - p.lambda_m;
  const double gap_f = p.tau_fm - p.lambda_f;

  GenderPairState out;
  out.ss = init.ss * ss_decay;
  out.is = init.is * std::exp(-(p.tau_mf + p.lambda_f) * t) +
           p.lambda_m * init.ss * decay_integral(gap_m, t, p.tau_mf + p.lambda_m) * ss_decay;
  out.si = init.si * std::exp(-(p.tau_fm + p.lambda_m) * t) +
           p.lambda_f * init.ss * decay_integral(gap_f, t, p.tau_fm + p.lambda_f) * ss_decay;
  out.ii = std::clamp(n - out.ss - out.is - out.si, 0.0, n);
  return out;
}

GenderPairState solve_gender(const GenderParams& params, const GenderPairCounts& init, double t) {
  return solve_gender(params, to_state(init), t);
}

GenderParams reparam_to_rates(const GenderReparam& r) {
  return {2.0 * r.lambda * r.q, 2.0 * r.lambda * (1.0 - r.q), 2.0 * r.lambda * (r.q + r.theta_m),
          2.0 * r.lambda * (1.0 - r.q + r.theta_f)};
}

GenderReparam rates_to_reparam(const GenderParams& p) {
  const double total = p.lambda_m + p.lambda_f;
  if (!(total > 0.0)) {
    throw DomainError("reparameterisation undefined: lambda_m + lambda_f must be positive");
  }
  GenderReparam r;
  r.lambda = total / 2.0;
  r.q = p.lambda_m / total;
  r.theta_m = p.tau_mf / total - r.q;
  r.theta_f = p.tau_fm / total - (1.0 - r.q);
  return r;
}

}  // namespace pairinfer
