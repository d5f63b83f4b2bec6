#pragma once

#include "pairinfer/types.hpp"

namespace pairinfer {

/// Below this gap (scaled by max(1, |a| + |b|)) between a pair's internal
/// transmission rate and the external rate it competes with, the closed forms
/// switch to their series expansion about the singular point.
inline constexpr double kSingularThreshold = 1e-8;

/// (1 - exp(-x t)) / x, continuous through x = 0.
double decay_integral(double x, double t, double scale = 1.0);

/// Closed-form solution of the SS/SI/II pair system started from `init` at t = 0.
/// Throws DomainError for negative or non-finite rates or time.
PairState solve_nongender(const NonGenderParams& params, const PairState& init, double t);
PairState solve_nongender(const NonGenderParams& params, const PairCounts& init, double t);

/// Closed-form solution of the four-state gendered system.
GenderPairState solve_gender(const GenderParams& params, const GenderPairState& init, double t);
GenderPairState solve_gender(const GenderParams& params, const GenderPairCounts& init, double t);

GenderParams reparam_to_rates(const GenderReparam& r);
/// Throws DomainError when lambda_m + lambda_f == 0.
GenderReparam rates_to_reparam(const GenderParams& p);

PairState to_state(const PairCounts& c);
GenderPairState to_state(const GenderPairCounts& c);

}  // namespace pairinfer
