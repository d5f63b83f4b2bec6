#pragma once

#include <cstdint>
#include <vector>

#include "pairinfer/dataset.hpp"
#include "pairinfer/inference.hpp"
#include "pairinfer/rng.hpp"
#include "pairinfer/types.hpp"

namespace pairinfer {

/// One pair started in SI: time until the susceptible partner is infected,
/// competing hazards tau and lambda.
double simulate_discordant_conversion(const NonGenderParams& params, Xoshiro256& rng);

/// Literal per-pair chains with exponential waiting times, snapshotted at
/// each of `times`. `init` holds at times.front(); times must not decrease. One generator stream
/// is consumed pair by pair in state order.
std::vector<PairCounts> gillespie_simulate(const NonGenderParams& params, const PairCounts& init,
                                           const std::vector<double>& times, std::uint64_t seed);
std::vector<GenderPairCounts> gillespie_simulate(const GenderParams& params, const GenderPairCounts& init,
                                                 const std::vector<double>& times, std::uint64_t seed);

/// Each initial class is drawn from the categorical distribution given by the
/// closed form with a one-hot start.
PairCounts exact_sample(const NonGenderParams& params, const PairCounts& init, double t, std::uint64_t seed);
GenderPairCounts exact_sample(const GenderParams& params, const GenderPairCounts& init, double t,
                              std::uint64_t seed);

struct SimConfig {
  ModelKind kind = ModelKind::nongender;
  std::vector<double> params;
  GenderPairCounts init{1742, 22, 21, 17};  // collapsed for the non-gendered model
  std::vector<double> times{0.0, 2.0};
  int replicates = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Replicate r uses derive_seed(seed, {r}).
std::vector<Dataset> simulate_datasets(const SimConfig& config);

struct ValidationConfig {
  ModelKind kind = ModelKind::nongender;
  /// Every combination of these values is a cell, first axis outermost.
  std::vector<std::vector<double>> truth_axes;
  GenderPairCounts init{1742, 22, 21, 17};
  std::vector<double> times{0.0, 2.0};
  int replicates = 50;
  std::uint64_t seed = 1;
  FitOptions fit;

  std::vector<std::vector<double>> truths() const;
};

struct ValidationRecord {
  int cell = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::vector<double> truth;
  std::vector<double> estimate;
  bool converged = false;
};

/// Seed for (cell, replicate) is derive_seed(config.seed, {cell, replicate}).
/// Records are in (cell, replicate) order.
std::vector<ValidationRecord> validation_sweep(const ValidationConfig& config);

}  // namespace pairinfer
