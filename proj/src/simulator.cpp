#include "pairinfer/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pairinfer/error.hpp"
#include "pairinfer/pair_model.hpp"

namespace pairinfer {

namespace {

constexpr double kProbabilitySlack = 1e-9;

void check_rates(const std::vector<double>& rates) {
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("rates must be finite and non-negative");
  }
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw DomainError("at least one snapshot time is required");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw DomainError("snapshot times must be finite");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("snapshot times must not decrease");
  }
}

void check_counts(std::initializer_list<std::int64_t> counts) {
  for (auto c : counts) {
    if (c < 0) throw DomainError("initial counts must be non-negative");
  }
}

// Index of the snapshot interval an event at `when` (relative) falls into:
// the event is visible in every snapshot at or after it.
void record(std::vector<std::int64_t>& delta, const std::vector<double>& offsets, double when) {
  const auto it = std::lower_bound(offsets.begin(), offsets.end(), when);
  if (it != offsets.end()) ++delta[static_cast<std::size_t>(it - offsets.begin())];
}

std::vector<double> offsets_of(const std::vector<double>& times) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = times[i] - times.front();
  return out;
}

std::vector<std::int64_t> cumulative(std::vector<std::int64_t> delta) {
  for (std::size_t i = 1; i < delta.size(); ++i) delta[i] += delta[i - 1];
  return delta;
}

std::size_t categorical(Xoshiro256& rng, const double* p, std::size_t n) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  return n - 1;
}

template <std::size_t N>
void check_distribution(const std::array<double, N>& p) {
  for (double v : p) {
    if (!(v >= -kProbabilitySlack && v <= 1.0 + kProbabilitySlack)) {
      throw Error("internal consistency: closed-form probability outside [0, 1]");
    }
  }
}

}  // namespace

double simulate_discordant_conversion(const NonGenderParams& params, Xoshiro256& rng) {
  check_rates({params.lambda, params.tau});
  return rng.exponential(params.lambda + params.tau);
}

std::vector<PairCounts> gillespie_simulate(const NonGenderParams& params, const PairCounts& init,
                                           const std::vector<double>& times, std::uint64_t seed) {
  check_rates({params.lambda, params.tau});
  check_times(times);
  check_counts({init.ss, init.si, init.ii});
  const auto offsets = offsets_of(times);
  Xoshiro256 rng(seed);

  // Counts move SS -> SI -> II only, so track cumulative leavers per state.
  std::vector<std::int64_t> left_ss(times.size(), 0);
  std::vector<std::int64_t> reached_ii(times.size(), 0);
  const double last = offsets.back();
  for (std::int64_t p = 0; p < init.ss; ++p) {
    const double first = rng.exponential(2.0 * params.lambda);
    if (first > last) continue;
    record(left_ss, offsets, first);
    const double second = first + rng.exponential(params.lambda + params.tau);
    record(reached_ii, offsets, second);
  }
  for (std::int64_t p = 0; p < init.si; ++p) {
    record(reached_ii, offsets, rng.exponential(params.lambda + params.tau));
  }

  const auto out_ss = cumulative(std::move(left_ss));
  const auto in_ii = cumulative(std::move(reached_ii));
  std::vector<PairCounts> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].ss = init.ss - out_ss[k];
    out[k].ii = init.ii + in_ii[k];
    out[k].si = init.total() - out[k].ss - out[k].ii;
  }
  return out;
}

std::vector<GenderPairCounts> gillespie_simulate(const GenderParams& params, const GenderPairCounts& init,
                                                 const std::vector<double>& times, std::uint64_t seed) {
  check_rates(params.to_vector());
  check_times(times);
  check_counts({init.ss, init.is, init.si, init.ii});
  const auto offsets = offsets_of(times);
  Xoshiro256 rng(seed);

  const double external = params.lambda_m + params.lambda_f;
  const double leave_is = params.tau_mf + params.lambda_f;  // male infected, female susceptible
  const double leave_si = params.lambda_m + params.tau_fm;
  const double last = offsets.back();

  std::vector<std::int64_t> left_ss(times.size(), 0);
  std::vector<std::int64_t> into_is(times.size(), 0);
  std::vector<std::int64_t> into_si(times.size(), 0);
  std::vector<std::int64_t> out_is(times.size(), 0);
  std::vector<std::int64_t> out_si(times.size(), 0);

  for (std::int64_t p = 0; p < init.ss; ++p) {
    const double first = rng.exponential(external);
    if (first > last) continue;
    record(left_ss, offsets, first);
    const bool male_first = rng.uniform() * external < params.lambda_m;
    if (male_first) {
      record(into_is, offsets, first);
      record(out_is, offsets, first + rng.exponential(leave_is));
    } else {
      record(into_si, offsets, first);
      record(out_si, offsets, first + rng.exponential(leave_si));
    }
  }
  for (std::int64_t p = 0; p < init.is; ++p) record(out_is, offsets, rng.exponential(leave_is));
  for (std::int64_t p = 0; p < init.si; ++p) record(out_si, offsets, rng.exponential(leave_si));

  const auto c_left = cumulative(std::move(left_ss));
  const auto c_into_is = cumulative(std::move(into_is));
  const auto c_into_si = cumulative(std::move(into_si));
  const auto c_out_is = cumulative(std::move(out_is));
  const auto c_out_si = cumulative(std::move(out_si));
  std::vector<GenderPairCounts> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].ss = init.ss - c_left[k];
    out[k].is = init.is + c_into_is[k] - c_out_is[k];
    out[k].si = init.si + c_into_si[k] - c_out_si[k];
    out[k].ii = init.ii + c_out_is[k] + c_out_si[k];
  }
  return out;
}

PairCounts exact_sample(const NonGenderParams& params, const PairCounts& init, double t, std::uint64_t seed) {
  check_counts({init.ss, init.si, init.ii});
  const PairState from_ss = solve_nongender(params, PairState{1.0, 0.0, 0.0}, t);
  const PairState from_si = solve_nongender(params, PairState{0.0, 1.0, 0.0}, t);
  const std::array<double, 3> p_ss{from_ss.ss, from_ss.si, from_ss.ii};
  const std::array<double, 3> p_si{0.0, from_si.si, from_si.ii};
  check_distribution(p_ss);
  check_distribution(p_si);

  Xoshiro256 rng(seed);
  std::array<std::int64_t, 3> tally{0, 0, init.ii};
  for (std::int64_t p = 0; p < init.ss; ++p) ++tally[categorical(rng, p_ss.data(), 3)];
  for (std::int64_t p = 0; p < init.si; ++p) ++tally[categorical(rng, p_si.data(), 3)];
  return {tally[0], tally[1], tally[2]};
}

GenderPairCounts exact_sample(const GenderParams& params, const GenderPairCounts& init, double t,
                              std::uint64_t seed) {
  check_counts({init.ss, init.is, init.si, init.ii});
  const auto row = [&](GenderPairState start) {
    const GenderPairState s = solve_gender(params, start, t);
    const std::array<double, 4> p{s.ss, s.is, s.si, s.ii};
    check_distribution(p);
    return p;
  };
  const auto p_ss = row({1.0, 0.0, 0.0, 0.0});
  const auto p_is = row({0.0, 1.0, 0.0, 0.0});
  const auto p_si = row({0.0, 0.0, 1.0, 0.0});

  Xoshiro256 rng(seed);
  std::array<std::int64_t, 4> tally{0, 0, 0, init.ii};
  for (std::int64_t p = 0; p < init.ss; ++p) ++tally[categorical(rng, p_ss.data(), 4)];
  for (std::int64_t p = 0; p < init.is; ++p) ++tally[categorical(rng, p_is.data(), 4)];
  for (std::int64_t p = 0; p < init.si; ++p) ++tally[categorical(rng, p_si.data(), 4)];
  return {tally[0], tally[1], tally[2], tally[3]};
}

void SimConfig::validate() const {
  if (params.size() != parameter_count(kind)) throw ConfigError("simulation parameters do not match the model");
  check_rates(params);
  if (replicates < 1) throw ConfigError("replicate count must be at least 1");
  if (times.size() < 2) throw ConfigError("at least two observation times required");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("observation times must be strictly increasing");
  }
}

std::vector<Dataset> simulate_datasets(const SimConfig& config) {
  config.validate();
  std::vector<Dataset> out;
  out.reserve(static_cast<std::size_t>(config.replicates));
  for (int r = 0; r < config.replicates; ++r) {
    const std::uint64_t seed = derive_seed(config.seed, {static_cast<std::uint64_t>(r)});
    if (config.kind == ModelKind::gender) {
      out.emplace_back(config.times, gillespie_simulate(gender_from_vector(config.params), config.init, config.times, seed),
                       "simulated");
    } else {
      out.emplace_back(config.times,
                       gillespie_simulate(nongender_from_vector(config.params), config.init.marginal(), config.times, seed),
                       "simulated");
    }
  }
  return out;
}

std::vector<std::vector<double>> ValidationConfig::truths() const {
  if (truth_axes.size() != parameter_count(kind)) throw ConfigError("one truth axis per parameter is required");
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : truth_axes) {
    if (axis.empty()) throw ConfigError("truth axes must not be empty");
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out) {
      for (double v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<ValidationRecord> validation_sweep(const ValidationConfig& config) {
  if (config.replicates < 1) throw ConfigError("replicate count must be at least 1");
  const auto truths = config.truths();
  std::vector<ValidationRecord> records;
  records.reserve(truths.size() * static_cast<std::size_t>(config.replicates));

  for (std::size_t cell = 0; cell < truths.size(); ++cell) {
    for (int rep = 0; rep < config.replicates; ++rep) {
      ValidationRecord rec;
      rec.cell = static_cast<int>(cell);
      rec.replicate = rep;
      rec.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(rep)});
      rec.truth = truths[cell];

      SimConfig sim;
      sim.kind = config.kind;
      sim.params = truths[cell];
      sim.init = config.init;
      sim.times = config.times;
      sim.validate();
      try {
        if (config.kind == ModelKind::gender) {
          const Dataset data(config.times, gillespie_simulate(gender_from_vector(sim.params), sim.init, sim.times, rec.seed));
          const FitResult fit = fit_gender(data, config.fit);
          rec.estimate = fit.estimates;
          rec.converged = fit.converged;
        } else {
          const Dataset data(config.times,
                             gillespie_simulate(nongender_from_vector(sim.params), sim.init.marginal(), sim.times, rec.seed));
          const FitResult fit = fit_nongender(data, config.fit);
          rec.estimate = fit.estimates;
          rec.converged = fit.converged;
        }
      } catch (const Error&) {
        // Kept with the flag down; zeros keep the record within the feasible box.
        rec.estimate.assign(parameter_count(config.kind), 0.0);
        rec.converged = false;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace pairinfer
