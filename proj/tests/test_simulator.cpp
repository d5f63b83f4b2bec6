#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pairinfer/error.hpp"
#include "pairinfer/pair_model.hpp"
#include "pairinfer/rng.hpp"
#include "pairinfer/simulator.hpp"
#include "pairinfer/stats.hpp"

using namespace pairinfer;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("zero rates keep every snapshot at the start") {
  const auto out = gillespie_simulate(NonGenderParams{0.0, 0.0}, PairCounts{1742, 43, 17}, {0.0, 1.0, 5.0}, 9);
  for (const auto& c : out) CHECK(c == PairCounts{1742, 43, 17});
  const auto g = gillespie_simulate(GenderParams{0, 0, 0, 0}, GenderPairCounts{10, 2, 3, 4}, {0.0, 2.0}, 9);
  for (const auto& c : g) CHECK(c == GenderPairCounts{10, 2, 3, 4});
}

TEST_CASE("discordant conversion time is exponential with mean 1/tau") {
  Xoshiro256 rng(42);
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = simulate_discordant_conversion(NonGenderParams{0.0, 0.5}, rng);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 2.0) < 3.0 * se);
}

TEST_CASE("Gillespie means match the closed form at the Mwanza estimates") {
  const NonGenderParams p{0.003033, 0.0561};
  const PairCounts init{1742, 43, 17};
  const PairState expected = solve_nongender(p, init, 2.0);
  const int reps = 10000;
  double s[3] = {0, 0, 0};
  for (int r = 0; r < reps; ++r) {
    const auto out = gillespie_simulate(p, init, {0.0, 2.0}, derive_seed(77, {std::uint64_t(r)}));
    CHECK(out[1].total() == init.total());
    s[0] += double(out[1].ss);
    s[1] += double(out[1].si);
    s[2] += double(out[1].ii);
  }
  const double want[3] = {expected.ss, expected.si, expected.ii};
  const double n = double(init.total());
  for (int k = 0; k < 3; ++k) {
    // Binomial variance at the pooled proportion bounds the variance of a
    // sum of per-class categoricals.
    const double pk = want[k] / n;
    const double se = std::sqrt(n * pk * (1.0 - pk) / reps);
    CHECK(std::abs(s[k] / reps - want[k]) < 3.0 * se);
  }
}

TEST_CASE("exact sampler edge cases") {
  CHECK(exact_sample(NonGenderParams{0.1, 0.5}, PairCounts{100, 20, 3}, 0.0, 1) == PairCounts{100, 20, 3});
  CHECK(exact_sample(NonGenderParams{0.1, 0.5}, PairCounts{0, 0, 50}, 7.0, 1) == PairCounts{0, 0, 50});
  CHECK(exact_sample(GenderParams{0.1, 0.2, 0.3, 0.4}, GenderPairCounts{0, 0, 0, 12}, 3.0, 1) ==
        GenderPairCounts{0, 0, 0, 12});
  const auto g = gillespie_simulate(GenderParams{0.1, 0.2, 0.3, 0.4}, GenderPairCounts{0, 0, 0, 12}, {0.0, 3.0}, 1);
  CHECK(g[1] == GenderPairCounts{0, 0, 0, 12});
}

TEST_CASE("exact sampler and Gillespie agree in distribution") {
  const int reps = 5000;
  const PairCounts init{1742, 43, 17};
  const NonGenderParams p{0.003033, 0.0561};
  std::vector<std::int64_t> a[3], b[3];
  double means[3] = {0, 0, 0};
  for (int r = 0; r < reps; ++r) {
    const PairCounts x = exact_sample(p, init, 2.0, derive_seed(101, {std::uint64_t(r)}));
    const PairCounts y = gillespie_simulate(p, init, {0.0, 2.0}, derive_seed(202, {std::uint64_t(r)}))[1];
    a[0].push_back(x.ss);
    a[1].push_back(x.si);
    a[2].push_back(x.ii);
    b[0].push_back(y.ss);
    b[1].push_back(y.si);
    b[2].push_back(y.ii);
    means[0] += double(x.ss) / reps;
    means[1] += double(x.si) / reps;
    means[2] += double(x.ii) / reps;
  }
  for (int k = 0; k < 3; ++k) {
    const auto test = stats::chi_square_two_sample(a[k], b[k]);
    CHECK(test.p_value > 0.001);
  }
  const PairState e = solve_nongender(p, init, 2.0);
  const double want[3] = {e.ss, e.si, e.ii};
  for (int k = 0; k < 3; ++k) {
    const double pk = want[k] / 1802.0;
    CHECK(std::abs(means[k] - want[k]) < 3.0 * std::sqrt(1802.0 * pk * (1.0 - pk) / reps));
  }
}

TEST_CASE("gendered exact sampler against Gillespie") {
  const int reps = 5000;
  const GenderPairCounts init{1742, 22, 21, 17};
  const GenderParams p{0.004, 0.002, 0.047, 0.068};
  std::vector<std::int64_t> a[4], b[4];
  for (int r = 0; r < reps; ++r) {
    const GenderPairCounts x = exact_sample(p, init, 2.0, derive_seed(303, {std::uint64_t(r)}));
    const GenderPairCounts y = gillespie_simulate(p, init, {0.0, 2.0}, derive_seed(404, {std::uint64_t(r)}))[1];
    const std::int64_t xs[4] = {x.ss, x.is, x.si, x.ii}, ys[4] = {y.ss, y.is, y.si, y.ii};
    for (int k = 0; k < 4; ++k) {
      a[k].push_back(xs[k]);
      b[k].push_back(ys[k]);
    }
    CHECK(y.total() == init.total());
  }
  for (int k = 0; k < 4; ++k) CHECK(stats::chi_square_two_sample(a[k], b[k]).p_value > 0.001);
}

TEST_CASE("determinism and conservation") {
  const NonGenderParams p{0.01, 0.2};
  const PairCounts init{500, 40, 10};
  const std::vector<double> times{0.0, 0.5, 1.0, 4.0};
  const auto a = gillespie_simulate(p, init, times, 12345);
  const auto b = gillespie_simulate(p, init, times, 12345);
  CHECK(a == b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].total() == init.total());
    if (i > 0) {
      CHECK(a[i].ss <= a[i - 1].ss);
      CHECK(a[i].ii >= a[i - 1].ii);
    }
  }
  CHECK(a.front() == init);
  CHECK(exact_sample(p, init, 2.0, 5) == exact_sample(p, init, 2.0, 5));
}

TEST_CASE("configuration checks") {
  SimConfig c;
  c.params = {0.003, 0.05};
  c.times = {0.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.times = {0.0, 2.0, 2.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.times = {0.0, 2.0};
  c.replicates = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.replicates = 3;
  const auto sets = simulate_datasets(c);
  REQUIRE(sets.size() == 3);
  CHECK(sets[0].total_pairs() == 1802);
  CHECK(sets[0].counts(0) == PairCounts{1742, 43, 17});
  CHECK_THROWS_AS(gillespie_simulate(NonGenderParams{-1.0, 0.0}, PairCounts{1, 0, 0}, {0.0, 1.0}, 1), DomainError);
}

TEST_CASE("single-replicate sweep is reproducible and tau = lambda is harmless") {
  ValidationConfig v;
  v.truth_axes = {{0.004}, {0.004}};
  v.replicates = 1;
  v.seed = 99;
  const auto a = validation_sweep(v);
  const auto b = validation_sweep(v);
  REQUIRE(a.size() == 1);
  CHECK(a[0].estimate == b[0].estimate);
  CHECK(a[0].seed == b[0].seed);
  for (double x : a[0].estimate) {
    CHECK(std::isfinite(x));
    CHECK(x >= 0.0);
  }
}

TEST_CASE("recovery sweep medians and lambda bias") {
  ValidationConfig v;
  v.truth_axes = {{0.002, 0.005, 0.01}, {0.02, 0.05, 0.1}};
  v.replicates = 50;
  v.seed = 1802;
  const auto records = validation_sweep(v);
  REQUIRE(records.size() == 450);
  int positives = 0;
  for (int cell = 0; cell < 9; ++cell) {
    std::vector<double> lam, tau;
    std::vector<double> truth;
    for (const auto& r : records) {
      if (r.cell != cell) continue;
      CHECK(r.converged);
      truth = r.truth;
      lam.push_back(r.estimate[0]);
      tau.push_back(r.estimate[1]);
    }
    const double ml = median(lam), mt = median(tau);
    CHECK(std::abs(ml - truth[0]) <= 0.25 * truth[0]);
    CHECK(std::abs(mt - truth[1]) <= 0.75 * truth[1]);
    if (ml > truth[0]) ++positives;
  }
  CHECK(stats::sign_test_p_value(positives, 9) > 0.01);
}

}  // TEST_SUITE
