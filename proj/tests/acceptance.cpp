// Acceptance checks 1-11. One line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "oracle.hpp"
#include "pairinfer/analytic.hpp"
#include "pairinfer/dataset.hpp"
#include "pairinfer/inference.hpp"
#include "pairinfer/io.hpp"
#include "pairinfer/likelihood.hpp"
#include "pairinfer/pair_model.hpp"
#include "pairinfer/pipeline.hpp"
#include "pairinfer/report.hpp"
#include "pairinfer/rng.hpp"
#include "pairinfer/simulator.hpp"
#include "pairinfer/stats.hpp"

#ifndef PAIRINFER_DATA_DIR
#error "PAIRINFER_DATA_DIR must point at the bundled data"
#endif

using namespace pairinfer;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::string g6(double v) { return fmt6(v); }

Outcome c1() {
  const Dataset d = mwanza_dataset();
  lambda_hat_closed_form(d);  // warm caches
  const auto t0 = Clock::now();
  const double l = lambda_hat_closed_form(d).value;
  const double ms = seconds_since(t0) * 1e3;
  const double want = 0.25 * std::log(1742.0 / 1721.0);
  Outcome o;
  o.pass = within(l, 0.0030328, 1e-6) && within(l, want, 1e-15) && ms < 1.0;
  o.detail = "lambda_hat " + g6(l) + " (target 0.0030328 +- 1e-6), " + g6(ms) + " ms (< 1 ms)";
  return o;
}

Outcome c2(FitResult& fit) {
  const auto t0 = Clock::now();
  fit = fit_nongender(mwanza_dataset());
  const double s = seconds_since(t0);
  Outcome o;
  o.pass = fit.converged && within(fit.estimates[0], 0.003, 0.0005) && within(fit.estimates[1], 0.056, 0.005) && s < 1.0;
  o.detail = "(lambda, tau) = (" + g6(fit.estimates[0]) + ", " + g6(fit.estimates[1]) +
             ") vs (0.003 +- 0.0005, 0.056 +- 0.005), " + g6(s) + " s (< 1 s)";
  return o;
}

Outcome c3(const FitResult& fit) {
  Outcome o;
  const auto& se = fit.std_errors();
  o.pass = fit.covariance.positive_definite && within(se[0], 0.001, 0.0005) && within(se[1], 0.046, 0.01);
  o.detail = "sigma = (" + g6(se[0]) + ", " + g6(se[1]) + ") vs (0.001 +- 0.0005, 0.046 +- 0.01)";
  return o;
}

Outcome c4(const FitResult& ng) {
  const FitResult fit = fit_gender(mwanza_gender_dataset(), {}, &ng);
  const double want[4] = {0.004, 0.002, 0.047, 0.068};
  const double tol[4] = {0.001, 0.001, 0.01, 0.015};
  const double lo[4] = {0.0006, 0.0, 0.0, 0.0};
  const double hi[4] = {0.0073, 0.0051, 0.1819, 0.2271};
  Outcome o;
  std::ostringstream os;
  const auto& names = parameter_names(ModelKind::gender);
  os << "point (";
  for (int i = 0; i < 4; ++i) {
    const bool ok = within(fit.estimates[i], want[i], tol[i]);
    o.pass = o.pass && ok;
    os << (i ? ", " : "") << g6(fit.estimates[i]) << (ok ? "" : "!");
  }
  os << ")";
  const IntervalSet* set = nullptr;
  for (const auto& s : fit.intervals) {
    if (std::abs(s.level - 0.95) < 1e-12) set = &s;
  }
  if (set == nullptr) {
    o.pass = false;
    os << "; no 95% intervals";
  } else {
    os << "; 95%" << (set->from_pseudo_inverse ? " (pseudo-inverse, rank-deficient Hessian)" : "");
    for (int i = 0; i < 4; ++i) {
      const auto& iv = set->per_parameter[static_cast<std::size_t>(i)];
      if (!iv) {
        o.pass = false;
        os << " " << names[static_cast<std::size_t>(i)] << " absent";
        continue;
      }
      const double slack = 0.15 * 0.5 * (hi[i] - lo[i]);
      const bool lo_ok = lo[i] == 0.0 ? iv->lo == 0.0 : within(iv->lo, lo[i], slack);
      const bool hi_ok = within(iv->hi, hi[i], slack);
      o.pass = o.pass && lo_ok && hi_ok;
      os << " " << names[static_cast<std::size_t>(i)] << " (" << g6(iv->lo) << (lo_ok ? "" : "!") << ", "
         << g6(iv->hi) << (hi_ok ? "" : "!") << ") vs (" << g6(lo[i]) << ", " << g6(hi[i]) << ")";
    }
  }
  o.detail = os.str();
  return o;
}

Outcome c5(const FitResult& ng) {
  const InfectionTable t = infections_per_year(nongender_from_vector(ng.estimates), PairCounts{1742, 43, 17});
  const double ext = t.rows[0].infections_per_year, in = t.rows[1].infections_per_year;
  // The published gendered table is computed from the published gendered rates.
  const InfectionTable g = infections_per_year(GenderParams{0.004, 0.002, 0.047, 0.068}, GenderPairCounts{1742, 22, 21, 17});
  const double want[4] = {7.05, 3.52, 1.03, 1.45};
  Outcome o;
  o.pass = within(ext, 10.6, 0.3) && within(in, 2.4, 0.1);
  std::ostringstream os;
  os << "non-gendered external " << g6(ext) << " (10.6 +- 0.3), internal " << g6(in) << " (2.4 +- 0.1); gendered at (0.004, 0.002, 0.047, 0.068): (";
  for (int i = 0; i < 4; ++i) {
    const bool ok = within(g.rows[static_cast<std::size_t>(i)].infections_per_year, want[i], 0.1);
    o.pass = o.pass && ok;
    os << (i ? ", " : "") << g6(g.rows[static_cast<std::size_t>(i)].infections_per_year) << (ok ? "" : "!");
  }
  os << ") vs (7.05, 3.52, 1.03, 1.45) +- 0.1";
  // Shown for reference; the fitted split sits elsewhere on a flat ridge.
  const FitResult gf = fit_gender(mwanza_gender_dataset(), {}, &ng);
  const InfectionTable at_fit = infections_per_year(gender_from_vector(gf.estimates), GenderPairCounts{1742, 22, 21, 17});
  os << "; at the fitted gendered rates (";
  for (std::size_t i = 0; i < 4; ++i) os << (i ? ", " : "") << g6(at_fit.rows[i].infections_per_year);
  os << ")";
  o.detail = os.str();
  return o;
}

Outcome c6() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> rate(0.0, 0.5), time(0.0, 10.0);
  std::uniform_int_distribution<int> count(0, 3000);
  double worst_ng = 0.0, worst_g = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double l = rate(gen), t = rate(gen);
    if (k % 4 == 0) t = l;                      // on the singular manifold
    if (k % 4 == 1) t = l * (1.0 + 1e-9 * rate(gen));  // next to it
    const std::array<double, 3> init{double(count(gen)), double(count(gen)), double(count(gen))};
    const double when = time(gen);
    const PairState s = solve_nongender({l, t}, PairState{init[0], init[1], init[2]}, when);
    const auto ref = oracle::nongender({l, t}, init, when);
    worst_ng = std::max({worst_ng, std::abs(s.ss - ref[0]), std::abs(s.si - ref[1]), std::abs(s.ii - ref[2])});
  }
  for (int k = 0; k < 1000; ++k) {
    GenderParams p{rate(gen), rate(gen), rate(gen), rate(gen)};
    if (k % 4 == 0) p.tau_mf = p.lambda_m;
    if (k % 4 == 1) p.tau_fm = p.lambda_f;
    if (k % 4 == 2) {
      p.tau_mf = p.lambda_m * (1.0 + 1e-10);
      p.tau_fm = p.lambda_f;
    }
    const std::array<double, 4> init{double(count(gen)), double(count(gen)), double(count(gen)), double(count(gen))};
    const double when = time(gen);
    const GenderPairState s = solve_gender(p, GenderPairState{init[0], init[1], init[2], init[3]}, when);
    const auto ref = oracle::gender(p, init, when);
    worst_g = std::max({worst_g, std::abs(s.ss - ref[0]), std::abs(s.is - ref[1]), std::abs(s.si - ref[2]),
                        std::abs(s.ii - ref[3])});
  }
  const double s = seconds_since(t0);
  Outcome o;
  o.pass = worst_ng < 1e-8 && worst_g < 1e-8 && s < 10.0;
  o.detail = "max |closed form - ODE| nongender " + g6(worst_ng) + ", gender " + g6(worst_g) + " (< 1e-8) over 1000 draws each, " +
             g6(s) + " s (< 10 s)";
  return o;
}

Outcome c7() {
  const Surface s = likelihood_surface(ModelKind::nongender, mwanza_dataset(),
                                       GridSpec{{{"lambda", 0.0005, 0.01, 101}, {"tau", 0.001, 0.3, 101}}});
  const auto m = interior_local_maxima(s);
  Outcome o;
  o.pass = m.size() == 1;
  o.detail = std::to_string(m.size()) + " interior local maxima on 101 x 101";
  if (!m.empty()) o.detail += ", at (" + g6(s.x_values[m[0].first]) + ", " + g6(s.y_values[m[0].second]) + ")";
  return o;
}

Outcome c8() {
  const int reps = 5000;
  const NonGenderParams p{0.003033, 0.0561};
  const PairCounts init{1742, 43, 17};
  std::vector<std::int64_t> a[3], b[3];
  double mean_a[3] = {0, 0, 0}, mean_b[3] = {0, 0, 0};
  for (int r = 0; r < reps; ++r) {
    const PairCounts x = exact_sample(p, init, 2.0, derive_seed(8001, {std::uint64_t(r)}));
    const PairCounts y = gillespie_simulate(p, init, {0.0, 2.0}, derive_seed(8002, {std::uint64_t(r)}))[1];
    const std::int64_t xs[3] = {x.ss, x.si, x.ii}, ys[3] = {y.ss, y.si, y.ii};
    for (int k = 0; k < 3; ++k) {
      a[k].push_back(xs[k]);
      b[k].push_back(ys[k]);
      mean_a[k] += double(xs[k]) / reps;
      mean_b[k] += double(ys[k]) / reps;
    }
  }
  const PairState e = solve_nongender(p, init, 2.0);
  const double want[3] = {e.ss, e.si, e.ii};
  const char* names[3] = {"SS", "SI", "II"};
  Outcome o;
  std::ostringstream os;
  double min_p = 1.0, worst_z = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double pk = want[k] / 1802.0;
    const double se = std::sqrt(1802.0 * pk * (1.0 - pk) / reps);
    const double z = std::max(std::abs(mean_a[k] - want[k]), std::abs(mean_b[k] - want[k])) / se;
    const double pv = stats::chi_square_two_sample(a[k], b[k]).p_value;
    o.pass = o.pass && pv > 0.001 && z < 3.0;
    min_p = std::min(min_p, pv);
    worst_z = std::max(worst_z, z);
    os << (k ? ", " : "") << names[k] << " p=" << g6(pv);
  }
  o.detail = "chi-square two-sample " + os.str() + " (min " + g6(min_p) + " > 0.001); worst mean deviation " + g6(worst_z) +
             " SE (< 3)";
  return o;
}

Outcome c9() {
  const RunConfig manifest = parse_manifest(fs::path(PAIRINFER_DATA_DIR) / "manifest.json");
  ValidationConfig v = *manifest.validation;
  const Dataset d = load_input(manifest);
  const PairCounts c = d.counts(0);
  v.init = {c.ss, c.si, 0, c.ii};
  v.fit = manifest.fit;
  const auto t0 = Clock::now();
  const auto records = validation_sweep(v);
  const double s = seconds_since(t0);
  const auto truths = v.truths();
  Outcome o;
  int unconverged = 0;
  double worst_l = 0.0, worst_t = 0.0;
  for (std::size_t cell = 0; cell < truths.size(); ++cell) {
    std::vector<double> lam, tau;
    for (const auto& r : records) {
      if (r.cell != int(cell)) continue;
      if (!r.converged) ++unconverged;
      lam.push_back(r.estimate[0]);
      tau.push_back(r.estimate[1]);
    }
    const auto med = [](std::vector<double> x) {
      std::sort(x.begin(), x.end());
      return 0.5 * (x[(x.size() - 1) / 2] + x[x.size() / 2]);
    };
    worst_l = std::max(worst_l, std::abs(med(lam) - truths[cell][0]) / truths[cell][0]);
    worst_t = std::max(worst_t, std::abs(med(tau) - truths[cell][1]) / truths[cell][1]);
  }
  // Non-converged fits carry converged = false in the records, so none are unflagged.
  o.pass = records.size() == truths.size() * std::size_t(v.replicates) && worst_l <= 0.25 && worst_t <= 0.75 && s < 120.0;
  o.detail = std::to_string(truths.size()) + " cells x " + std::to_string(v.replicates) + " reps; worst median relative error lambda " +
             g6(worst_l) + " (<= 0.25), tau " + g6(worst_t) + " (<= 0.75); " + std::to_string(unconverged) +
             " flagged non-converged; " + g6(s) + " s (< 120 s)";
  return o;
}

Outcome c10() {
  const fs::path base = fs::temp_directory_path() / "pairinfer_acceptance_c10";
  fs::remove_all(base);
  std::vector<std::string> files[2];
  for (int k = 0; k < 2; ++k) {
    RunConfig cfg = parse_manifest(fs::path(PAIRINFER_DATA_DIR) / "manifest.json");
    cfg.output_dir = base / std::to_string(k);
    files[k] = emit_report(run_pipeline(cfg), cfg.output_dir);
  }
  Outcome o;
  o.pass = files[0] == files[1] && !files[0].empty();
  std::size_t same = 0;
  for (const auto& f : files[0]) {
    if (read_text_file(base / "0" / f) == read_text_file(base / "1" / f)) ++same;
  }
  o.pass = o.pass && same == files[0].size();
  o.detail = std::to_string(same) + "/" + std::to_string(files[0].size()) + " files byte-identical across two manifest runs";
  fs::remove_all(base);
  return o;
}

Outcome c11() {
  const fs::path out = fs::temp_directory_path() / "pairinfer_acceptance_c11";
  fs::remove_all(out);
  RunConfig cfg;
  cfg.output_dir = out;
  cfg.default_surfaces = false;
  cfg.profiles = false;
  emit_report(run_pipeline(cfg), out);
  const auto summary = nlohmann::ordered_json::parse(read_text_file(out / "summary.json"));
  const std::string report = read_text_file(out / "report.txt");
  fs::remove_all(out);
  Outcome o;
  std::ostringstream os;
  const struct {
    const char* id;
    double published;
    double computed;
    double tol;
  } expected[] = {{"phi_expansion", 16.95, -7.745, 0.005}, {"tau_convention", 0.054, 0.1058, 0.0005},
                  {"internal_infections", 2.48, 2.41, 0.01}};
  for (const auto& e : expected) {
    bool found = false;
    for (const auto& d : summary["discrepancies"]) {
      if (d["id"] != e.id || d["published"].is_null() || d["computed"].is_null()) continue;
      const double pub = d["published"].get<double>(), com = d["computed"].get<double>();
      const std::string line = "[" + std::string(e.id) + "]";
      const auto at = report.find(line);
      const bool shown = at != std::string::npos && report.find(fmt6(pub), at) != std::string::npos &&
                         report.find(fmt6(com), at) != std::string::npos;
      found = pub == e.published && within(com, e.computed, e.tol) && shown;
      os << (os.tellp() > 0 ? "; " : "") << e.id << " published " << fmt6(pub) << " computed " << fmt6(com);
    }
    if (!found) os << (os.tellp() > 0 ? "; " : "") << e.id << " missing";
    o.pass = o.pass && found;
  }
  o.detail = os.str();
  return o;
}

}  // namespace

int main() {
  bool all = true;
  const auto report = [&](int id, const std::function<Outcome()>& check) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = seconds_since(t0);
    all = all && o.pass;
    std::printf("[%s] C%d %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), s);
    std::fflush(stdout);
  };
  FitResult ng;
  report(1, c1);
  report(2, [&] { return c2(ng); });
  report(3, [&] { return c3(ng); });
  report(4, [&] { return c4(ng); });
  report(5, [&] { return c5(ng); });
  report(6, c6);
  report(7, c7);
  report(8, c8);
  report(9, c9);
  report(10, c10);
  report(11, c11);
  return all ? 0 : 1;
}
