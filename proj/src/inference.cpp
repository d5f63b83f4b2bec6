#include "pairinfer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "pairinfer/analytic.hpp"
#include "pairinfer/error.hpp"
#include "pairinfer/likelihood.hpp"
#include "pairinfer/rng.hpp"
#include "pairinfer/stats.hpp"

namespace pairinfer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kUpperRate = 10.0;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

std::function<double(const std::vector<double>&)> negative_log_likelihood(ModelKind kind, const Dataset& data) {
  return [kind, &data](const std::vector<double>& x) {
    for (double v : x) {
      if (!(v >= 0.0) || !std::isfinite(v)) return std::numeric_limits<double>::infinity();
    }
    return -log_likelihood(kind, x, data);
  };
}

// Walks a one-dimensional ridge through `optimum` by fixing the coordinate
// `pivot` and re-maximising the others, and returns the point nearest
// `target` whose objective stays within kRidgeTolerance of `best`.
std::optional<std::vector<double>> nearest_ridge_point(const std::function<double(const std::vector<double>&)>& objective,
                                                       const std::vector<double>& optimum, double best,
                                                       const std::vector<double>& target, std::size_t pivot,
                                                       const Box& bounds, const SimplexOptions& simplex) {
  const std::size_t n = optimum.size();
  Box inner_box;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == pivot) continue;
    inner_box.lower.push_back(bounds.lower[i]);
    inner_box.upper.push_back(bounds.upper[i]);
  }
  const auto embed = [&](double c, const std::vector<double>& rest) {
    std::vector<double> x(n);
    for (std::size_t i = 0, k = 0; i < n; ++i) x[i] = i == pivot ? c : rest[k++];
    return x;
  };
  std::vector<double> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != pivot) rest.push_back(optimum[i]);
  }
  // Each inner fit starts from the optimum so the result depends on c alone.
  const std::vector<double> rest0 = rest;
  const auto profile = [&](double c) {
    const auto inner = [&](const std::vector<double>& r) { return objective(embed(c, r)); };
    const SimplexResult run = nelder_mead(inner, rest0, inner_box, simplex);
    return std::make_pair(embed(c, run.x), run.value);
  };
  const double penalty = 1e6;
  const auto score = [&](double c) {
    const auto [x, value] = profile(c);
    if (!std::isfinite(value)) return std::numeric_limits<double>::max();
    return squared_distance(x, target) + penalty * std::max(0.0, value - best - kRidgeTolerance);
  };

  const double span = 2.0 * std::max({std::abs(optimum[pivot]), std::abs(target[pivot]), 1e-3});
  const double lo = std::max(bounds.lower[pivot], optimum[pivot] - span);
  const double hi = std::min(bounds.upper[pivot], optimum[pivot] + span);
  boost::uintmax_t iterations = 200;
  const auto [c, _] = boost::math::tools::brent_find_minima(score, lo, hi, std::numeric_limits<double>::digits / 2, iterations);
  const auto [x, value] = profile(c);
  if (!(value <= best + kRidgeTolerance)) return std::nullopt;
  if (squared_distance(x, target) >= squared_distance(optimum, target)) return std::nullopt;
  return x;
}

}  // namespace

std::string_view to_string(WarmStartSource source) {
  switch (source) {
    case WarmStartSource::cfa: return "CFA";
    case WarmStartSource::analytical: return "analytical";
    case WarmStartSource::symmetric_split: return "symmetric-split";
    case WarmStartSource::user: return "user";
    case WarmStartSource::fallback: return "fallback";
  }
  return "user";
}

CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian, double rank_tolerance) {
  if (hessian.rows() != hessian.cols() || hessian.rows() == 0) throw DomainError("Hessian must be square");
  const auto n = hessian.rows();
  const Eigen::MatrixXd symmetric = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);

  CovarianceResult out;
  out.eigenvalues = solver.eigenvalues();
  out.std_errors.assign(static_cast<std::size_t>(n), kNaN);
  const double largest = out.eigenvalues.cwiseAbs().maxCoeff();
  const double floor = rank_tolerance * largest;
  const double smallest = out.eigenvalues.minCoeff();

  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.eigenvalues[i] > floor) ++out.rank;
  }
  out.positive_definite = smallest > floor && smallest > 0.0;

  if (out.positive_definite) {
    out.condition_number = out.eigenvalues.maxCoeff() / smallest;
    out.ill_conditioned = out.condition_number > kConditionWarning;
    const Eigen::MatrixXd inverse = symmetric.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    out.covariance = 0.5 * (inverse + inverse.transpose());
    for (Eigen::Index i = 0; i < n; ++i) out.std_errors[static_cast<std::size_t>(i)] = std::sqrt((*out.covariance)(i, i));
    return out;
  }

  out.condition_number = std::numeric_limits<double>::infinity();
  // Clearly negative curvature: not a maximum, no covariance of any kind.
  if (smallest < -std::max(floor, 0.0) || out.rank == 0) return out;

  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.eigenvalues[i] > floor) inverted[i] = 1.0 / out.eigenvalues[i];
  }
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  out.pseudo_covariance = vectors * inverted.asDiagonal() * vectors.transpose();
  out.pseudo_std_errors.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.pseudo_std_errors[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, (*out.pseudo_covariance)(i, i)));
  }
  return out;
}

Eigen::MatrixXd hessian_fd(const std::function<double(const std::vector<double>&)>& objective,
                           const std::vector<double>& point) {
  const std::size_t n = point.size();
  std::vector<double> steps(n);
  for (std::size_t i = 0; i < n; ++i) steps[i] = std::max(1e-6, 1e-4 * std::abs(point[i]));

  for (int attempt = 0; attempt <= 3; ++attempt) {
    bool finite = true;
    const auto eval = [&](std::vector<double> x) {
      const double v = objective(x);
      if (!std::isfinite(v)) finite = false;
      return v;
    };
    Eigen::MatrixXd h(n, n);
    const double centre = eval(point);
    for (std::size_t i = 0; i < n && finite; ++i) {
      auto plus = point;
      auto minus = point;
      plus[i] += steps[i];
      minus[i] -= steps[i];
      h(i, i) = (eval(plus) - 2.0 * centre + eval(minus)) / (steps[i] * steps[i]);
      for (std::size_t j = 0; j < i && finite; ++j) {
        auto pp = point, pm = point, mp = point, mm = point;
        pp[i] += steps[i];
        pp[j] += steps[j];
        pm[i] += steps[i];
        pm[j] -= steps[j];
        mp[i] -= steps[i];
        mp[j] += steps[j];
        mm[i] -= steps[i];
        mm[j] -= steps[j];
        h(i, j) = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * steps[i] * steps[j]);
        h(j, i) = h(i, j);
      }
    }
    if (finite) return 0.5 * (h + h.transpose());
    for (auto& s : steps) s *= 0.5;
  }
  throw SingularStencilError("finite-difference stencil leaves the feasible region after three step reductions");
}

std::vector<std::optional<Interval>> wald_intervals(const std::vector<double>& estimates,
                                                    const std::vector<double>& std_errors, double level) {
  if (estimates.size() != std_errors.size()) throw DomainError("estimates and standard errors differ in length");
  const double z = stats::wald_z(level);
  std::vector<std::optional<Interval>> out(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (std::isnan(std_errors[i])) continue;
    Interval iv;
    iv.level = level;
    const double lo = estimates[i] - z * std_errors[i];
    iv.truncated = lo < 0.0;
    iv.lo = std::max(lo, 0.0);
    iv.hi = estimates[i] + z * std_errors[i];
    out[i] = iv;
  }
  return out;
}

const std::vector<double>& FitResult::std_errors() const {
  return uses_pseudo_inverse() ? covariance.pseudo_std_errors : covariance.std_errors;
}

Box default_bounds(ModelKind kind) {
  const std::size_t n = parameter_count(kind);
  return {std::vector<double>(n, 0.0), std::vector<double>(n, kUpperRate)};
}

FitResult fit_mle(ModelKind kind, const Dataset& data, const WarmStart& warm_start, const Box& bounds,
                  const FitOptions& options) {
  const std::size_t n = parameter_count(kind);
  if (warm_start.point.size() != n) throw ConfigError("warm start has the wrong number of parameters");
  if (!bounds.contains(warm_start.point)) throw ConfigError("warm start lies outside the parameter bounds");
  if (kind == ModelKind::gender && !data.is_gendered()) throw ConfigError("gendered fit needs gendered data");
  if (options.starts < 1) throw ConfigError("at least one optimiser start is required");

  const auto objective = negative_log_likelihood(kind, data);
  Xoshiro256 rng(derive_seed(options.seed, {static_cast<std::uint64_t>(kind)}));

  FitResult best;
  best.kind = kind;
  best.warm_start = warm_start;
  double best_value = std::numeric_limits<double>::infinity();
  double best_distance = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (int s = 0; s < options.starts; ++s) {
    std::vector<double> start = warm_start.point;
    if (s > 0) {
      for (auto& v : start) v *= 1.0 + options.jitter * (2.0 * rng.uniform() - 1.0);
      start = bounds.project(std::move(start));
    }
    const SimplexResult run = nelder_mead(objective, start, bounds, options.simplex);
    best.evaluations += run.evaluations;
    if (!std::isfinite(run.value)) continue;

    const double distance = squared_distance(run.x, warm_start.point);
    const bool better = run.value < best_value - options.tie_tolerance;
    const bool tie = std::abs(run.value - best_value) <= options.tie_tolerance;
    if (!have_best || better || (tie && distance < best_distance)) {
      have_best = true;
      best_value = std::min(best_value, run.value);
      best_distance = distance;
      best.estimates = run.x;
      best.converged = run.converged;
      best.iterations = run.iterations;
    }
  }
  if (!have_best) throw InfeasibleDataError("log-likelihood is -inf from every optimiser start");

  const auto curvature = [&](FitResult& f) {
    try {
      f.hessian = hessian_fd(objective, f.estimates);
      f.covariance = covariance_from_hessian(*f.hessian, kHessianRankTolerance);
      f.hessian_error.clear();
    } catch (const SingularStencilError& e) {
      f.hessian.reset();
      f.hessian_error = e.what();
      f.covariance = CovarianceResult{};
      f.covariance.std_errors.assign(n, kNaN);
    }
  };
  curvature(best);
  if (best.covariance.pseudo_covariance && best.covariance.rank + 1 == static_cast<int>(n)) {
    // Eigenvalues come sorted ascending; the first eigenvector spans the ridge.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (*best.hessian + best.hessian->transpose()));
    Eigen::Index pivot = 0;
    solver.eigenvectors().col(0).cwiseAbs().maxCoeff(&pivot);
    if (auto moved = nearest_ridge_point(objective, best.estimates, best_value, warm_start.point,
                                         static_cast<std::size_t>(pivot), bounds, options.simplex)) {
      best.estimates = std::move(*moved);
      best.ridge_canonical = true;
      curvature(best);
    }
  }

  best.log_likelihood = log_likelihood(kind, best.estimates, data);
  best.at_bound.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = best.estimates[i];
    best.at_bound[i] = std::abs(x - bounds.lower[i]) <= 1e-9 * (1.0 + std::abs(bounds.lower[i])) ||
                       std::abs(x - bounds.upper[i]) <= 1e-9 * (1.0 + std::abs(bounds.upper[i]));
  }

  best.ridge = best.covariance.pseudo_covariance.has_value();

  for (double level : options.levels) {
    IntervalSet set;
    set.level = level;
    set.from_pseudo_inverse = best.uses_pseudo_inverse();
    set.per_parameter = best.uses_pseudo_inverse() ? wald_intervals(best.estimates, best.covariance.pseudo_std_errors, level)
                                                   : wald_intervals(best.estimates, best.covariance.std_errors, level);
    best.intervals.push_back(std::move(set));
  }
  return best;
}

WarmStart nongender_warm_start(const Dataset& data) {
  const PairCounts a = data.counts(0);
  const PairCounts b = data.counts(data.size() - 1);
  const TwoPointCounts c{static_cast<double>(a.ss), static_cast<double>(a.si), static_cast<double>(a.ii),
                         static_cast<double>(b.ss), static_cast<double>(b.si), static_cast<double>(b.ii),
                         data.elapsed(data.size() - 1)};
  try {
    const CfaEstimate e = cfa(c);
    return {{e.params.lambda, e.params.tau}, WarmStartSource::cfa};
  } catch (const DomainError&) {
    return {{0.01, 0.1}, WarmStartSource::fallback};
  }
}

WarmStart gender_warm_start(const FitResult& nongender_fit) {
  const double lambda = nongender_fit.estimates.at(0);
  const double tau = nongender_fit.estimates.at(1);
  return {{lambda, lambda, tau, tau}, WarmStartSource::symmetric_split};
}

FitResult fit_nongender(const Dataset& data, const FitOptions& options) {
  return fit_mle(ModelKind::nongender, data, nongender_warm_start(data), default_bounds(ModelKind::nongender),
                 options);
}

FitResult fit_gender(const Dataset& data, const FitOptions& options, const FitResult* nongender_fit) {
  if (nongender_fit != nullptr) {
    return fit_mle(ModelKind::gender, data, gender_warm_start(*nongender_fit), default_bounds(ModelKind::gender),
                   options);
  }
  const FitResult collapsed = fit_nongender(data.marginal(), options);
  return fit_mle(ModelKind::gender, data, gender_warm_start(collapsed), default_bounds(ModelKind::gender), options);
}

Ellipse ellipse_points(const EllipseSpec& spec) {
  if (!(spec.level > 0.0 && spec.level < 1.0)) throw DomainError("ellipse level must lie in (0, 1)");
  if (spec.n_points < 8) throw DomainError("ellipse needs at least 8 points");
  const Eigen::Matrix2d sym = 0.5 * (spec.covariance + spec.covariance.transpose());
  Eigen::LLT<Eigen::Matrix2d> llt(sym);
  if (llt.info() != Eigen::Success || !(sym.determinant() > 0.0)) {
    throw DomainError("ellipse covariance must be symmetric positive definite");
  }
  const Eigen::Matrix2d lower = llt.matrixL();

  Ellipse e;
  e.level = spec.level;
  e.radius_squared = stats::chi_square_quantile(spec.level, 2.0);
  const double radius = std::sqrt(e.radius_squared);
  for (int k = 0; k < spec.n_points; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / spec.n_points;
    const Eigen::Vector2d unit(std::cos(angle), std::sin(angle));
    const Eigen::Vector2d p = spec.mean + radius * (lower * unit);
    e.raw.push_back(p);
    e.points.emplace_back(std::max(p.x(), 0.0), std::max(p.y(), 0.0));
  }
  return e;
}

InfectionTable infections_per_year(const NonGenderParams& params, const PairCounts& init) {
  InfectionTable t;
  t.kind = ModelKind::nongender;
  const auto row = [](std::string route, std::string name, double rate, double at_risk) {
    return InfectionRow{std::move(route), std::move(name), rate, at_risk, rate * at_risk, rate * 1000.0};
  };
  t.rows.push_back(row("external", "lambda", params.lambda, 2.0 * init.ss + init.si));
  t.rows.push_back(row("internal", "tau", params.tau, static_cast<double>(init.si)));
  for (const auto& r : t.rows) {
    t.total_infections += r.infections_per_year;
    t.summed_per_thousand += r.per_thousand;
  }
  return t;
}

InfectionTable infections_per_year(const GenderParams& params, const GenderPairCounts& init) {
  InfectionTable t;
  t.kind = ModelKind::gender;
  const auto row = [](std::string route, std::string name, double rate, double at_risk) {
    return InfectionRow{std::move(route), std::move(name), rate, at_risk, rate * at_risk, rate * 1000.0};
  };
  // Susceptible men sit in SS and S_mI_f pairs, susceptible women in SS and I_mS_f.
  t.rows.push_back(row("external", "lambda_m", params.lambda_m, static_cast<double>(init.ss + init.si)));
  t.rows.push_back(row("external", "lambda_f", params.lambda_f, static_cast<double>(init.ss + init.is)));
  t.rows.push_back(row("internal", "tau_mf", params.tau_mf, static_cast<double>(init.is)));
  t.rows.push_back(row("internal", "tau_fm", params.tau_fm, static_cast<double>(init.si)));
  for (const auto& r : t.rows) {
    t.total_infections += r.infections_per_year;
    t.summed_per_thousand += r.per_thousand;
  }
  return t;
}

}  // namespace pairinfer
