#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairinfer/dataset.hpp"
#include "pairinfer/optimize.hpp"
#include "pairinfer/types.hpp"

namespace pairinfer {

/// Eigenvalues below this fraction of the largest are treated as zero when
/// the Hessian comes from finite differences (round-off floor of the stencil).
inline constexpr double kHessianRankTolerance = 1e-7;
inline constexpr double kConditionWarning = 1e10;
inline constexpr double kRidgeTolerance = 1e-8;

enum class WarmStartSource { cfa, analytical, symmetric_split, user, fallback };
std::string_view to_string(WarmStartSource source);

struct WarmStart {
  std::vector<double> point;
  WarmStartSource source = WarmStartSource::user;
};

struct FitOptions {
  SimplexOptions simplex;
  int starts = 3;              // the warm start itself plus starts - 1 jittered copies
  double jitter = 0.10;        // relative, uniform in [-jitter, +jitter]
  std::uint64_t seed = 20021;  // jitter stream
  std::vector<double> levels{0.67, 0.95};
  /// Restarts whose optimum lies within this of the best are treated as ties
  /// and resolved toward the warm start.
  double tie_tolerance = 1e-9;
};

/// Interval with lower end truncated at zero.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  bool truncated = false;
};

struct CovarianceResult {
  bool positive_definite = false;
  bool ill_conditioned = false;  // condition number above kConditionWarning
  double condition_number = 0.0;
  int rank = 0;
  Eigen::VectorXd eigenvalues;
  std::optional<Eigen::MatrixXd> covariance;  // H^{-1}, only when positive definite
  std::vector<double> std_errors;             // NaN when absent
  /// Moore-Penrose inverse over the numerically non-zero eigenvalues, present
  /// when H is positive semidefinite but rank-deficient.
  std::optional<Eigen::MatrixXd> pseudo_covariance;
  std::vector<double> pseudo_std_errors;
};

/// Inverts the Hessian of the negative log-likelihood. Eigenvalues at or below
/// rank_tolerance * max eigenvalue make the matrix singular.
CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian, double rank_tolerance = 0.0);

/// Central differences, h_i = max(1e-6, 1e-4 |x_i|), off-diagonals from the
/// four-point cross stencil, symmetrised. Steps are halved up to three times
/// when a stencil point is not finite; SingularStencilError after that.
Eigen::MatrixXd hessian_fd(const std::function<double(const std::vector<double>&)>& objective,
                           const std::vector<double>& point);

/// estimate +/- z(level) sigma, lower end clamped at 0. NaN sigma gives nullopt.
std::vector<std::optional<Interval>> wald_intervals(const std::vector<double>& estimates,
                                                    const std::vector<double>& std_errors, double level);

struct IntervalSet {
  double level = 0.95;
  bool from_pseudo_inverse = false;
  std::vector<std::optional<Interval>> per_parameter;
};

struct FitResult {
  ModelKind kind = ModelKind::nongender;
  std::vector<double> estimates;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;   // of the winning start
  int evaluations = 0;  // across all starts
  WarmStart warm_start;
  std::vector<bool> at_bound;
  /// Hessian is positive semidefinite but rank-deficient: the likelihood is
  /// flat along a ridge through the estimate.
  bool ridge = false;
  /// The estimate was moved along a one-dimensional ridge to the equally
  /// likely point nearest (Euclidean) the warm start.
  bool ridge_canonical = false;

  std::optional<Eigen::MatrixXd> hessian;  // of the negative log-likelihood
  std::string hessian_error;
  CovarianceResult covariance;
  std::vector<IntervalSet> intervals;

  const std::vector<double>& std_errors() const;
  bool uses_pseudo_inverse() const { return !covariance.positive_definite && covariance.pseudo_covariance.has_value(); }
};

Box default_bounds(ModelKind kind);

/// Bounded simplex maximisation of the log-likelihood. Throws
/// InfeasibleDataError when every start evaluates to -inf. When the Hessian
/// at the optimum has exactly one null direction the estimate is replaced by
/// the ridge point nearest the warm start whose log-likelihood is within
/// kRidgeTolerance of the maximum.
FitResult fit_mle(ModelKind kind, const Dataset& data, const WarmStart& warm_start, const Box& bounds,
                  const FitOptions& options = {});

/// CFA warm start (first and last observation).
WarmStart nongender_warm_start(const Dataset& data);
/// lambda_m = lambda_f = lambda_hat, tau_mf = tau_fm = tau_hat.
WarmStart gender_warm_start(const FitResult& nongender_fit);

FitResult fit_nongender(const Dataset& data, const FitOptions& options = {});
/// Fits the collapsed data first unless `nongender_fit` is supplied.
FitResult fit_gender(const Dataset& data, const FitOptions& options = {},
                     const FitResult* nongender_fit = nullptr);

struct EllipseSpec {
  Eigen::Vector2d mean;
  Eigen::Matrix2d covariance;
  double level = 0.95;
  int n_points = 100;
};

struct Ellipse {
  double level = 0.95;
  double radius_squared = 0.0;         // chi-square(2) quantile at level
  std::vector<Eigen::Vector2d> raw;    // on the quadratic-form contour
  std::vector<Eigen::Vector2d> points; // clipped at zero per coordinate
};

/// Throws DomainError for a covariance that is not positive definite.
Ellipse ellipse_points(const EllipseSpec& spec);

struct InfectionRow {
  std::string route;      // "external" or "internal"
  std::string parameter;  // name of the rate
  double rate = 0.0;
  double at_risk = 0.0;  // susceptible individuals exposed through this route
  double infections_per_year = 0.0;
  double per_thousand = 0.0;
};

struct InfectionTable {
  ModelKind kind = ModelKind::nongender;
  std::vector<InfectionRow> rows;
  double total_infections = 0.0;
  /// Sum of per-thousand rates over rows with different denominators.
  double summed_per_thousand = 0.0;
};

InfectionTable infections_per_year(const NonGenderParams& params, const PairCounts& init);
InfectionTable infections_per_year(const GenderParams& params, const GenderPairCounts& init);

}  // namespace pairinfer
