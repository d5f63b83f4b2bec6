#pragma once

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pairinfer/dataset.hpp"
#include "pairinfer/types.hpp"

namespace pairinfer {

/// Returned for parameters under which the observed data are impossible.
inline constexpr double kImpossible = -std::numeric_limits<double>::infinity();

/// Multinomial log-likelihood of every observation after the first,
/// conditioning on the first as the initial state. Multinomial coefficients
/// are dropped. Gendered datasets are collapsed to three states.
double log_likelihood(const NonGenderParams& params, const Dataset& data);
/// Requires a gendered dataset.
double log_likelihood(const GenderParams& params, const Dataset& data);
/// Vector form in parameter_names(kind) order.
double log_likelihood(ModelKind kind, const std::vector<double>& params, const Dataset& data);

/// Upper bound of the log-likelihood: every modelled proportion equal to the
/// observed frequency.
double saturated_log_likelihood(ModelKind kind, const Dataset& data);

struct GridAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int points = 2;
  bool log_spaced = false;

  std::vector<double> values() const;
  /// Parses "<param>:<min>:<max>:<n>" with an optional trailing ":log".
  static GridAxis parse(const std::string& text);
};

struct GridSpec {
  std::vector<GridAxis> axes;
};

/// Log-likelihood over a two-axis grid. Cell (i, j) sits at axis0[i], axis1[j]
/// and is stored row-major at i * axis1.size() + j.
struct Surface {
  ModelKind kind = ModelKind::nongender;
  std::string x_name;
  std::string y_name;
  std::vector<double> x_values;
  std::vector<double> y_values;
  std::vector<double> raw;         // log-likelihood as evaluated
  std::vector<double> normalized;  // raw minus the finite grid maximum
  double max_raw = kImpossible;

  std::size_t rows() const { return x_values.size(); }
  std::size_t cols() const { return y_values.size(); }
  double at(std::size_t i, std::size_t j) const { return normalized[i * cols() + j]; }
  /// Full parameter vector evaluated at cell (i, j).
  std::vector<double> point(std::size_t i, std::size_t j) const;

  std::vector<double> base;  // fixed coordinates, axes overwritten per cell
  std::size_t x_index = 0;
  std::size_t y_index = 1;
};

/// `fixed` must assign every parameter not named by the two axes.
Surface likelihood_surface(ModelKind kind, const Dataset& data, const GridSpec& grid,
                           const std::map<std::string, double>& fixed = {});

struct SlicePoint {
  double value = 0.0;
  double log_likelihood = 0.0;
};

/// One-dimensional slice through `anchor`, varying only `vary` over `range`.
/// The other coordinates stay fixed; nothing is re-optimised.
std::vector<SlicePoint> slice_profile(ModelKind kind, const Dataset& data, const std::string& vary,
                                      const GridAxis& range, const std::vector<double>& anchor);

/// Interior cells strictly greater than all eight neighbours.
std::vector<std::pair<std::size_t, std::size_t>> interior_local_maxima(const Surface& s);

}  // namespace pairinfer
