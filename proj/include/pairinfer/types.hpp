#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pairinfer {

enum class ModelKind { nongender, gender };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// Occupancy of the three unordered pair states at one observation time.
struct PairCounts {
  std::int64_t ss = 0;
  std::int64_t si = 0;
  std::int64_t ii = 0;

  std::int64_t total() const { return ss + si + ii; }
  bool operator==(const PairCounts&) const = default;
};

/// Occupancy of the four gendered states. `is` has the male partner infected,
/// `si` the female partner.
struct GenderPairCounts {
  std::int64_t ss = 0;
  std::int64_t is = 0;
  std::int64_t si = 0;
  std::int64_t ii = 0;

  std::int64_t total() const { return ss + is + si + ii; }
  PairCounts marginal() const { return {ss, is + si, ii}; }
  bool operator==(const GenderPairCounts&) const = default;
};

/// Rates per year. `lambda` acts on each susceptible individual from outside
/// the pair, `tau` within a discordant pair.
struct NonGenderParams {
  double lambda = 0.0;
  double tau = 0.0;

  /// Excess within-pair hazard, tau - lambda.
  double theta() const { return tau - lambda; }
  /// Coordinate with tau = (2 phi + 1) lambda. Requires lambda > 0.
  double phi() const { return (tau / lambda - 1.0) / 2.0; }
  static NonGenderParams from_phi(double lambda, double phi) { return {lambda, (2.0 * phi + 1.0) * lambda}; }

  std::vector<double> to_vector() const { return {lambda, tau}; }
};

struct GenderParams {
  double lambda_m = 0.0;
  double lambda_f = 0.0;
  double tau_mf = 0.0;  // infected male to susceptible female
  double tau_fm = 0.0;  // infected female to susceptible male

  std::vector<double> to_vector() const { return {lambda_m, lambda_f, tau_mf, tau_fm}; }
};

/// Alternate coordinates for the gendered model: total external force
/// `lambda`, the male share `q` and the dimensionless excess terms.
struct GenderReparam {
  double lambda = 0.0;
  double q = 0.5;
  double theta_m = 0.0;
  double theta_f = 0.0;
};

/// Expected (real-valued) pair counts.
struct PairState {
  double ss = 0.0;
  double si = 0.0;
  double ii = 0.0;

  double total() const { return ss + si + ii; }
};

struct GenderPairState {
  double ss = 0.0;
  double is = 0.0;
  double si = 0.0;
  double ii = 0.0;

  double total() const { return ss + is + si + ii; }
};

/// Parameter names in vector order for each model.
const std::vector<std::string>& parameter_names(ModelKind kind);
std::size_t parameter_count(ModelKind kind);
/// Index of `name` in parameter_names(kind); throws ConfigError when unknown.
std::size_t parameter_index(ModelKind kind, std::string_view name);

NonGenderParams nongender_from_vector(const std::vector<double>& v);
GenderParams gender_from_vector(const std::vector<double>& v);

}  // namespace pairinfer
