#include "pairinfer/types.hpp"

#include <algorithm>

#include "pairinfer/error.hpp"

namespace pairinfer {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::nongender ? "nongender" : "gender";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "nongender" || text == "non-gender" || text == "nongendered") return ModelKind::nongender;
  if (text == "gender" || text == "gendered") return ModelKind::gender;
  throw ParseError("unknown model kind '" + std::string(text) + "' (expected nongender or gender)");
}

const std::vector<std::string>& parameter_names(ModelKind kind) {
  static const std::vector<std::string> nongender{"lambda", "tau"};
  static const std::vector<std::string> gender{"lambda_m", "lambda_f", "tau_mf", "tau_fm"};
  return kind == ModelKind::nongender ? nongender : gender;
}

std::size_t parameter_count(ModelKind kind) { return parameter_names(kind).size(); }

std::size_t parameter_index(ModelKind kind, std::string_view name) {
  const auto& names = parameter_names(kind);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw ConfigError("unknown parameter '" + std::string(name) + "' for model " + std::string(to_string(kind)));
  }
  return static_cast<std::size_t>(it - names.begin());
}

NonGenderParams nongender_from_vector(const std::vector<double>& v) {
  if (v.size() != 2) throw ConfigError("non-gendered parameter vector needs 2 entries");
  return {v[0], v[1]};
}

GenderParams gender_from_vector(const std::vector<double>& v) {
  if (v.size() != 4) throw ConfigError("gendered parameter vector needs 4 entries");
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace pairinfer
