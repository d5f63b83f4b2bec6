#include "pairinfer/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pairinfer/error.hpp"
#include "pairinfer/pair_model.hpp"

namespace pairinfer {

namespace {

// n log(p / N), with the 0 log 0 = 0 convention and -inf for an observed
// state the model cannot reach.
double multinomial_term(std::int64_t observed, double predicted, double n) {
  if (observed == 0) return 0.0;
  if (!(predicted > 0.0)) return kImpossible;
  return static_cast<double>(observed) * std::log(predicted / n);
}

double entropy_term(std::int64_t observed, double n) {
  return observed == 0 ? 0.0 : static_cast<double>(observed) * std::log(static_cast<double>(observed) / n);
}

}  // namespace

double log_likelihood(const NonGenderParams& params, const Dataset& data) {
  const PairCounts init = data.counts(0);
  const double n = static_cast<double>(data.total_pairs());
  double total = 0.0;
  for (std::size_t i = 1; i < data.size(); ++i) {
    const PairState p = solve_nongender(params, init, data.elapsed(i));
    const PairCounts obs = data.counts(i);
    total += multinomial_term(obs.ss, p.ss, n);
    total += multinomial_term(obs.si, p.si, n);
    total += multinomial_term(obs.ii, p.ii, n);
  }
  return total;
}

double log_likelihood(const GenderParams& params, const Dataset& data) {
  const GenderPairCounts& init = data.gender_counts(0);
  const double n = static_cast<double>(data.total_pairs());
  double total = 0.0;
  for (std::size_t i = 1; i < data.size(); ++i) {
    const GenderPairState p = solve_gender(params, init, data.elapsed(i));
    const GenderPairCounts& obs = data.gender_counts(i);
    total += multinomial_term(obs.ss, p.ss, n);
    total += multinomial_term(obs.is, p.is, n);
    total += multinomial_term(obs.si, p.si, n);
    total += multinomial_term(obs.ii, p.ii, n);
  }
  return total;
}

double log_likelihood(ModelKind kind, const std::vector<double>& params, const Dataset& data) {
  return kind == ModelKind::nongender ? log_likelihood(nongender_from_vector(params), data)
                                      : log_likelihood(gender_from_vector(params), data);
}

double saturated_log_likelihood(ModelKind kind, const Dataset& data) {
  const double n = static_cast<double>(data.total_pairs());
  double total = 0.0;
  for (std::size_t i = 1; i < data.size(); ++i) {
    if (kind == ModelKind::gender) {
      const auto& c = data.gender_counts(i);
      total += entropy_term(c.ss, n) + entropy_term(c.is, n) + entropy_term(c.si, n) + entropy_term(c.ii, n);
    } else {
      const auto c = data.counts(i);
      total += entropy_term(c.ss, n) + entropy_term(c.si, n) + entropy_term(c.ii, n);
    }
  }
  return total;
}

std::vector<double> GridAxis::values() const {
  if (points < 1) throw ConfigError("grid axis '" + name + "' needs at least one point");
  if (!(min >= 0.0) || !std::isfinite(max)) throw ConfigError("grid axis '" + name + "' must have min >= 0");
  if (points == 1) return {min};
  if (!(max > min)) throw ConfigError("grid axis '" + name + "' must have max > min");
  if (log_spaced && !(min > 0.0)) throw ConfigError("log-spaced axis '" + name + "' needs min > 0");

  std::vector<double> out(static_cast<std::size_t>(points));
  const double steps = static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / steps;
    out[static_cast<std::size_t>(i)] =
        log_spaced ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
  }
  out.back() = max;
  return out;
}

GridAxis GridAxis::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4 && !(parts.size() == 5 && (parts[4] == "log" || parts[4] == "lin"))) {
    throw ParseError("grid must look like <param>:<min>:<max>:<n>[:log], got '" + text + "'");
  }
  GridAxis axis;
  axis.name = parts[0];
  try {
    std::size_t used = 0;
    axis.min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    axis.max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    axis.points = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument(parts[3]);
  } catch (const std::logic_error&) {
    throw ParseError("grid '" + text + "' has a non-numeric field");
  }
  axis.log_spaced = parts.size() == 5 && parts[4] == "log";
  axis.values();  // validates
  return axis;
}

std::vector<double> Surface::point(std::size_t i, std::size_t j) const {
  std::vector<double> p = base;
  p[x_index] = x_values[i];
  p[y_index] = y_values[j];
  return p;
}

Surface likelihood_surface(ModelKind kind, const Dataset& data, const GridSpec& grid,
                           const std::map<std::string, double>& fixed) {
  if (grid.axes.size() != 2) throw ConfigError("likelihood surface needs exactly two grid axes");
  Surface s;
  s.kind = kind;
  s.x_name = grid.axes[0].name;
  s.y_name = grid.axes[1].name;
  s.x_index = parameter_index(kind, s.x_name);
  s.y_index = parameter_index(kind, s.y_name);
  if (s.x_index == s.y_index) throw ConfigError("grid axes must name different parameters");
  s.x_values = grid.axes[0].values();
  s.y_values = grid.axes[1].values();

  const auto& names = parameter_names(kind);
  s.base.assign(names.size(), 0.0);
  std::set<std::size_t> assigned{s.x_index, s.y_index};
  for (const auto& [name, value] : fixed) {
    const std::size_t idx = parameter_index(kind, name);
    if (idx == s.x_index || idx == s.y_index) continue;
    s.base[idx] = value;
    assigned.insert(idx);
  }
  if (assigned.size() != names.size()) {
    throw ConfigError("likelihood surface: every parameter off the grid axes needs a fixed value");
  }

  s.raw.resize(s.rows() * s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      s.raw[i * s.cols() + j] = log_likelihood(kind, s.point(i, j), data);
    }
  }
  for (double v : s.raw) {
    if (std::isfinite(v)) s.max_raw = std::max(s.max_raw, v);
  }
  s.normalized.resize(s.raw.size());
  for (std::size_t k = 0; k < s.raw.size(); ++k) {
    s.normalized[k] = std::isfinite(s.max_raw) ? s.raw[k] - s.max_raw : kImpossible;
  }
  return s;
}

std::vector<SlicePoint> slice_profile(ModelKind kind, const Dataset& data, const std::string& vary,
                                      const GridAxis& range, const std::vector<double>& anchor) {
  if (anchor.size() != parameter_count(kind)) throw ConfigError("slice anchor has the wrong number of parameters");
  const std::size_t idx = parameter_index(kind, vary);
  std::vector<SlicePoint> curve;
  std::vector<double> p = anchor;
  for (double v : range.values()) {
    p[idx] = v;
    curve.push_back({v, log_likelihood(kind, p, data)});
  }
  return curve;
}

std::vector<std::pair<std::size_t, std::size_t>> interior_local_maxima(const Surface& s) {
  std::vector<std::pair<std::size_t, std::size_t>> maxima;
  const auto value = [&](std::size_t i, std::size_t j) { return s.raw[i * s.cols() + j]; };
  for (std::size_t i = 1; i + 1 < s.rows(); ++i) {
    for (std::size_t j = 1; j + 1 < s.cols(); ++j) {
      const double v = value(i, j);
      if (!std::isfinite(v)) continue;
      bool peak = true;
      for (int di = -1; di <= 1 && peak; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (!(v > value(i + di, j + dj))) {
            peak = false;
            break;
          }
        }
      }
      if (peak) maxima.emplace_back(i, j);
    }
  }
  return maxima;
}

}  // namespace pairinfer
