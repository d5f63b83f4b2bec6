#include "pairinfer/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pairinfer/error.hpp"

namespace pairinfer {

std::vector<double> Box::project(std::vector<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  return x;
}

bool Box::contains(const std::vector<double>& x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const Box& box, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0 || box.lower.size() != n || box.upper.size() != n) {
    throw ConfigError("simplex start and box dimensions disagree");
  }
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  SimplexResult result;
  const auto evaluate = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> vertices(n + 1, box.project(std::move(start)));
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = vertices[i + 1];
    const double step = v[i] != 0.0 ? options.initial_step * v[i] : options.zero_step;
    v[i] += step;
    if (v[i] > box.upper[i]) v[i] = vertices[0][i] - step;
    v = box.project(v);
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = evaluate(vertices[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n);
  const auto point_along = [&](double coefficient, const std::vector<double>& worst) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + coefficient * (centroid[k] - worst[k]);
    return box.project(std::move(x));
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<std::vector<double>> v2;
      std::vector<double> f2;
      for (auto idx : order) {
        v2.push_back(vertices[idx]);
        f2.push_back(values[idx]);
      }
      vertices = std::move(v2);
      values = std::move(f2);
    }

    double diameter = 0.0;
    double spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(vertices[i][k] - vertices[0][k]));
      spread = std::max(spread, std::abs(values[i] - values[0]));
    }
    if (std::isfinite(values[0]) && diameter < options.x_tolerance && spread < options.f_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += vertices[i][k] / static_cast<double>(n);
    }

    const auto& worst = vertices[n];
    const auto reflected = point_along(kReflect, worst);
    const double f_reflected = evaluate(reflected);

    if (f_reflected < values[0]) {
      const auto expanded = point_along(kReflect * kExpand, worst);
      const double f_expanded = evaluate(expanded);
      if (f_expanded < f_reflected) {
        vertices[n] = expanded;
        values[n] = f_expanded;
      } else {
        vertices[n] = reflected;
        values[n] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[n - 1]) {
      vertices[n] = reflected;
      values[n] = f_reflected;
      continue;
    }

    bool shrink = false;
    if (f_reflected < values[n]) {
      const auto outside = point_along(kReflect * kContract, worst);
      const double f_outside = evaluate(outside);
      if (f_outside <= f_reflected) {
        vertices[n] = outside;
        values[n] = f_outside;
      } else {
        shrink = true;
      }
    } else {
      const auto inside = point_along(-kContract, worst);
      const double f_inside = evaluate(inside);
      if (f_inside < values[n]) {
        vertices[n] = inside;
        values[n] = f_inside;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          vertices[i][k] = vertices[0][k] + kShrink * (vertices[i][k] - vertices[0][k]);
        }
        values[i] = evaluate(vertices[i]);
      }
    }
  }

  result.x = vertices[0];
  result.value = values[0];
  return result;
}

}  // namespace pairinfer
