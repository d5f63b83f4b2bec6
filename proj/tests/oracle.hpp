#pragma once

// Independent reference values for the tests. Nothing here is used by the
// library itself.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "pairinfer/types.hpp"

namespace oracle {

template <std::size_t N>
using State = std::array<long double, N>;

/// Adaptive Dormand-Prince 5(4) for autonomous systems, in long double with a mixed
/// absolute/relative error control.
template <std::size_t N>
State<N> integrate(const std::function<State<N>(const State<N>&)>& rhs, State<N> y, long double t_end,
                   long double tol = 1e-15L) {
  constexpr long double a21 = 1.0L / 5;
  constexpr long double a31 = 3.0L / 40, a32 = 9.0L / 40;
  constexpr long double a41 = 44.0L / 45, a42 = -56.0L / 15, a43 = 32.0L / 9;
  constexpr long double a51 = 19372.0L / 6561, a52 = -25360.0L / 2187, a53 = 64448.0L / 6561, a54 = -212.0L / 729;
  constexpr long double a61 = 9017.0L / 3168, a62 = -355.0L / 33, a63 = 46732.0L / 5247, a64 = 49.0L / 176,
                        a65 = -5103.0L / 18656;
  constexpr long double b1 = 35.0L / 384, b3 = 500.0L / 1113, b4 = 125.0L / 192, b5 = -2187.0L / 6784, b6 = 11.0L / 84;
  constexpr long double e1 = 71.0L / 57600, e3 = -71.0L / 16695, e4 = 71.0L / 1920, e5 = -17253.0L / 339200,
                        e6 = 22.0L / 525, e7 = -1.0L / 40;

  if (t_end <= 0) return y;
  long double t = 0;
  long double h = std::min<long double>(t_end, 1e-3L);
  const auto axpy = [](const State<N>& base, std::initializer_list<std::pair<long double, const State<N>*>> terms,
                       long double step) {
    State<N> out = base;
    for (const auto& [coef, k] : terms) {
      for (std::size_t i = 0; i < N; ++i) out[i] += step * coef * (*k)[i];
    }
    return out;
  };
  State<N> k1 = rhs(y);
  while (t < t_end) {
    if (t + h > t_end) h = t_end - t;
    const State<N> k2 = rhs(axpy(y, {{a21, &k1}}, h));
    const State<N> k3 = rhs(axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    const State<N> k4 = rhs(axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const State<N> k5 = rhs(axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const State<N> k6 = rhs(axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const State<N> y5 = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const State<N> k7 = rhs(y5);
    long double err = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const long double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const long double scale = tol * (1 + std::max(std::fabs(y[i]), std::fabs(y5[i])));
      err = std::max(err, std::fabs(e) / scale);
    }
    if (err <= 1) {
      t += h;
      y = y5;
      k1 = k7;
    }
    const long double factor = err == 0 ? 5 : std::clamp(0.9L * std::pow(err, -0.2L), 0.2L, 5.0L);
    h *= factor;
  }
  return y;
}

inline std::array<double, 3> nongender(const pairinfer::NonGenderParams& p, const std::array<double, 3>& init,
                                       double t) {
  const long double l = p.lambda, tau = p.tau;
  const auto rhs = [&](const State<3>& y) {
    return State<3>{-2 * l * y[0], 2 * l * y[0] - (l + tau) * y[1], (l + tau) * y[1]};
  };
  const State<3> out = integrate<3>(rhs, {init[0], init[1], init[2]}, t);
  return {static_cast<double>(out[0]), static_cast<double>(out[1]), static_cast<double>(out[2])};
}

/// State order SS, IS (male infected), SI (female infected), II.
inline std::array<double, 4> gender(const pairinfer::GenderParams& p, const std::array<double, 4>& init, double t) {
  const long double lm = p.lambda_m, lf = p.lambda_f, tmf = p.tau_mf, tfm = p.tau_fm;
  const auto rhs = [&](const State<4>& y) {
    return State<4>{-(lm + lf) * y[0], lm * y[0] - (tmf + lf) * y[1], lf * y[0] - (lm + tfm) * y[2],
                    (tmf + lf) * y[1] + (lm + tfm) * y[2]};
  };
  const State<4> out = integrate<4>(rhs, {init[0], init[1], init[2], init[3]}, t);
  return {static_cast<double>(out[0]), static_cast<double>(out[1]), static_cast<double>(out[2]),
          static_cast<double>(out[3])};
}

/// Standard normal CDF from the Taylor series of erf in long double. Accurate
/// to ~1e-16 for |x| < 3; cancellation grows beyond that.
inline long double normal_cdf_series(long double x) {
  const long double z = x / std::sqrt(2.0L);
  long double term = z;
  long double sum = z;
  for (int n = 1; n < 400; ++n) {
    term *= -z * z / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L) break;
  }
  const long double pi = 3.141592653589793238462643383279502884L;
  return 0.5L + sum / std::sqrt(pi);
}

/// Quantile by bisection on the series CDF.
inline double normal_quantile_bisect(double p) {
  long double lo = -6, hi = 6;
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    (normal_cdf_series(mid) < p ? lo : hi) = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

/// Richardson-extrapolated central second difference of f along unit
/// directions i and j.
inline double richardson_second(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                std::size_t i, std::size_t j, double h) {
  const auto d = [&](double s) {
    auto at = [&](double di, double dj) {
      auto y = x;
      y[i] += di;
      y[j] += dj;
      return f(y);
    };
    if (i == j) return (at(s, 0) - 2 * f(x) + at(-s, 0)) / (s * s);
    return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4 * s * s);
  };
  const double d1 = d(h), d2 = d(h / 2), d3 = d(h / 4);
  const double r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

}  // namespace oracle
