#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lightshift/error.hpp"

namespace lightshift {

using cplx = std::complex<double>;

struct IntegratorStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  double smallest_step = 0.0;
  double largest_step = 0.0;
};

/// Settings of the embedded 5(4) pair.
struct AdaptiveSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0; // <= 0 means unbounded
  std::size_t max_steps = 20'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                          b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  // b(5th) - b(4th)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

} // namespace detail

/// Integrate y' = f(t, y) from t0 to t1 with local error control. The rhs
/// is called as f(t, std::span<const cplx> y, std::span<cplx> dy). The
/// observer is called as observer(t, std::span<const cplx> y) after every
/// accepted step. On return y holds the solution at t1.
template <class Rhs, class Observer>
IntegratorStats integrate_adaptive(Rhs &&f, std::vector<cplx> &y, double t0,
                                   double t1, const AdaptiveSettings &cfg,
                                   Observer &&observer) {
  using T = detail::DormandPrince;
  IntegratorStats stats;
  const std::size_t n = y.size();
  if (t1 <= t0 || n == 0)
    return stats;

  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n),
      y_new(n);
  const double span = t1 - t0;
  const double h_max = cfg.max_step > 0.0 ? std::min(cfg.max_step, span) : span;
  double h = std::min(h_max, span * 1e-3);
  double t = t0;

  auto eval = [&](double tt, const std::vector<cplx> &in, std::vector<cplx> &out) {
    f(tt, std::span<const cplx>(in), std::span<cplx>(out));
    ++stats.rhs_evaluations;
  };

  eval(t, y, k1);
  stats.smallest_step = h_max;
  std::size_t attempts = 0;
  while (t < t1) {
    if (++attempts > cfg.max_steps)
      throw Error(ErrorCode::IntegrationFailure,
                  "step budget exhausted after " +
                      std::to_string(stats.accepted_steps) + " accepted and " +
                      std::to_string(stats.rejected_steps) +
                      " rejected steps at t=" + std::to_string(t),
                  "max_steps");
    bool last = false;
    if (t + h >= t1 || t1 - (t + h) < 1e-12 * span) {
      h = t1 - t;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (T::a21 * k1[i]);
    eval(t + T::c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    eval(t + T::c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    eval(t + T::c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] +
                           T::a54 * k4[i]);
    eval(t + T::c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] +
                           T::a64 * k4[i] + T::a65 * k5[i]);
    const double t_new = last ? t1 : t + h;
    eval(t_new, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] + T::b4 * k4[i] +
                             T::b5 * k5[i] + T::b6 * k6[i]);
    eval(t_new, y_new, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] +
                          T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = std::abs(e) / scale;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (!std::isfinite(err))
      throw Error(ErrorCode::IntegrationFailure,
                  "non-finite error estimate at t=" + std::to_string(t),
                  "error_estimate");

    if (err <= 1.0) {
      stats.smallest_step = std::min(stats.smallest_step, h);
      stats.largest_step = std::max(stats.largest_step, h);
      ++stats.accepted_steps;
      t = t_new;
      y.swap(y_new);
      k1.swap(k7); // first-same-as-last
      observer(t, std::span<const cplx>(y));
      if (last)
        break;
      const double factor =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * factor, h_max);
    } else {
      ++stats.rejected_steps;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-14 * span)
        throw Error(ErrorCode::IntegrationFailure,
                    "step size underflow at t=" + std::to_string(t),
                    "step_size");
    }
  }
  return stats;
}

/// Classical fourth-order Runge-Kutta with the smallest uniform step not
/// exceeding max_step.
template <class Rhs, class Observer>
IntegratorStats integrate_fixed_rk4(Rhs &&f, std::vector<cplx> &y, double t0,
                                    double t1, double max_step,
                                    Observer &&observer) {
  IntegratorStats stats;
  const std::size_t n = y.size();
  if (t1 <= t0 || n == 0)
    return stats;
  if (!(max_step > 0.0))
    throw Error(ErrorCode::InvalidInput, "fixed step must be positive",
                "max_step");
  const auto steps =
      static_cast<std::size_t>(std::ceil((t1 - t0) / max_step - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(std::max<std::size_t>(steps, 1));
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto eval = [&](double tt, const std::vector<cplx> &in, std::vector<cplx> &out) {
    f(tt, std::span<const cplx>(in), std::span<cplx>(out));
    ++stats.rhs_evaluations;
  };
  const std::size_t count = std::max<std::size_t>(steps, 1);
  for (std::size_t s = 0; s < count; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    const double t_next = s + 1 == count ? t1 : t + h;
    eval(t, y, k1);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + 0.5 * h * k1[i];
    eval(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + 0.5 * h * k2[i];
    eval(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * k3[i];
    eval(t_next, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    ++stats.accepted_steps;
    observer(t_next, std::span<const cplx>(y));
  }
  stats.smallest_step = stats.largest_step = h;
  return stats;
}

} // namespace lightshift
