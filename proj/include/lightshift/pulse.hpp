#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>

#include "lightshift/error.hpp"

namespace lightshift {

/// Constant Rabi frequency switched on over [0, duration].
struct BoxPulse {
  double peak_rabi = 0.0;
  double duration = 0.0;

  friend bool operator==(const BoxPulse &, const BoxPulse &) = default;
};

/// Omega0 exp(-t^2 / (2 sigma^2)) centred on t = 0 and cut off outside
/// |t| <= window_multiple * sigma.
struct GaussianPulse {
  static constexpr double default_window = 6.0;

  double peak_rabi = 0.0;
  double sigma = 0.0;
  double window_multiple = default_window;

  friend bool operator==(const GaussianPulse &, const GaussianPulse &) = default;
};

using PulseShape = std::variant<BoxPulse, GaussianPulse>;

inline constexpr double half_pi_area = std::numbers::pi / 2.0;

struct TimeInterval {
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
};

inline bool is_box(const PulseShape &p) {
  return std::holds_alternative<BoxPulse>(p);
}

inline std::string shape_name(const PulseShape &p) {
  return is_box(p) ? "box" : "gaussian";
}

inline double peak_rabi(const PulseShape &p) {
  return std::visit([](const auto &s) { return s.peak_rabi; }, p);
}

inline void validate(const PulseShape &pulse) {
  std::visit(
      [](const auto &s) {
        using T = std::decay_t<decltype(s)>;
        if (!(s.peak_rabi >= 0.0) || !std::isfinite(s.peak_rabi))
          throw Error(ErrorCode::InvalidInput,
                      "peak Rabi frequency must be finite and >= 0",
                      "peak_rabi");
        if constexpr (std::is_same_v<T, BoxPulse>) {
          if (!(s.duration > 0.0) || !std::isfinite(s.duration))
            throw Error(ErrorCode::InvalidInput,
                        "box duration must be positive", "duration");
        } else {
          if (!(s.sigma > 0.0) || !std::isfinite(s.sigma))
            throw Error(ErrorCode::InvalidInput,
                        "gaussian sigma must be positive", "sigma");
          if (!(s.window_multiple >= 4.0))
            throw Error(ErrorCode::InvalidInput,
                        "gaussian window must be at least 4 sigma",
                        "window_multiple");
        }
      },
      pulse);
}

inline TimeInterval support(const PulseShape &pulse) {
  if (const auto *box = std::get_if<BoxPulse>(&pulse))
    return {0.0, box->duration};
  const auto &g = std::get<GaussianPulse>(pulse);
  const double half = g.window_multiple * g.sigma;
  return {-half, half};
}

inline double amplitude_at(const PulseShape &pulse, double t) {
  if (const auto *box = std::get_if<BoxPulse>(&pulse))
    return (t >= 0.0 && t <= box->duration) ? box->peak_rabi : 0.0;
  const auto &g = std::get<GaussianPulse>(pulse);
  if (std::abs(t) > g.window_multiple * g.sigma)
    return 0.0;
  const double x = t / g.sigma;
  return g.peak_rabi * std::exp(-0.5 * x * x);
}

/// Area accumulated from the start of the support up to time t.
inline double cumulative_area(const PulseShape &pulse, double t) {
  if (const auto *box = std::get_if<BoxPulse>(&pulse))
    return box->peak_rabi * std::clamp(t, 0.0, box->duration);
  const auto &g = std::get<GaussianPulse>(pulse);
  const double edge = g.window_multiple * g.sigma;
  const double tc = std::clamp(t, -edge, edge);
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  // Omega0 sigma sqrt(pi/2) [erf(t / (sigma sqrt2)) + erf(w / sqrt2)]
  return g.peak_rabi * g.sigma * std::sqrt(std::numbers::pi / 2.0) *
         (std::erf(tc / g.sigma * inv_sqrt2) +
          std::erf(g.window_multiple * inv_sqrt2));
}

inline double pulse_area(const PulseShape &pulse) {
  if (const auto *box = std::get_if<BoxPulse>(&pulse))
    return box->peak_rabi * box->duration;
  const auto &g = std::get<GaussianPulse>(pulse);
  return g.peak_rabi * g.sigma * std::sqrt(2.0 * std::numbers::pi) *
         std::erf(g.window_multiple / std::numbers::sqrt2);
}

/// Integral of Omega(t)^2 over the support.
inline double squared_area(const PulseShape &pulse) {
  if (const auto *box = std::get_if<BoxPulse>(&pulse))
    return box->peak_rabi * box->peak_rabi * box->duration;
  const auto &g = std::get<GaussianPulse>(pulse);
  return g.peak_rabi * g.peak_rabi * g.sigma *
         std::sqrt(std::numbers::pi) * std::erf(g.window_multiple);
}

/// Rescale the peak so that the pulse area equals target_area. Support and
/// shape are untouched.
inline PulseShape calibrate_peak(const PulseShape &pulse, double target_area) {
  if (!(target_area > 0.0))
    throw Error(ErrorCode::InvalidInput, "target area must be positive",
                "target_area");
  const auto span = support(pulse);
  if (!(span.length() > 0.0) || !std::isfinite(span.length()))
    throw Error(ErrorCode::InvalidInput, "pulse support has zero length",
                "support");
  // Unit-peak area is a pure shape factor.
  PulseShape unit = pulse;
  std::visit([](auto &s) { s.peak_rabi = 1.0; }, unit);
  const double unit_area = pulse_area(unit);
  std::visit([&](auto &s) { s.peak_rabi = target_area / unit_area; }, unit);
  return unit;
}

/// Returns the pulse unchanged when it already carries the target area to
/// within round-off, otherwise the calibrated copy.
inline PulseShape ensure_calibrated(const PulseShape &pulse,
                                    double target_area = half_pi_area) {
  const double area = pulse_area(pulse);
  if (std::abs(area - target_area) <= 1e-13 * target_area)
    return pulse;
  return calibrate_peak(pulse, target_area);
}

/// Dimensionless amplitude  int Omega^2 dt / (4 omega_K int Omega dt).
inline double phi_functional(const PulseShape &pulse, double omega_K) {
  if (!(omega_K > 0.0))
    throw Error(ErrorCode::InvalidInput, "recoil frequency must be positive",
                "omega_K");
  const double area = pulse_area(pulse);
  if (!(area > 0.0))
    throw Error(ErrorCode::InvalidInput,
                "amplitude functional undefined for a zero-area pulse",
                "pulse_area");
  return squared_area(pulse) / (4.0 * omega_K * area);
}

/// Box pulse of peak Omega0 lasting exactly one pi/2 area.
inline BoxPulse half_pi_box(double peak_rabi) {
  if (!(peak_rabi > 0.0))
    throw Error(ErrorCode::InvalidInput, "peak Rabi frequency must be positive",
                "peak_rabi");
  return BoxPulse{peak_rabi, half_pi_area / peak_rabi};
}

/// Gaussian pulse of width sigma calibrated to pi/2 area.
inline GaussianPulse half_pi_gaussian(double sigma,
                                      double window = GaussianPulse::default_window) {
  return std::get<GaussianPulse>(
      calibrate_peak(GaussianPulse{1.0, sigma, window}, half_pi_area));
}

} // namespace lightshift
