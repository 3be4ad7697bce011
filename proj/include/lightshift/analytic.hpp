#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>

#include "lightshift/error.hpp"
#include "lightshift/params.hpp"
#include "lightshift/pulse.hpp"

namespace lightshift {

enum class ShiftMethod {
  RamanAnalytic,
  BraggBoxAnalytic,
  AdiabaticAnalytic,
  BoxAsymptotic,
  AdiabaticAsymptotic,
  Numeric,
};

constexpr std::string_view to_string(ShiftMethod m) {
  switch (m) {
  case ShiftMethod::RamanAnalytic: return "raman";
  case ShiftMethod::BraggBoxAnalytic: return "bragg-box";
  case ShiftMethod::AdiabaticAnalytic: return "adiabatic";
  case ShiftMethod::BoxAsymptotic: return "asymptotic-box";
  case ShiftMethod::AdiabaticAsymptotic: return "asymptotic-ad";
  case ShiftMethod::Numeric: return "numeric";
  }
  return "unknown";
}

inline ShiftMethod parse_shift_method(std::string_view s) {
  for (auto m : {ShiftMethod::RamanAnalytic, ShiftMethod::BraggBoxAnalytic,
                 ShiftMethod::AdiabaticAnalytic, ShiftMethod::BoxAsymptotic,
                 ShiftMethod::AdiabaticAsymptotic, ShiftMethod::Numeric})
    if (to_string(m) == s)
      return m;
  throw Error(ErrorCode::Usage, "unknown model '" + std::string(s) + "'",
              "model");
}

/// A light-shift phase together with the inputs that produced it.
struct ShiftResult {
  double phase = 0.0; // rad
  ShiftMethod method = ShiftMethod::Numeric;
  LatticeParams params;
  /// Amplitude functional used for scaling; 0 when not applicable.
  double phi = 0.0;
  std::map<std::string, double> diagnostics;

  friend bool operator==(const ShiftResult &, const ShiftResult &) = default;
};

/// Denominators closer to zero than this (in units of omega_K) are treated
/// as poles.
inline constexpr double pole_guard = 1e-6;

namespace detail {

struct Denominator {
  const char *name;
  double value;
};

inline void check_pole(const Denominator &d, double omega_K,
                       std::string_view formula) {
  if (!(std::abs(d.value) >= pole_guard * omega_K))
    throw Error(ErrorCode::Pole,
                std::string(formula) + ": denominator " + d.name +
                    " vanishes (double or degenerate diffraction regime)",
                d.name);
}

inline double checked_omega(const LatticeParams &params) {
  if (!(params.recoil_omega_K > 0.0))
    throw Error(ErrorCode::InvalidInput, "recoil frequency must be positive",
                "omega_K");
  return params.recoil_omega_K;
}

} // namespace detail

// The closed forms below are written for the upper sign with a signed
// Doppler frequency nu; the lower-sign expressions are the same functions
// evaluated at -nu.

inline double raman_phase(double rabi, double omega_K, double nu) {
  detail::check_pole({"nu", nu}, omega_K, "raman");
  detail::check_pole({"2omega_K+nu", 2.0 * omega_K + nu}, omega_K, "raman");
  return rabi / (4.0 * nu) * (omega_K + nu) / (2.0 * omega_K + nu);
}

/// The population-transfer addend of the box-pulse Bragg shift.
inline double bragg_box_first_term(double rabi, double omega_K, double nu) {
  detail::check_pole({"omega_K+nu", omega_K + nu}, omega_K, "bragg-box");
  return rabi / 4.0 * 2.0 / (omega_K + nu);
}

/// The level-shift addend of the box-pulse Bragg shift.
inline double bragg_box_second_term(double rabi, double omega_K, double nu) {
  detail::check_pole({"nu", nu}, omega_K, "bragg-box");
  detail::check_pole({"2omega_K+nu", 2.0 * omega_K + nu}, omega_K,
                     "bragg-box");
  detail::check_pole({"omega_K+nu", omega_K + nu}, omega_K, "bragg-box");
  return rabi / (4.0 * nu) * omega_K * omega_K /
         ((2.0 * omega_K + nu) * (omega_K + nu));
}

inline double bragg_box_phase(double rabi, double omega_K, double nu) {
  const double second = bragg_box_second_term(rabi, omega_K, nu);
  return bragg_box_first_term(rabi, omega_K, nu) + second;
}

inline double adiabatic_phase(double phi, double omega_K, double nu) {
  detail::check_pole({"nu", nu}, omega_K, "adiabatic");
  detail::check_pole({"2omega_K+nu", 2.0 * omega_K + nu}, omega_K,
                     "adiabatic");
  detail::check_pole({"omega_K+nu", omega_K + nu}, omega_K, "adiabatic");
  return phi * omega_K * omega_K * omega_K /
         (nu * (2.0 * omega_K + nu) * (omega_K + nu));
}

inline ShiftResult raman_shift(double rabi, const LatticeParams &params) {
  const double w = detail::checked_omega(params);
  return {raman_phase(rabi, w, effective_doppler(params)),
          ShiftMethod::RamanAnalytic, params, rabi / (4.0 * w), {}};
}

inline ShiftResult bragg_box_shift(double rabi, const LatticeParams &params) {
  const double w = detail::checked_omega(params);
  return {bragg_box_phase(rabi, w, effective_doppler(params)),
          ShiftMethod::BraggBoxAnalytic, params, rabi / (4.0 * w), {}};
}

inline ShiftResult adiabatic_shift(double phi, const LatticeParams &params) {
  const double w = detail::checked_omega(params);
  return {adiabatic_phase(phi, w, effective_doppler(params)),
          ShiftMethod::AdiabaticAnalytic, params, phi, {}};
}

/// Convenience overload: the amplitude functional is taken from the pulse.
inline ShiftResult adiabatic_shift(const PulseShape &pulse,
                                   const LatticeParams &params) {
  return adiabatic_shift(
      phi_functional(pulse, detail::checked_omega(params)), params);
}

enum class AsymptoticModel { BoxLeading, AdiabaticLeading };

/// Leading large-Doppler behaviour. BoxLeading takes the Rabi frequency,
/// AdiabaticLeading the amplitude functional.
inline ShiftResult asymptotic_shift(AsymptoticModel model, double rabi_or_phi,
                                    const LatticeParams &params) {
  const double w = detail::checked_omega(params);
  const double nu = effective_doppler(params);
  if (nu == 0.0)
    throw Error(ErrorCode::InvalidInput,
                "asymptotic shift needs a nonzero Doppler frequency", "nu");
  if (model == AsymptoticModel::BoxLeading)
    return {rabi_or_phi / (2.0 * nu), ShiftMethod::BoxAsymptotic, params,
            rabi_or_phi / (4.0 * w), {}};
  const double x = w / nu;
  return {rabi_or_phi * x * x * x, ShiftMethod::AdiabaticAsymptotic, params,
          rabi_or_phi, {}};
}

} // namespace lightshift
