#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "lightshift/error.hpp"

namespace lightshift {

namespace constants {
inline constexpr double reduced_planck = 1.054571817e-34; // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
} // namespace constants

/// Which resonance the laser frequency difference selects: the atom is
/// kicked from p0 to p0 + hbar K (Plus) or to p0 - hbar K (Minus).
enum class Direction { Plus, Minus };

constexpr std::string_view to_string(Direction d) {
  return d == Direction::Plus ? "plus" : "minus";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "plus" || s == "+")
    return Direction::Plus;
  if (s == "minus" || s == "-")
    return Direction::Minus;
  throw Error(ErrorCode::Usage, "unknown direction '" + std::string(s) + "'",
              "direction");
}

/// Physical description of the atom and the two-photon lattice.
/// K is the total two-photon wavenumber k_b + k_r.
struct PhysicalInput {
  double wavenumber_K = 0.0;        // rad/m
  double mass_M = 0.0;              // kg
  double initial_momentum_p0 = 0.0; // kg m/s
  double reduced_planck = constants::reduced_planck;
};

/// Frequencies that fully determine the ladder dynamics. Any consistent unit
/// system works; the rest of the library mostly uses units of the recoil
/// frequency, i.e. recoil_omega_K == 1.
struct LatticeParams {
  double recoil_omega_K = 1.0;
  double doppler_nu_K = 0.0;
  double laser_phase_theta = 0.0;
  Direction direction = Direction::Plus;

  friend bool operator==(const LatticeParams &, const LatticeParams &) = default;
};

/// Lattice parameters in units of the recoil frequency at a given Doppler
/// ratio nu_K / omega_K.
inline LatticeParams dimensionless_params(double ratio, double theta = 0.0,
                                          Direction direction = Direction::Plus) {
  return LatticeParams{1.0, ratio, theta, direction};
}

inline LatticeParams derive_params(const PhysicalInput &input, double theta,
                                   Direction direction) {
  if (!(input.wavenumber_K > 0.0))
    throw Error(ErrorCode::InvalidInput, "wavenumber K must be positive",
                "wavenumber_K");
  if (!(input.mass_M > 0.0))
    throw Error(ErrorCode::InvalidInput, "mass M must be positive", "mass_M");
  if (!(input.reduced_planck > 0.0))
    throw Error(ErrorCode::InvalidInput, "hbar must be positive",
                "reduced_planck");
  const double K = input.wavenumber_K;
  return LatticeParams{input.reduced_planck * K * K / (2.0 * input.mass_M),
                       input.initial_momentum_p0 * K / input.mass_M, theta,
                       direction};
}

inline double doppler_ratio(const LatticeParams &params) {
  return params.doppler_nu_K / params.recoil_omega_K;
}

/// Signed Doppler frequency entering the ladder equations and every closed
/// form: +|nu_K| for Plus, -|nu_K| for Minus.
inline double effective_doppler(const LatticeParams &params) {
  const double magnitude = std::abs(params.doppler_nu_K);
  return params.direction == Direction::Plus ? magnitude : -magnitude;
}

namespace species {

/// 87Rb on the D2 line with counterpropagating beams, K = 2 k.
struct Rubidium87 {
  static constexpr double mass = 86.909180527 * constants::atomic_mass_unit;
  static constexpr double wavelength = 780.241209686e-9;
  static constexpr double wavenumber_K =
      2.0 * 2.0 * std::numbers::pi / wavelength;
  /// Rounded recoil frequency customarily quoted for Rb, 2 pi x 15 kHz.
  static constexpr double nominal_recoil_omega = 2.0 * std::numbers::pi * 15e3;

  static PhysicalInput input(double initial_momentum_p0) {
    return PhysicalInput{wavenumber_K, mass, initial_momentum_p0,
                         constants::reduced_planck};
  }

  /// Momentum hbar K of one two-photon kick.
  static constexpr double photon_kick() {
    return constants::reduced_planck * wavenumber_K;
  }
};

} // namespace species

} // namespace lightshift
