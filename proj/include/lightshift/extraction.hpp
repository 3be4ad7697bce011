#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>

#include "lightshift/analytic.hpp"
#include "lightshift/error.hpp"
#include "lightshift/ladder.hpp"
#include "lightshift/params.hpp"
#include "lightshift/pulse.hpp"

namespace lightshift {

/// Wrap an angle into (-pi, pi].
inline double wrap_phase(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi)
    r += 2.0 * std::numbers::pi;
  return r;
}

inline constexpr double min_extraction_amplitude = 1e-6;

/// arg(g_1 / g_0) of a state, checking both amplitudes are populated.
inline double pair_phase(const LadderState &state) {
  if (!state.contains(0) || !state.contains(1))
    throw Error(ErrorCode::Extraction, "state lacks the resonant pair",
                "window");
  const cplx g0 = state[0];
  const cplx g1 = state[1];
  if (std::abs(g0) <= min_extraction_amplitude)
    throw Error(ErrorCode::Extraction,
                "g_0 vanished; pulse not near pi/2 or wrong resonance", "g0");
  if (std::abs(g1) <= min_extraction_amplitude)
    throw Error(ErrorCode::Extraction,
                "g_1 vanished; pulse not near pi/2 or wrong resonance", "g1");
  return std::arg(g1 / g0);
}

/// Light-shift phase: arg(g_1/g_0) of the full evolution relative to the
/// resonant-only evolution of the same pulse.
inline double extract_light_shift(const LadderState &final_full,
                                  const LadderState &final_baseline) {
  return wrap_phase(pair_phase(final_full) - pair_phase(final_baseline));
}

/// Same, against the closed-form two-level phase pi/2 + theta.
inline double extract_light_shift(const LadderState &final_full, double theta) {
  return wrap_phase(pair_phase(final_full) - (std::numbers::pi / 2.0 + theta));
}

/// Numerical light shift at signed Doppler frequency `nu`. The pulse is
/// calibrated to pi/2 area first when needed.
inline ShiftResult simulate_signed(double omega_K, double nu, double theta,
                                   const PulseShape &pulse,
                                   const IntegratorOptions &opts,
                                   LadderWindow window = default_window) {
  const PulseShape calibrated = ensure_calibrated(pulse);
  const LadderState initial(window);

  const auto full = evolve_signed(initial, omega_K, nu, theta, calibrated,
                                  CouplingMode::Full, opts);
  const auto base = evolve_signed(LadderState(LadderWindow{0, 1}), omega_K, nu,
                                  theta, calibrated,
                                  CouplingMode::ResonantOnly, opts);

  ShiftResult r;
  r.phase = extract_light_shift(full.state, base.state);
  r.method = ShiftMethod::Numeric;
  r.phi = phi_functional(calibrated, omega_K);
  const auto &d = full.diagnostics;
  r.diagnostics = {
      {"accepted_steps", static_cast<double>(d.stats.accepted_steps)},
      {"rejected_steps", static_cast<double>(d.stats.rejected_steps)},
      {"rhs_evaluations", static_cast<double>(d.stats.rhs_evaluations)},
      {"max_norm_defect", d.max_norm_defect},
      {"final_norm_defect", d.final_norm_defect},
      {"baseline_max_norm_defect", base.diagnostics.max_norm_defect},
      {"population_g0", std::norm(full.state[0])},
      {"population_g1", std::norm(full.state[1])},
      {"peak_rabi", peak_rabi(calibrated)},
      {"n_min", static_cast<double>(window.n_min)},
      {"n_max", static_cast<double>(window.n_max)},
  };
  return r;
}

inline ShiftResult simulate_light_shift(const LatticeParams &params,
                                        const PulseShape &pulse,
                                        const IntegratorOptions &opts,
                                        LadderWindow window = default_window) {
  auto r = simulate_signed(params.recoil_omega_K, effective_doppler(params),
                           params.laser_phase_theta, pulse, opts, window);
  r.params = params;
  return r;
}

struct TruncationResult {
  LadderWindow window;
  double shift = 0.0;       // at the returned window
  double change = 0.0;      // |shift(wider by 2) - shift|
};

inline constexpr int max_truncation_neighbors = 12;

/// Smallest window {0,1} +/- h such that adding two more states on each
/// side moves the extracted shift by less than conv_tol.
inline TruncationResult auto_truncate(const LatticeParams &params,
                                      const PulseShape &pulse, double conv_tol,
                                      CouplingMode mode = CouplingMode::Full,
                                      const IntegratorOptions &opts = {}) {
  if (!(conv_tol > 0.0))
    throw Error(ErrorCode::InvalidInput, "convergence tolerance must be positive",
                "conv_tol");
  const PulseShape calibrated = ensure_calibrated(pulse);
  std::map<int, double> cache;
  auto shift_at = [&](int h) {
    if (auto it = cache.find(h); it != cache.end())
      return it->second;
    const auto w = LadderWindow::symmetric(h);
    double s = 0.0;
    if (mode == CouplingMode::ResonantOnly) {
      const auto run = evolve(LadderState(w), params, calibrated,
                              CouplingMode::ResonantOnly, opts);
      s = extract_light_shift(run.state, params.laser_phase_theta);
    } else {
      s = simulate_light_shift(params, calibrated, opts, w).phase;
    }
    cache.emplace(h, s);
    return s;
  };
  double last_change = 0.0;
  for (int h = 0; h <= max_truncation_neighbors; ++h) {
    last_change = std::abs(shift_at(h + 2) - shift_at(h));
    if (last_change < conv_tol)
      return {LadderWindow::symmetric(h), shift_at(h), last_change};
  }
  throw Error(ErrorCode::Convergence,
              "truncation did not converge up to " +
                  std::to_string(max_truncation_neighbors) +
                  " neighbors; last change " + std::to_string(last_change),
              "window");
}

} // namespace lightshift
