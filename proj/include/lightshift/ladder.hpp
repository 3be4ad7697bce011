#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lightshift/error.hpp"
#include "lightshift/integrator.hpp"
#include "lightshift/params.hpp"
#include "lightshift/pulse.hpp"

namespace lightshift {

/// Inclusive range of ladder indices n; the state |p0 + n hbar K> has
/// amplitude g_n.
struct LadderWindow {
  int n_min = -5;
  int n_max = 6;

  /// Resonant pair {0, 1} plus `neighbors` extra states on each side.
  static constexpr LadderWindow symmetric(int neighbors) {
    return {-neighbors, 1 + neighbors};
  }
  constexpr int size() const { return n_max - n_min + 1; }
  constexpr int largest_index() const {
    return std::max(n_min < 0 ? -n_min : n_min, n_max < 0 ? -n_max : n_max);
  }
  constexpr int neighbors() const { return -n_min; }

  friend bool operator==(const LadderWindow &, const LadderWindow &) = default;
};

inline constexpr LadderWindow default_window = LadderWindow::symmetric(5);

inline void validate(const LadderWindow &w) {
  if (!(w.n_min <= 0 && w.n_max >= 1))
    throw Error(ErrorCode::InvalidInput,
                "ladder window must contain the resonant pair n = 0, 1",
                "window");
}

class LadderState {
public:
  LadderState() : LadderState(default_window) {}

  /// Atom in g_0, all other amplitudes zero.
  explicit LadderState(LadderWindow window, double time = 0.0)
      : window_(window), amplitudes_(static_cast<std::size_t>(window.size())),
        time_(time) {
    validate(window_);
    amplitudes_[index(0)] = 1.0;
  }

  LadderState(LadderWindow window, std::vector<cplx> amplitudes, double time)
      : window_(window), amplitudes_(std::move(amplitudes)), time_(time) {
    validate(window_);
    if (amplitudes_.size() != static_cast<std::size_t>(window_.size()))
      throw Error(ErrorCode::InvalidInput,
                  "amplitude count does not match the ladder window",
                  "amplitudes");
  }

  const LadderWindow &window() const { return window_; }
  int n_min() const { return window_.n_min; }
  int n_max() const { return window_.n_max; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  bool contains(int n) const { return n >= window_.n_min && n <= window_.n_max; }
  std::size_t index(int n) const {
    return static_cast<std::size_t>(n - window_.n_min);
  }

  cplx operator[](int n) const { return amplitudes_[index(n)]; }
  cplx &operator[](int n) { return amplitudes_[index(n)]; }

  std::span<const cplx> amplitudes() const { return amplitudes_; }
  std::vector<cplx> &amplitudes() { return amplitudes_; }

  friend bool operator==(const LadderState &, const LadderState &) = default;

private:
  LadderWindow window_;
  std::vector<cplx> amplitudes_;
  double time_ = 0.0;
};

inline double norm(const LadderState &state) {
  double s = 0.0;
  for (const auto &g : state.amplitudes())
    s += std::norm(g);
  return s;
}

/// Full keeps every coupling of the retroreflected geometry; ResonantOnly
/// keeps only the time-independent g_0 <-> g_1 coupling, i.e. an ideal
/// two-level Rabi problem that serves as the zero of the light-shift phase.
enum class CouplingMode { Full, ResonantOnly };

enum class IntegrationScheme { AdaptiveEmbedded, FixedStepClassic };

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Upper bound on the step in units of the fastest coefficient period.
  double max_step_over_fastest_period = 0.1;
  IntegrationScheme scheme = IntegrationScheme::AdaptiveEmbedded;
  /// Minimum steps per fastest period for the fixed-step scheme.
  int fixed_steps_per_period = 50;
  std::size_t max_steps = 20'000'000;

  friend bool operator==(const IntegratorOptions &,
                         const IntegratorOptions &) = default;
};

inline void validate(const IntegratorOptions &o) {
  if (!(o.rel_tol > 0.0) || !(o.abs_tol > 0.0))
    throw Error(ErrorCode::InvalidInput, "tolerances must be positive",
                "tolerance");
  if (!(o.max_step_over_fastest_period > 0.0 &&
        o.max_step_over_fastest_period <= 0.1))
    throw Error(ErrorCode::InvalidInput,
                "max step must be in (0, 0.1] fastest periods",
                "max_step_over_fastest_period");
  if (o.fixed_steps_per_period < 50)
    throw Error(ErrorCode::InvalidInput,
                "fixed-step scheme needs >= 50 steps per fastest period",
                "fixed_steps_per_period");
}

/// Right-hand side of the momentum-ladder equations,
///
///   dg_n/dt = i Omega(t)/2 [e^{-i theta} e^{2i(n w + nu)t} + e^{i theta} e^{2i(n-1) w t}] g_{n-1}
///           + i Omega(t)/2 [e^{i theta} e^{-2i((n+1) w + nu)t} + e^{-i theta} e^{-2i n w t}] g_{n+1},
///
/// with w the recoil frequency and nu the signed Doppler frequency.
/// Amplitudes outside the window are zero.
class LadderSystem {
public:
  LadderSystem(LadderWindow window, double omega_K, double nu, double theta,
               PulseShape pulse, CouplingMode mode)
      : window_(window), omega_(omega_K), nu_(nu), pulse_(std::move(pulse)),
        mode_(mode), phase_plus_(std::polar(1.0, theta)),
        powers_(static_cast<std::size_t>(window.size()) + 1) {
    validate(window_);
  }

  /// Period of the fastest coefficient oscillation in the window.
  double fastest_period() const {
    const double fastest =
        2.0 * ((window_.largest_index() + 1) * omega_ + std::abs(nu_));
    return 2.0 * std::numbers::pi / fastest;
  }

  const LadderWindow &window() const { return window_; }
  const PulseShape &pulse() const { return pulse_; }
  CouplingMode mode() const { return mode_; }

  void operator()(double t, std::span<const cplx> g, std::span<cplx> dg) {
    std::fill(dg.begin(), dg.end(), cplx{});
    const double rabi = amplitude_at(pulse_, t);
    if (rabi == 0.0)
      return;
    const cplx half_i_rabi{0.0, 0.5 * rabi};
    const auto i0 = static_cast<std::size_t>(-window_.n_min);

    if (mode_ == CouplingMode::ResonantOnly) {
      dg[i0 + 1] += half_i_rabi * phase_plus_ * g[i0];
      dg[i0] += half_i_rabi * std::conj(phase_plus_) * g[i0 + 1];
      return;
    }

    // powers_[k] = z^(n_min - 1 + k), z = e^{2 i w t}
    const cplx z = std::polar(1.0, 2.0 * omega_ * t);
    powers_[0] = std::polar(1.0, 2.0 * omega_ * (window_.n_min - 1) * t);
    for (std::size_t k = 1; k < powers_.size(); ++k)
      powers_[k] = powers_[k - 1] * z;
    const cplx doppler = std::conj(phase_plus_) * std::polar(1.0, 2.0 * nu_ * t);

    // Link between g_{n-1} and g_n for n = n_min + 1 .. n_max; the coupling
    // back from g_n to g_{n-1} is the conjugate.
    for (std::size_t k = 1; k < g.size(); ++k) {
      // n = n_min + k: z^n = powers_[k + 1], z^(n-1) = powers_[k]
      const cplx link = doppler * powers_[k + 1] + phase_plus_ * powers_[k];
      dg[k] += half_i_rabi * link * g[k - 1];
      dg[k - 1] += half_i_rabi * std::conj(link) * g[k];
    }
  }

private:
  LadderWindow window_;
  double omega_;
  double nu_;
  PulseShape pulse_;
  CouplingMode mode_;
  cplx phase_plus_; // e^{i theta}
  std::vector<cplx> powers_;
};

inline void check_regime(double omega_K, double nu, CouplingMode mode) {
  if (mode == CouplingMode::Full && !(std::abs(nu) >= 0.5 * omega_K))
    throw Error(ErrorCode::Regime,
                "double-diffraction regime (|nu_K| < omega_K/2); single-Bragg "
                "resonance identification invalid",
                "nu");
}

/// Time derivative of every amplitude in the state's window.
inline std::vector<cplx> rhs(const LadderState &state, double t,
                             const LatticeParams &params,
                             const PulseShape &pulse, CouplingMode mode) {
  LadderSystem system(state.window(), params.recoil_omega_K,
                      effective_doppler(params), params.laser_phase_theta,
                      pulse, mode);
  std::vector<cplx> out(state.amplitudes().size());
  system(t, state.amplitudes(), out);
  return out;
}

struct EvolveDiagnostics {
  IntegratorStats stats;
  double max_norm_defect = 0.0; // over accepted steps
  double final_norm_defect = 0.0;
  double max_step_allowed = 0.0;
};

struct Evolution {
  LadderState state;
  EvolveDiagnostics diagnostics;
};

/// Called after every accepted step with the current state.
using StepObserver = std::function<void(const LadderState &)>;

/// Evolve amplitudes given at the start of the pulse support across the
/// whole support. The Doppler frequency used is the signed value `nu`.
inline Evolution evolve_signed(const LadderState &initial, double omega_K,
                               double nu, double theta, const PulseShape &pulse,
                               CouplingMode mode, const IntegratorOptions &opts,
                               const StepObserver &observer = {}) {
  if (!(omega_K > 0.0))
    throw Error(ErrorCode::InvalidInput, "recoil frequency must be positive",
                "omega_K");
  validate(opts);
  validate(pulse);
  check_regime(omega_K, nu, mode);

  LadderSystem system(initial.window(), omega_K, nu, theta, pulse, mode);
  const auto span = support(pulse);
  const double max_step =
      opts.max_step_over_fastest_period * system.fastest_period();

  Evolution out{initial, {}};
  out.state.set_time(span.begin);
  out.diagnostics.max_step_allowed = max_step;
  const double initial_norm = norm(initial);

  LadderState scratch = out.state;
  auto watch = [&](double t, std::span<const cplx> y) {
    double s = 0.0;
    for (const auto &g : y)
      s += std::norm(g);
    out.diagnostics.max_norm_defect =
        std::max(out.diagnostics.max_norm_defect, std::abs(s - initial_norm));
    if (observer) {
      std::copy(y.begin(), y.end(), scratch.amplitudes().begin());
      scratch.set_time(t);
      observer(scratch);
    }
  };

  auto &y = out.state.amplitudes();
  if (opts.scheme == IntegrationScheme::AdaptiveEmbedded) {
    AdaptiveSettings cfg{opts.rel_tol, opts.abs_tol, max_step, opts.max_steps};
    out.diagnostics.stats =
        integrate_adaptive(system, y, span.begin, span.end, cfg, watch);
  } else {
    const double fixed = std::min(
        max_step, system.fastest_period() / opts.fixed_steps_per_period);
    if ((span.length() / fixed) > static_cast<double>(opts.max_steps))
      throw Error(ErrorCode::IntegrationFailure,
                  "fixed-step scheme would exceed the step budget",
                  "max_steps");
    out.diagnostics.stats =
        integrate_fixed_rk4(system, y, span.begin, span.end, fixed, watch);
  }
  out.state.set_time(span.end);
  out.diagnostics.final_norm_defect = std::abs(norm(out.state) - initial_norm);
  return out;
}

inline Evolution evolve(const LadderState &initial, const LatticeParams &params,
                        const PulseShape &pulse, CouplingMode mode,
                        const IntegratorOptions &opts,
                        const StepObserver &observer = {}) {
  return evolve_signed(initial, params.recoil_omega_K,
                       effective_doppler(params), params.laser_phase_theta,
                       pulse, mode, opts, observer);
}

} // namespace lightshift
