#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lightshift/analytic.hpp"
#include "lightshift/error.hpp"
#include "lightshift/extraction.hpp"
#include "lightshift/ladder.hpp"
#include "lightshift/params.hpp"
#include "lightshift/pulse.hpp"

namespace lightshift {

/// Quantities a sweep can tabulate per Doppler ratio.
enum class SweepMethod {
  RamanAnalytic,
  BraggBoxAnalytic,
  AdiabaticAnalytic,
  NumericBox,
  NumericGaussian,
};

inline constexpr SweepMethod all_sweep_methods[] = {
    SweepMethod::RamanAnalytic, SweepMethod::BraggBoxAnalytic,
    SweepMethod::AdiabaticAnalytic, SweepMethod::NumericBox,
    SweepMethod::NumericGaussian};

constexpr std::string_view to_string(SweepMethod m) {
  switch (m) {
  case SweepMethod::RamanAnalytic: return "raman";
  case SweepMethod::BraggBoxAnalytic: return "bragg-box";
  case SweepMethod::AdiabaticAnalytic: return "adiabatic";
  case SweepMethod::NumericBox: return "numeric-box";
  case SweepMethod::NumericGaussian: return "numeric-gaussian";
  }
  return "unknown";
}

inline SweepMethod parse_sweep_method(std::string_view s) {
  for (auto m : all_sweep_methods)
    if (to_string(m) == s)
      return m;
  throw Error(ErrorCode::Config, "unknown sweep method '" + std::string(s) + "'",
              "methods");
}

constexpr bool is_numeric(SweepMethod m) {
  return m == SweepMethod::NumericBox || m == SweepMethod::NumericGaussian;
}

/// Analytic partner a numeric column is compared against.
constexpr std::optional<SweepMethod> analytic_partner(SweepMethod m) {
  if (m == SweepMethod::NumericBox)
    return SweepMethod::BraggBoxAnalytic;
  if (m == SweepMethod::NumericGaussian)
    return SweepMethod::AdiabaticAnalytic;
  return std::nullopt;
}

struct DeviationPair {
  SweepMethod subject;
  SweepMethod reference;
};

struct SweepSpec {
  std::vector<double> ratio_grid;
  /// Template for box-shaped methods. Templates are calibrated to pi/2 area
  /// before use; the calibrated peak is the Rabi frequency of the Raman and
  /// box closed forms.
  std::optional<PulseShape> box_pulse;
  /// Template for Gaussian methods; supplies the amplitude functional.
  std::optional<PulseShape> gaussian_pulse;
  double theta = 0.0;
  Direction direction = Direction::Plus;
  IntegratorOptions integrator;
  LadderWindow window = default_window;
  std::vector<SweepMethod> methods;
  /// Compared as |subject - reference| / |reference|. Empty means the
  /// numeric columns against their analytic partners.
  std::vector<DeviationPair> deviation_pairs;

  double rabi_over_omega() const {
    return box_pulse ? peak_rabi(ensure_calibrated(*box_pulse)) : 0.0;
  }
};

struct SweepCell {
  std::optional<double> phase;
  std::optional<double> phase_over_phi;
  double phi = 0.0;
  std::string error_code; // empty on success
  std::string error_detail;
};

struct SweepRow {
  double ratio = 0.0;
  std::map<SweepMethod, SweepCell> cells;
  /// Keyed by the subject method of each pair.
  std::map<SweepMethod, std::optional<double>> deviations;
};

struct SweepTable {
  std::vector<SweepMethod> methods;
  std::vector<DeviationPair> deviation_pairs;
  std::vector<SweepRow> rows;

  const SweepRow &row_at(double ratio) const {
    for (const auto &r : rows)
      if (r.ratio == ratio)
        return r;
    throw Error(ErrorCode::InvalidInput, "ratio not in table", "ratio");
  }
};

inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo))
    throw Error(ErrorCode::InvalidInput, "bad linear grid", "grid");
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n));
  // Snap to 1e-9 so that e.g. 3 + 30 * 0.1 lands exactly on 6.
  for (int i = 0; i < n; ++i)
    g.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return g;
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw Error(ErrorCode::InvalidInput, "bad log grid", "grid");
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i)
    g.push_back(std::exp(a + (b - a) * i / (count - 1)));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace detail {

inline std::vector<DeviationPair> effective_pairs(const SweepSpec &spec) {
  if (!spec.deviation_pairs.empty())
    return spec.deviation_pairs;
  std::vector<DeviationPair> pairs;
  for (auto m : spec.methods)
    if (auto partner = analytic_partner(m);
        partner && std::find(spec.methods.begin(), spec.methods.end(),
                             *partner) != spec.methods.end())
      pairs.push_back({m, *partner});
  return pairs;
}

inline void validate(const SweepSpec &spec) {
  if (spec.ratio_grid.empty())
    throw Error(ErrorCode::InvalidInput, "empty ratio grid", "ratio_grid");
  if (spec.methods.empty())
    throw Error(ErrorCode::InvalidInput, "no methods requested", "methods");
  for (std::size_t i = 1; i < spec.ratio_grid.size(); ++i)
    if (!(spec.ratio_grid[i] > spec.ratio_grid[i - 1]))
      throw Error(ErrorCode::InvalidInput,
                  "ratio grid must be strictly increasing", "ratio_grid");
  const bool any_numeric =
      std::any_of(spec.methods.begin(), spec.methods.end(), is_numeric);
  if (any_numeric && !(spec.ratio_grid.front() >= 0.5))
    throw Error(ErrorCode::InvalidInput,
                "numeric methods need ratios >= 0.5", "ratio_grid");
  for (auto m : spec.methods) {
    const bool box = m == SweepMethod::RamanAnalytic ||
                     m == SweepMethod::BraggBoxAnalytic ||
                     m == SweepMethod::NumericBox;
    if (box && !spec.box_pulse)
      throw Error(ErrorCode::InvalidInput,
                  std::string(to_string(m)) + " needs a box pulse", "box_pulse");
    if (!box && !spec.gaussian_pulse)
      throw Error(ErrorCode::InvalidInput,
                  std::string(to_string(m)) + " needs a gaussian pulse",
                  "gaussian_pulse");
  }
  for (const auto &p : spec.deviation_pairs)
    for (auto m : {p.subject, p.reference})
      if (std::find(spec.methods.begin(), spec.methods.end(), m) ==
          spec.methods.end())
        throw Error(ErrorCode::InvalidInput,
                    "deviation pair refers to a method not in the sweep",
                    "deviation_pairs");
}

} // namespace detail

/// The single-point operation behind one sweep cell. Sweeps call exactly
/// this, so every cell is reproducible in isolation.
inline ShiftResult evaluate_method(SweepMethod method, double ratio,
                                   const SweepSpec &spec) {
  const auto params = dimensionless_params(ratio, spec.theta, spec.direction);
  switch (method) {
  case SweepMethod::RamanAnalytic:
    return raman_shift(spec.rabi_over_omega(), params);
  case SweepMethod::BraggBoxAnalytic:
    return bragg_box_shift(spec.rabi_over_omega(), params);
  case SweepMethod::AdiabaticAnalytic:
    return adiabatic_shift(ensure_calibrated(*spec.gaussian_pulse), params);
  case SweepMethod::NumericBox:
    return simulate_light_shift(params, *spec.box_pulse, spec.integrator,
                                spec.window);
  case SweepMethod::NumericGaussian:
    return simulate_light_shift(params, *spec.gaussian_pulse, spec.integrator,
                                spec.window);
  }
  throw Error(ErrorCode::InvalidInput, "unknown method", "method");
}

inline SweepCell evaluate_cell(SweepMethod method, double ratio,
                               const SweepSpec &spec) {
  SweepCell cell;
  try {
    const auto r = evaluate_method(method, ratio, spec);
    cell.phase = r.phase;
    cell.phi = r.phi;
    if (r.phi != 0.0)
      cell.phase_over_phi = r.phase / r.phi;
  } catch (const Error &e) {
    cell.error_code = std::string(to_string(e.code()));
    cell.error_detail = e.detail();
  }
  return cell;
}

inline std::optional<double> relative_deviation(const SweepCell &subject,
                                                const SweepCell &reference) {
  if (!subject.phase || !reference.phase || *reference.phase == 0.0)
    return std::nullopt;
  return std::abs(*subject.phase - *reference.phase) / std::abs(*reference.phase);
}

/// Tabulate every requested method on the ratio grid. Cells that fail
/// (poles, regime guard, ...) carry an error code instead of a value; the
/// sweep itself only throws for an invalid spec. `jobs` > 1 evaluates rows
/// concurrently; row order and values do not depend on it.
inline SweepTable sweep_doppler(const SweepSpec &spec, int jobs = 1) {
  detail::validate(spec);
  SweepTable table{spec.methods, detail::effective_pairs(spec), {}};
  table.rows.resize(spec.ratio_grid.size());

  auto fill_row = [&](std::size_t i) {
    SweepRow &row = table.rows[i];
    row.ratio = spec.ratio_grid[i];
    for (auto m : spec.methods)
      row.cells[m] = evaluate_cell(m, row.ratio, spec);
    for (const auto &p : table.deviation_pairs)
      row.deviations[p.subject] =
          relative_deviation(row.cells.at(p.subject), row.cells.at(p.reference));
  };

  const std::size_t n = table.rows.size();
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fill_row(i);
  } else {
    // Strided partition; each worker owns disjoint rows.
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w)
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < n; i += workers)
          fill_row(i);
      }));
    for (auto &t : tasks)
      t.get();
  }
  return table;
}

/// Sweep restricted to deviation reporting; requires at least one pair.
inline SweepTable deviation_curve(const SweepSpec &spec, int jobs = 1) {
  if (detail::effective_pairs(spec).empty())
    throw Error(ErrorCode::InvalidInput,
                "deviation curve needs a numeric/analytic pair",
                "deviation_pairs");
  return sweep_doppler(spec, jobs);
}

inline std::optional<double> deviation_at(const SweepRow &row,
                                          SweepMethod subject) {
  const auto it = row.deviations.find(subject);
  return it == row.deviations.end() ? std::nullopt : it->second;
}

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  /// Root-mean-square residual of log|phase|.
  double residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log|y| against log x.
inline PowerLawFit fit_power_law(const std::vector<double> &x,
                                 const std::vector<double> &y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::Fit, "abscissa/ordinate size mismatch", "size");
  if (x.size() < 5)
    throw Error(ErrorCode::Fit, "power-law fit needs at least 5 points",
                "points");
  const bool positive = y.front() > 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0 || !std::isfinite(y[i]))
      throw Error(ErrorCode::Fit, "zero or non-finite value in fit window",
                  "zero");
    if ((y[i] > 0.0) != positive)
      throw Error(ErrorCode::Fit, "sign change in fit window", "sign");
    if (!(x[i] > 0.0))
      throw Error(ErrorCode::Fit, "abscissa must be positive", "ratio");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0))
    throw Error(ErrorCode::Fit, "degenerate abscissa", "ratio");
  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.log_prefactor = (sy - fit.exponent * sx) / n;
  fit.points = x.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(std::abs(y[i])) -
                     (fit.log_prefactor + fit.exponent * std::log(x[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

inline PowerLawFit fit_power_law(const SweepTable &table, SweepMethod method,
                                 double lo, double hi) {
  std::vector<double> x, y;
  for (const auto &row : table.rows) {
    if (row.ratio < lo || row.ratio > hi)
      continue;
    const auto it = row.cells.find(method);
    if (it == row.cells.end())
      throw Error(ErrorCode::Fit, "method not in table", "method");
    if (!it->second.phase)
      throw Error(ErrorCode::Fit,
                  "missing value in fit window (" + it->second.error_code + ")",
                  "missing");
    x.push_back(row.ratio);
    y.push_back(*it->second.phase);
  }
  return fit_power_law(x, y);
}

struct ThresholdPreset {
  std::string label;
  double phase_uncertainty = 0.0; // rad
  double sigma = 0.0;             // s
};

/// Phase sensitivities of two Bragg/Raman interferometers operated with
/// Gaussian pulses of the given width.
inline std::vector<ThresholdPreset> threshold_presets() {
  return {{"threshold-1.5mrad-15us", 1.5e-3, 15e-6},
          {"threshold-2mrad-35us", 2e-3, 35e-6}};
}

struct ThresholdLine {
  std::string label;
  double phase_uncertainty = 0.0;
  double sigma = 0.0;
  double omega_K = 0.0;
  /// Uncertainty in units of the pi/2 Gaussian's amplitude functional.
  double scaled_phase = 0.0;
};

/// uncertainty x (16 / sqrt(pi)) omega_K sigma, i.e. the uncertainty divided
/// by the amplitude functional of a pi/2 Gaussian pulse of width sigma.
inline ThresholdLine threshold_line(const ThresholdPreset &preset,
                                    double omega_K) {
  const double inverse_phi =
      16.0 / std::sqrt(std::numbers::pi) * omega_K * preset.sigma;
  return {preset.label, preset.phase_uncertainty, preset.sigma, omega_K,
          preset.phase_uncertainty * inverse_phi};
}

inline std::vector<ThresholdLine>
threshold_lines(double omega_K = species::Rubidium87::nominal_recoil_omega) {
  std::vector<ThresholdLine> lines;
  for (const auto &p : threshold_presets())
    lines.push_back(threshold_line(p, omega_K));
  return lines;
}

/// Parameters of the figure-reproduction tables.
struct FigureSettings {
  double box_rabi = 0.125;     // Omega0 / omega_K; pulse lasts 4 pi / omega_K
  double gaussian_sigma = 8.0; // omega_K sigma
  double gaussian_window = GaussianPulse::default_window;
  double scaling_lo = 1.0, scaling_hi = 100.0;
  int scaling_points = 200;
  double deviation_lo = 3.0, deviation_hi = 12.0, deviation_step = 0.1;
  double theta = 0.0;
  Direction direction = Direction::Plus;
  IntegratorOptions integrator;
  LadderWindow window = default_window;
};

inline SweepSpec scaling_spec(const FigureSettings &s) {
  SweepSpec spec;
  spec.ratio_grid = log_grid(s.scaling_lo, s.scaling_hi, s.scaling_points);
  spec.box_pulse = PulseShape(half_pi_box(s.box_rabi));
  spec.gaussian_pulse =
      PulseShape(half_pi_gaussian(s.gaussian_sigma, s.gaussian_window));
  spec.theta = s.theta;
  spec.direction = s.direction;
  spec.integrator = s.integrator;
  spec.window = s.window;
  spec.methods = {all_sweep_methods, all_sweep_methods + 5};
  return spec;
}

inline SweepSpec deviation_spec(const FigureSettings &s) {
  SweepSpec spec = scaling_spec(s);
  spec.ratio_grid = linear_grid(s.deviation_lo, s.deviation_hi, s.deviation_step);
  spec.methods = {SweepMethod::BraggBoxAnalytic, SweepMethod::AdiabaticAnalytic,
                  SweepMethod::NumericBox, SweepMethod::NumericGaussian};
  return spec;
}

} // namespace lightshift
