#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "lightshift/analytic.hpp"
#include "lightshift/error.hpp"
#include "lightshift/experiments.hpp"
#include "lightshift/ladder.hpp"
#include "lightshift/params.hpp"
#include "lightshift/pulse.hpp"

namespace lightshift {

using json = nlohmann::json;

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// ShiftResult <-> JSON

inline json to_json(const LatticeParams &p) {
  return {{"recoil_omega_K", p.recoil_omega_K},
          {"doppler_nu_K", p.doppler_nu_K},
          {"laser_phase_theta", p.laser_phase_theta},
          {"direction", std::string(to_string(p.direction))}};
}

inline json to_json(const ShiftResult &r) {
  json diag = json::object();
  for (const auto &[k, v] : r.diagnostics)
    diag[k] = v;
  return {{"phase", r.phase},
          {"method", std::string(to_string(r.method))},
          {"phi", r.phi},
          {"params", to_json(r.params)},
          {"diagnostics", diag}};
}

inline LatticeParams lattice_params_from_json(const json &j) {
  return {j.at("recoil_omega_K").get<double>(),
          j.at("doppler_nu_K").get<double>(),
          j.at("laser_phase_theta").get<double>(),
          parse_direction(j.at("direction").get<std::string>())};
}

inline ShiftResult shift_result_from_json(const json &j) {
  ShiftResult r;
  r.phase = j.at("phase").get<double>();
  r.method = parse_shift_method(j.at("method").get<std::string>());
  r.phi = j.at("phi").get<double>();
  r.params = lattice_params_from_json(j.at("params"));
  for (const auto &[k, v] : j.at("diagnostics").items())
    r.diagnostics[k] = v.get<double>();
  return r;
}

// ---------------------------------------------------------------------------
// Sweep tables

inline constexpr std::string_view csv_header =
    "ratio,method,phase_rad,phase_over_phi,phi,deviation_rel,error_code";

namespace detail {
inline std::string optional_number(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string();
}
} // namespace detail

inline void write_csv(std::ostream &out, const SweepTable &table,
                      const std::vector<ThresholdLine> &thresholds = {},
                      const std::optional<std::string> &meta = std::nullopt) {
  if (meta)
    out << "# " << *meta << '\n';
  out << csv_header << '\n';
  for (const auto &row : table.rows) {
    for (auto m : table.methods) {
      const auto &cell = row.cells.at(m);
      out << format_double(row.ratio) << ',' << to_string(m) << ','
          << detail::optional_number(cell.phase) << ','
          << detail::optional_number(cell.phase_over_phi) << ','
          << (cell.phase ? format_double(cell.phi) : std::string()) << ','
          << detail::optional_number(deviation_at(row, m)) << ','
          << cell.error_code << '\n';
    }
  }
  for (const auto &t : thresholds)
    out << ',' << t.label << ',' << format_double(t.phase_uncertainty) << ','
        << format_double(t.scaled_phase) << ','
        << format_double(t.phase_uncertainty / t.scaled_phase) << ",,\n";
}

inline json to_json(const SweepTable &table,
                    const std::vector<ThresholdLine> &thresholds = {}) {
  auto number_or_null = [](const std::optional<double> &v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json rows = json::array();
  for (const auto &row : table.rows) {
    for (auto m : table.methods) {
      const auto &cell = row.cells.at(m);
      json r = {{"ratio", row.ratio},
                {"method", std::string(to_string(m))},
                {"phase_rad", number_or_null(cell.phase)},
                {"phase_over_phi", number_or_null(cell.phase_over_phi)},
                {"phi", cell.phase ? json(cell.phi) : json(nullptr)},
                {"deviation_rel", number_or_null(deviation_at(row, m))},
                {"error_code", cell.error_code}};
      if (!cell.error_detail.empty())
        r["error_detail"] = cell.error_detail;
      rows.push_back(std::move(r));
    }
  }
  json lines = json::array();
  for (const auto &t : thresholds)
    lines.push_back({{"label", t.label},
                     {"phase_uncertainty", t.phase_uncertainty},
                     {"sigma", t.sigma},
                     {"omega_K", t.omega_K},
                     {"scaled_phase", t.scaled_phase}});
  return {{"rows", rows}, {"thresholds", lines}};
}

// ---------------------------------------------------------------------------
// Configuration files
//
// Flat key = value pairs grouped in sections:
//
//   [params]      theta, direction
//   [box_pulse]   peak_rabi_over_omega_K, duration_omega_K, target_area
//   [gaussian_pulse] peak_rabi_over_omega_K, sigma_omega_K, window_multiple,
//                 target_area
//   [pulse]       shape = box|gaussian plus the keys of that shape
//   [sweep]       grid = list|linear|log, values, lo, hi, step, count,
//                 methods, deviation_pairs, jobs
//   [integrator]  rel_tol, abs_tol, max_step_over_fastest_period,
//                 scheme = adaptive|rk4, steps_per_period, window, max_steps
//   [species]     name = rubidium, recoil_omega_K (rad/s)
//
// Frequencies are in units of omega_K and times in units of 1/omega_K,
// except in [species].

struct SweepConfig {
  SweepSpec spec;
  int jobs = 1;
  /// Set when a [species] section is present; enables threshold rows.
  std::optional<double> species_omega_K;
};

namespace detail {

using ptree = boost::property_tree::ptree;

inline std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos)
      out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline double parse_number(const std::string &text, const std::string &key) {
  double v = 0.0;
  const char *first = text.data();
  const char *last = first + text.size();
  while (first != last && (*first == ' ' || *first == '+'))
    ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    throw Error(ErrorCode::Config,
                "key '" + key + "' expects a number, got '" + text + "'", key);
  return v;
}

class Section {
public:
  Section(std::string name, const ptree *tree)
      : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> text(const std::string &key) {
    used_.insert(key);
    if (!tree_)
      return std::nullopt;
    if (auto v = tree_->get_optional<std::string>(key))
      return *v;
    return std::nullopt;
  }

  std::optional<double> number(const std::string &key) {
    if (auto t = text(key))
      return parse_number(*t, name_ + "." + key);
    return std::nullopt;
  }

  void reject_unknown() const {
    if (!tree_)
      return;
    for (const auto &[k, v] : *tree_)
      if (!used_.count(k))
        throw Error(ErrorCode::Config,
                    "unknown key '" + k + "' in [" + name_ + "]", name_ + "." + k);
  }

private:
  std::string name_;
  const ptree *tree_;
  std::set<std::string> used_;
};

inline PulseShape read_pulse(Section &s, const std::string &shape) {
  const double target = s.number("target_area").value_or(half_pi_area);
  const auto peak = s.number("peak_rabi_over_omega_K");
  PulseShape pulse;
  if (shape == "box") {
    const auto duration = s.number("duration_omega_K");
    if (duration)
      pulse = BoxPulse{peak.value_or(1.0), *duration};
    else if (peak && *peak > 0.0)
      pulse = BoxPulse{*peak, target / *peak};
    else
      throw Error(ErrorCode::Config,
                  "box pulse needs peak_rabi_over_omega_K or duration_omega_K",
                  "pulse");
  } else if (shape == "gaussian") {
    const double window =
        s.number("window_multiple").value_or(GaussianPulse::default_window);
    const auto sigma = s.number("sigma_omega_K");
    if (sigma) {
      pulse = GaussianPulse{peak.value_or(1.0), *sigma, window};
    } else if (peak && *peak > 0.0) {
      const double unit = pulse_area(GaussianPulse{1.0, 1.0, window});
      pulse = GaussianPulse{*peak, target / (*peak * unit), window};
    } else {
      throw Error(ErrorCode::Config,
                  "gaussian pulse needs peak_rabi_over_omega_K or sigma_omega_K",
                  "pulse");
    }
  } else {
    throw Error(ErrorCode::Config, "unknown pulse shape '" + shape + "'",
                "shape");
  }
  try {
    validate(pulse);
    return calibrate_peak(pulse, target);
  } catch (const Error &e) {
    throw Error(ErrorCode::Config, e.what(), e.detail());
  }
}

inline std::vector<double> read_grid(Section &s) {
  const std::string kind = s.text("grid").value_or("list");
  try {
    if (kind == "list") {
      const auto values = s.text("values");
      if (!values)
        throw Error(ErrorCode::Config, "[sweep] grid = list needs 'values'",
                    "sweep.values");
      std::vector<double> g;
      for (const auto &item : split_list(*values))
        g.push_back(parse_number(item, "sweep.values"));
      return g;
    }
    const auto lo = s.number("lo"), hi = s.number("hi");
    if (!lo || !hi)
      throw Error(ErrorCode::Config, "[sweep] grid needs 'lo' and 'hi'",
                  "sweep.lo");
    if (kind == "linear") {
      const auto step = s.number("step");
      if (!step)
        throw Error(ErrorCode::Config, "[sweep] linear grid needs 'step'",
                    "sweep.step");
      return linear_grid(*lo, *hi, *step);
    }
    if (kind == "log") {
      const auto count = s.number("count");
      if (!count)
        throw Error(ErrorCode::Config, "[sweep] log grid needs 'count'",
                    "sweep.count");
      return log_grid(*lo, *hi, static_cast<int>(*count));
    }
  } catch (const Error &e) {
    throw Error(ErrorCode::Config, e.what(), e.detail());
  }
  throw Error(ErrorCode::Config, "unknown grid kind '" + kind + "'",
              "sweep.grid");
}

} // namespace detail

inline SweepConfig parse_sweep_config(std::istream &in) {
  detail::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw Error(ErrorCode::Config, std::string("malformed config: ") + e.what(),
                "syntax");
  }
  static const std::set<std::string> known = {
      "params", "box_pulse", "gaussian_pulse", "pulse",
      "sweep",  "integrator", "species"};
  for (const auto &[name, sub] : tree) {
    if (!known.count(name))
      throw Error(ErrorCode::Config, "unknown section [" + name + "]", name);
    if (sub.empty() && !sub.data().empty())
      throw Error(ErrorCode::Config, "key '" + name + "' outside any section",
                  name);
  }
  auto section = [&](const std::string &name) {
    const auto it = tree.find(name);
    return detail::Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  SweepConfig cfg;
  auto &spec = cfg.spec;

  auto params = section("params");
  spec.theta = params.number("theta").value_or(0.0);
  if (auto d = params.text("direction")) {
    try {
      spec.direction = parse_direction(*d);
    } catch (const Error &e) {
      throw Error(ErrorCode::Config, e.what(), "params.direction");
    }
  }
  params.reject_unknown();

  auto box = section("box_pulse");
  if (box.present())
    spec.box_pulse = detail::read_pulse(box, "box");
  box.reject_unknown();
  auto gauss = section("gaussian_pulse");
  if (gauss.present())
    spec.gaussian_pulse = detail::read_pulse(gauss, "gaussian");
  gauss.reject_unknown();
  auto pulse = section("pulse");
  if (pulse.present()) {
    const auto shape = pulse.text("shape");
    if (!shape)
      throw Error(ErrorCode::Config, "[pulse] needs 'shape'", "pulse.shape");
    auto p = detail::read_pulse(pulse, *shape);
    (is_box(p) ? spec.box_pulse : spec.gaussian_pulse) = p;
  }
  pulse.reject_unknown();

  auto integ = section("integrator");
  auto &opts = spec.integrator;
  opts.rel_tol = integ.number("rel_tol").value_or(opts.rel_tol);
  opts.abs_tol = integ.number("abs_tol").value_or(opts.abs_tol);
  opts.max_step_over_fastest_period =
      integ.number("max_step_over_fastest_period")
          .value_or(opts.max_step_over_fastest_period);
  if (auto sch = integ.text("scheme")) {
    if (*sch == "adaptive")
      opts.scheme = IntegrationScheme::AdaptiveEmbedded;
    else if (*sch == "rk4")
      opts.scheme = IntegrationScheme::FixedStepClassic;
    else
      throw Error(ErrorCode::Config, "unknown scheme '" + *sch + "'",
                  "integrator.scheme");
  }
  if (auto s = integ.number("steps_per_period"))
    opts.fixed_steps_per_period = static_cast<int>(*s);
  if (auto s = integ.number("max_steps"))
    opts.max_steps = static_cast<std::size_t>(*s);
  if (auto w = integ.number("window"))
    spec.window = LadderWindow::symmetric(static_cast<int>(*w));
  integ.reject_unknown();
  try {
    validate(opts);
    validate(spec.window);
  } catch (const Error &e) {
    throw Error(ErrorCode::Config, e.what(), e.detail());
  }

  auto sweep = section("sweep");
  if (!sweep.present())
    throw Error(ErrorCode::Config, "missing [sweep] section", "sweep");
  spec.ratio_grid = detail::read_grid(sweep);
  for (const auto &m : detail::split_list(sweep.text("methods").value_or("")))
    spec.methods.push_back(parse_sweep_method(m));
  if (auto pairs = sweep.text("deviation_pairs")) {
    for (const auto &p : detail::split_list(*pairs)) {
      const auto colon = p.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorCode::Config,
                    "deviation pair must read subject:reference",
                    "sweep.deviation_pairs");
      spec.deviation_pairs.push_back(
          {parse_sweep_method(p.substr(0, colon)),
           parse_sweep_method(p.substr(colon + 1))});
    }
  }
  cfg.jobs = static_cast<int>(sweep.number("jobs").value_or(1));
  sweep.reject_unknown();

  auto sp = section("species");
  if (sp.present()) {
    const auto name = sp.text("name");
    const auto omega = sp.number("recoil_omega_K");
    if (omega)
      cfg.species_omega_K = *omega;
    else if (name && *name == "rubidium")
      cfg.species_omega_K = species::Rubidium87::nominal_recoil_omega;
    else
      throw Error(ErrorCode::Config,
                  "[species] needs name = rubidium or recoil_omega_K",
                  "species");
    if (!(*cfg.species_omega_K > 0.0))
      throw Error(ErrorCode::Config, "species recoil frequency must be positive",
                  "species.recoil_omega_K");
  }
  sp.reject_unknown();

  try {
    detail::validate(spec);
  } catch (const Error &e) {
    throw Error(ErrorCode::Config, e.what(), e.detail());
  }
  return cfg;
}

inline SweepConfig parse_sweep_config(const std::string &text) {
  std::istringstream in(text);
  return parse_sweep_config(in);
}

} // namespace lightshift
