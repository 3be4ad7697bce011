#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lightshift/analytic.hpp"
#include "lightshift/error.hpp"
#include "lightshift/experiments.hpp"
#include "lightshift/extraction.hpp"
#include "lightshift/io.hpp"

namespace lightshift {

namespace cli_detail {

inline std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::optional<std::string> meta_line(bool no_meta,
                                            const std::string &what) {
  if (no_meta)
    return std::nullopt;
  return "generated " + timestamp_utc() + " by lightshift " + what;
}

struct PulseArgs {
  std::string shape = "box";
  std::optional<double> rabi;
  std::optional<double> sigma;
  std::optional<double> duration;
  double window_multiple = GaussianPulse::default_window;

  void add_to(CLI::App &app) {
    app.add_option("--pulse", shape, "Pulse shape")
        ->check(CLI::IsMember({"box", "gaussian"}));
    app.add_option("--rabi", rabi, "Peak Rabi frequency / omega_K");
    app.add_option("--sigma-omega", sigma, "Gaussian width x omega_K");
    app.add_option("--duration-omega", duration, "Box duration x omega_K");
    app.add_option("--window-multiple", window_multiple,
                   "Gaussian cut-off in units of sigma");
  }

  /// pi/2 pulse from whichever of peak / width was given. Defaults are the
  /// figure settings.
  PulseShape build() const {
    const FigureSettings defaults;
    if (shape == "box") {
      if (duration)
        return calibrate_peak(BoxPulse{rabi.value_or(1.0), *duration},
                              half_pi_area);
      return half_pi_box(rabi.value_or(defaults.box_rabi));
    }
    if (sigma)
      return half_pi_gaussian(*sigma, window_multiple);
    if (rabi) {
      if (!(*rabi > 0.0))
        throw Error(ErrorCode::Usage, "--rabi must be positive", "rabi");
      const double unit = pulse_area(GaussianPulse{1.0, 1.0, window_multiple});
      return half_pi_gaussian(half_pi_area / (*rabi * unit), window_multiple);
    }
    return half_pi_gaussian(defaults.gaussian_sigma, window_multiple);
  }
};

inline json pulse_json(const PulseShape &p) {
  json j = {{"shape", shape_name(p)}, {"peak_rabi", peak_rabi(p)},
            {"area", pulse_area(p)}};
  if (const auto *b = std::get_if<BoxPulse>(&p))
    j["duration"] = b->duration;
  else {
    const auto &g = std::get<GaussianPulse>(p);
    j["sigma"] = g.sigma;
    j["window_multiple"] = g.window_multiple;
  }
  return j;
}

inline json settings_json(const FigureSettings &s) {
  return {{"box_rabi_over_omega_K", s.box_rabi},
          {"gaussian_sigma_omega_K", s.gaussian_sigma},
          {"gaussian_window_multiple", s.gaussian_window},
          {"scaling_grid", {{"kind", "log"}, {"lo", s.scaling_lo},
                            {"hi", s.scaling_hi}, {"count", s.scaling_points}}},
          {"deviation_grid", {{"kind", "linear"}, {"lo", s.deviation_lo},
                              {"hi", s.deviation_hi},
                              {"step", s.deviation_step}}},
          {"theta", s.theta},
          {"direction", std::string(to_string(s.direction))},
          {"rel_tol", s.integrator.rel_tol},
          {"abs_tol", s.integrator.abs_tol},
          {"max_step_over_fastest_period",
           s.integrator.max_step_over_fastest_period},
          {"n_min", s.window.n_min},
          {"n_max", s.window.n_max},
          {"threshold_omega_K", species::Rubidium87::nominal_recoil_omega}};
}

inline void write_file(const std::filesystem::path &path,
                       const std::string &contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error(ErrorCode::Usage, "cannot write " + path.string(), "out");
  f << contents;
}

} // namespace cli_detail

/// Names of the files written by the figure3 subcommand.
inline constexpr const char *figure3_panel_a = "figure3_panel_a.csv";
inline constexpr const char *figure3_panel_b = "figure3_panel_b.csv";
inline constexpr const char *figure3_settings = "figure3_settings.json";

/// Entry point of the command-line tool. Returns 0 on success, 1 on a
/// domain error (pole, regime, integration) and 2 on a usage or config
/// error. Errors are reported on `err` as a single line
///   error code=<code> detail=<detail> message="<text>"
/// `args` excludes the program name.
inline int run_cli(const std::vector<std::string> &args, std::ostream &out,
                   std::ostream &err) {
  using namespace cli_detail;
  CLI::App app{"Two-photon light shifts in retroreflective Bragg diffraction",
               "lightshift"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // analytic -----------------------------------------------------------------
  auto *analytic = app.add_subcommand("analytic", "Evaluate a closed form");
  std::string model;
  double ratio = 0.0, theta = 0.0;
  double rabi_analytic = FigureSettings{}.box_rabi;
  std::optional<double> phi;
  std::string direction = "plus";
  analytic->add_option("--model", model, "Closed form")
      ->required()
      ->check(CLI::IsMember({"raman", "bragg-box", "adiabatic",
                             "asymptotic-box", "asymptotic-ad"}));
  analytic->add_option("--ratio", ratio, "nu_K / omega_K")->required();
  analytic->add_option("--rabi", rabi_analytic,
                       "Rabi frequency / omega_K (for adiabatic models: "
                       "Gaussian peak, used when --phi is absent)");
  analytic->add_option("--phi", phi, "Amplitude functional");
  analytic->add_option("--direction", direction)
      ->check(CLI::IsMember({"plus", "minus"}));
  analytic->add_option("--theta", theta, "Laser phase difference (rad)");

  // simulate -----------------------------------------------------------------
  auto *simulate = app.add_subcommand("simulate", "Integrate the ladder");
  PulseArgs sim_pulse;
  sim_pulse.add_to(*simulate);
  int neighbors = default_window.neighbors();
  IntegratorOptions sim_opts;
  std::string scheme = "adaptive";
  simulate->add_option("--ratio", ratio, "nu_K / omega_K")->required();
  simulate->add_option("--theta", theta, "Laser phase difference (rad)");
  simulate->add_option("--direction", direction)
      ->check(CLI::IsMember({"plus", "minus"}));
  simulate->add_option("--window", neighbors,
                       "Ladder states kept on each side of the resonant pair")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--rel-tol", sim_opts.rel_tol);
  simulate->add_option("--abs-tol", sim_opts.abs_tol);
  simulate->add_option("--scheme", scheme)
      ->check(CLI::IsMember({"adaptive", "rk4"}));

  // sweep --------------------------------------------------------------------
  auto *sweep = app.add_subcommand("sweep", "Tabulate methods over a grid");
  std::string config_path, out_path, format = "csv";
  bool no_meta = false;
  std::optional<int> jobs;
  sweep->add_option("--config", config_path, "Configuration file")->required();
  sweep->add_option("--out", out_path, "Output file (default stdout)");
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sweep->add_flag("--no-meta", no_meta, "Omit the timestamp line");
  sweep->add_option("--jobs", jobs, "Concurrent rows")->check(CLI::PositiveNumber);

  // figure3 ------------------------------------------------------------------
  auto *figure = app.add_subcommand(
      "figure3", "Scaling and deviation tables with threshold lines");
  std::string out_dir = ".";
  figure->add_option("--out-dir", out_dir, "Output directory");
  figure->add_flag("--no-meta", no_meta, "Omit the timestamp line");
  figure->add_option("--jobs", jobs, "Concurrent rows")->check(CLI::PositiveNumber);

  // convergence --------------------------------------------------------------
  auto *convergence = app.add_subcommand(
      "convergence", "Truncation and tolerance convergence report");
  PulseArgs conv_pulse;
  conv_pulse.add_to(*convergence);
  double conv_tol = 1e-6, base_rel_tol = 1e-9;
  convergence->add_option("--ratio", ratio, "nu_K / omega_K")->required();
  convergence->add_option("--theta", theta, "Laser phase difference (rad)");
  convergence->add_option("--direction", direction)
      ->check(CLI::IsMember({"plus", "minus"}));
  convergence->add_option("--conv-tol", conv_tol, "Truncation tolerance (rad)");
  convergence->add_option("--rel-tol", base_rel_tol,
                          "Loosest tolerance of the halving study");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error code=usage detail=arguments message=\"" << e.what()
        << "\"\n";
    return 2;
  }

  try {
    const auto params =
        dimensionless_params(ratio, theta, parse_direction(direction));

    if (*analytic) {
      ShiftResult r;
      if (model == "raman")
        r = raman_shift(rabi_analytic, params);
      else if (model == "bragg-box")
        r = bragg_box_shift(rabi_analytic, params);
      else {
        const double p =
            phi.value_or(rabi_analytic / (4.0 * std::numbers::sqrt2));
        if (model == "adiabatic")
          r = adiabatic_shift(p, params);
        else if (model == "asymptotic-ad")
          r = asymptotic_shift(AsymptoticModel::AdiabaticLeading, p, params);
        else
          r = asymptotic_shift(AsymptoticModel::BoxLeading, rabi_analytic,
                               params);
      }
      out << to_json(r).dump(2) << '\n';
      return 0;
    }

    if (*simulate) {
      sim_opts.scheme = scheme == "rk4" ? IntegrationScheme::FixedStepClassic
                                        : IntegrationScheme::AdaptiveEmbedded;
      const auto pulse = sim_pulse.build();
      const auto r = simulate_light_shift(params, pulse, sim_opts,
                                          LadderWindow::symmetric(neighbors));
      auto j = to_json(r);
      j["pulse"] = pulse_json(pulse);
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*sweep) {
      std::ifstream in(config_path);
      if (!in)
        throw Error(ErrorCode::Config, "cannot open config " + config_path,
                    "config");
      const auto cfg = parse_sweep_config(in);
      const auto table = sweep_doppler(cfg.spec, jobs.value_or(cfg.jobs));
      std::vector<ThresholdLine> thresholds;
      if (cfg.species_omega_K)
        thresholds = threshold_lines(*cfg.species_omega_K);
      std::ostringstream buf;
      if (format == "json") {
        auto j = to_json(table, thresholds);
        if (auto m = meta_line(no_meta, "sweep"))
          j["meta"] = *m;
        buf << j.dump(2) << '\n';
      } else {
        write_csv(buf, table, thresholds, meta_line(no_meta, "sweep"));
      }
      if (out_path.empty())
        out << buf.str();
      else
        write_file(out_path, buf.str());
      return 0;
    }

    if (*figure) {
      const FigureSettings settings;
      const int workers = jobs.value_or(1);
      const auto scaling = sweep_doppler(scaling_spec(settings), workers);
      const auto deviation = deviation_curve(deviation_spec(settings), workers);
      const auto meta = meta_line(no_meta, "figure3");

      std::filesystem::path dir(out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      std::ostringstream a, b;
      write_csv(a, scaling, threshold_lines(), meta);
      write_csv(b, deviation, {}, meta);
      write_file(dir / figure3_panel_a, a.str());
      write_file(dir / figure3_panel_b, b.str());
      write_file(dir / figure3_settings, settings_json(settings).dump(2) + "\n");
      out << (dir / figure3_panel_a).string() << '\n'
          << (dir / figure3_panel_b).string() << '\n'
          << (dir / figure3_settings).string() << '\n';
      return 0;
    }

    if (*convergence) {
      const auto pulse = conv_pulse.build();
      const IntegratorOptions defaults;
      json windows = json::array();
      for (int h = 0; h <= 8; ++h) {
        const auto r = simulate_light_shift(params, pulse, defaults,
                                            LadderWindow::symmetric(h));
        windows.push_back({{"neighbors", h}, {"phase", r.phase}});
      }
      const auto trunc = auto_truncate(params, pulse, conv_tol);
      json tolerances = json::array();
      double previous = std::nan("");
      for (int k = 0; k < 6; ++k) {
        IntegratorOptions o;
        o.rel_tol = base_rel_tol / std::pow(2.0, k);
        o.abs_tol = o.rel_tol * 1e-2;
        const auto r = simulate_light_shift(params, pulse, o, trunc.window);
        json entry = {{"rel_tol", o.rel_tol}, {"phase", r.phase},
                      {"accepted_steps", r.diagnostics.at("accepted_steps")}};
        if (!std::isnan(previous))
          entry["change"] = std::abs(r.phase - previous);
        previous = r.phase;
        tolerances.push_back(entry);
      }
      json report = {
          {"params", to_json(params)},
          {"pulse", pulse_json(pulse)},
          {"window_study", windows},
          {"auto_truncate", {{"n_min", trunc.window.n_min},
                             {"n_max", trunc.window.n_max},
                             {"phase", trunc.shift},
                             {"change", trunc.change},
                             {"conv_tol", conv_tol}}},
          {"tolerance_study", tolerances}};
      out << report.dump(2) << '\n';
      return 0;
    }
  } catch (const Error &e) {
    err << "error code=" << to_string(e.code())
        << " detail=" << (e.detail().empty() ? "-" : e.detail())
        << " message=\"" << e.what() << "\"\n";
    return is_usage_error(e.code()) ? 2 : 1;
  }
  return 2;
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

} // namespace lightshift
