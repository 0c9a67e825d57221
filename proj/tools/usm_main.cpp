// Command-line front end: eigen | run | sweep | roughness | validate.

#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usm/config.hpp"
#include "usm/errors.hpp"
#include "usm/io.hpp"
#include "usm/metrology.hpp"
#include "usm/sweep.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kDivergence = 3, kNotSettled = 4, kIo = 5 };

/// Flags shared by the simulation subcommands. Unset flags leave the config
/// file (or the built-in default) untouched.
struct Overrides {
  std::string config_path;
  std::optional<int> n_elements, modes, points, steps_per_period;
  std::optional<double> cof, preload, voltage, frequency, detuning, duration, interval, load_damping, stiffness,
      axial_damping, preload_ramp, mass, inertia;
  std::string phase, coupling, stator, piezo;

  void attach(CLI::App* app, bool simulation) {
    app->add_option("--config", config_path, "JSON run configuration");
    app->add_option("--n-elements", n_elements, "ring elements");
    app->add_option("--modes", modes, "number of eigenpairs to compute");
    app->add_option("--stator-material", stator, "catalog name of the stator material");
    app->add_option("--piezo-material", piezo, "catalog name of the piezo material");
    if (!simulation) return;
    app->add_option("--cof", cof, "coefficient of friction");
    app->add_option("--preload", preload, "axial preload, N");
    app->add_option("--voltage", voltage, "drive voltage amplitude, V");
    app->add_option("--frequency", frequency, "drive frequency, Hz (0: pair frequency)");
    app->add_option("--detuning", detuning, "relative drive detuning");
    app->add_option("--phase", phase, "channel phase offset, e.g. 1.5708, 90deg, -90deg");
    app->add_option("--duration", duration, "simulated time, s");
    app->add_option("--interval", interval, "output sample interval, s");
    app->add_option("--steps-per-period", steps_per_period, "integration steps per drive period");
    app->add_option("--coupling", coupling, "predictor_corrector or explicit_start");
    app->add_option("--points", points, "contact sample points");
    app->add_option("--stiffness", stiffness, "penalty stiffness per point, N/m");
    app->add_option("--load-damping", load_damping, "speed-proportional shaft load, N m s/rad");
    app->add_option("--axial-damping", axial_damping, "rotor axial damping, N s/m");
    app->add_option("--rotor-mass", mass, "rotor mass, kg");
    app->add_option("--inertia", inertia, "rotor inertia, kg m^2");
    app->add_option("--preload-ramp", preload_ramp, "linear preload ramp time, s");
  }

  usm::RunConfig resolve() const {
    usm::RunConfig cfg = config_path.empty() ? usm::RunConfig{} : usm::load_run_config(config_path);
    if (n_elements) cfg.n_elements = *n_elements;
    if (modes) cfg.n_modes = *modes;
    if (!stator.empty()) cfg.stator_material = stator;
    if (!piezo.empty()) cfg.piezo_material = piezo;
    if (cof) cfg.contact.cof = *cof;
    if (points) cfg.contact.point_count = *points;
    if (stiffness) cfg.contact.penalty_stiffness = *stiffness;
    if (preload) cfg.rotor.preload = *preload;
    if (load_damping) cfg.rotor.load_damping = *load_damping;
    if (axial_damping) cfg.rotor.axial_damping = *axial_damping;
    if (mass) cfg.rotor.mass = *mass;
    if (inertia) cfg.rotor.inertia = *inertia;
    if (preload_ramp) cfg.simulation.preload_ramp = *preload_ramp;
    if (voltage) cfg.drive.voltage = *voltage;
    if (frequency) cfg.drive.frequency = *frequency;
    if (detuning) cfg.drive.detuning = *detuning;
    if (!phase.empty()) cfg.drive.phase_offset = usm::parse_angle(phase);
    if (duration) cfg.simulation.duration = *duration;
    if (interval) cfg.simulation.output_interval = *interval;
    if (steps_per_period) cfg.simulation.steps_per_period = *steps_per_period;
    if (!coupling.empty()) cfg.simulation.coupling = usm::parse_coupling(coupling);
    return cfg;
  }
};

int cmd_eigen(const Overrides& ov, const std::string& out_path) {
  usm::RunConfig cfg = ov.resolve();
  cfg.validate();
  const auto& g = cfg.geometry;
  const usm::RingMesh mesh = usm::build_ring_mesh(g, cfg.n_elements);
  const usm::SystemMatrices sys = usm::assemble_system(mesh, cfg.catalog.isotropic(cfg.stator_material), g);
  const int k = cfg.n_modes > 0 ? cfg.n_modes : 2 * (g.nodal_diameters + 1) + 1;
  const usm::ModeSet modes = usm::solve_eigen(sys, k);

  std::string csv = "index,frequency_hz,wavenumber,residual,drive_pair\n";
  std::printf("%5s %16s %6s %10s\n", "mode", "frequency [Hz]", "n", "residual");
  for (Eigen::Index i = 0; i < modes.frequencies.size(); ++i) {
    const bool drive = modes.wavenumbers[static_cast<size_t>(i)] == g.nodal_diameters;
    std::printf("%5ld %16.6f %6d %10.2e%s\n", static_cast<long>(i), modes.frequencies(i),
                modes.wavenumbers[static_cast<size_t>(i)], modes.residuals(i), drive ? "  <- drive pair" : "");
    char row[160];
    std::snprintf(row, sizeof row, "%ld,%.17g,%d,%.17g,%d\n", static_cast<long>(i), modes.frequencies(i),
                  modes.wavenumbers[static_cast<size_t>(i)], modes.residuals(i), drive ? 1 : 0);
    csv += row;
  }
  const usm::ModePair pair = usm::select_mode_pair(modes, sys, mesh, g.nodal_diameters);
  std::printf("drive pair n=%d: %.6f Hz (split %.2e)\n", g.nodal_diameters, pair.frequency_hz(), pair.frequency_split);
  usm::write_text_file(out_path, csv);
  return kOk;
}

int cmd_run(const Overrides& ov, const std::string& out, const std::string& trace_out, const std::string& summary_out) {
  const usm::RunConfig cfg = ov.resolve();
  const usm::MotorCase c = cfg.build_case();
  const usm::MotorTimeSeries ts = usm::simulate(c.stator, c.drive, c.contact, c.rotor, c.simulation);

  // Summarize the serialized columns so that reloading the files reproduces
  // the summary exactly.
  const std::string series_csv = usm::time_series_csv(ts);
  const std::string trace_csv = usm::torque_trace_csv(ts);
  const usm::MotorTimeSeries reread = usm::parse_time_series(series_csv, trace_csv, ts.radius, ts.drive_frequency);
  const usm::RunSummary summary =
      usm::summarize(reread, usm::ideal_speed(c.stator, c.drive), cfg.steady_window, cfg.steady_tolerance);

  usm::write_text_file(out, series_csv);
  usm::write_text_file(trace_out, trace_csv);
  usm::write_text_file(summary_out, summary.to_json());
  std::printf("t_ss %.6g s (%s), torque %.6g N m, mean speed %.6g rad/s, energy residual %.2e\n", summary.t_ss,
              summary.settled ? "settled" : "NOT settled", summary.reported_torque, summary.mean_speed,
              ts.energy.relative_residual());
  return summary.settled ? kOk : kNotSettled;
}

int cmd_sweep(const Overrides& ov, const std::string& preset, const std::string& param, const std::string& values,
              int jobs, int smoothing, const std::string& out, const std::string& plot) {
  usm::RunConfig cfg = ov.resolve();
  std::string material = cfg.stator_material;
  usm::SweepSpec spec;
  if (!preset.empty() || !param.empty()) {
    cfg.sweep = usm::SweepSection{};
    if (!preset.empty()) {
      if (!param.empty() || !values.empty()) throw usm::ConfigError("use either --preset or --param/--values");
      cfg.sweep->preset = preset;
    } else {
      if (values.empty()) throw usm::ConfigError("--param needs --values");
      cfg.sweep->spec = usm::SweepSpec{usm::parse_parameter(param), usm::parse_values(values)};
    }
  }
  if (!cfg.sweep) throw usm::ConfigError("sweep needs --preset, --param/--values or a sweep section in the config");
  if (smoothing > 0) cfg.sweep->smoothing_window = smoothing;
  cfg.validate();
  if (!cfg.sweep->preset.empty()) {
    const usm::SweepPreset p = usm::sweep_preset(cfg.sweep->preset);
    spec = p.spec;
    if (!p.stator_material.empty()) material = p.stator_material;
  } else {
    spec = *cfg.sweep->spec;
  }

  const usm::MotorCase base = cfg.build_case(material);
  const usm::SweepCurve curve = usm::run_sweep(base, spec, jobs);
  usm::write_text_file(out, curve.to_csv());
  if (!plot.empty()) usm::write_text_file(plot, curve.to_svg());

  size_t failed = 0;
  for (const auto& r : curve.rows) {
    std::printf("%12.6g  torque %12.6g  speed %12.6g  t_ss %10.4g  %s\n", r.param, r.torque, r.speed, r.t_ss,
                r.failed ? ("FAILED: " + r.error).c_str() : (r.settled ? "settled" : "not settled"));
    failed += r.failed;
  }
  if (failed == curve.rows.size()) {
    std::fprintf(stderr, "every sweep row failed\n");
    return kDivergence;
  }
  try {
    const usm::PeakReport peak = usm::find_peak(curve, cfg.sweep->smoothing_window);
    std::printf("peak: %s = %g %s, torque %.6g N m, %s%s\n", std::string(usm::parameter_name(spec.parameter)).c_str(),
                peak.param, std::string(usm::parameter_unit(spec.parameter)).c_str(), peak.torque,
                peak.unimodal ? "unimodal" : "not unimodal", peak.boundary_maximum ? ", boundary maximum" : "");
  } catch (const usm::ConfigError& e) {
    std::fprintf(stderr, "no peak: %s\n", e.what());
    return kNotSettled;
  }
  return kOk;
}

int cmd_roughness(const std::vector<std::string>& files, double pitch, double dx, double dy, const std::string& out) {
  if (dx <= 0) dx = pitch;
  if (dy <= 0) dy = pitch;
  std::vector<usm::HeightMap> maps;
  for (const auto& f : files) maps.push_back(usm::load_height_map(f, dx, dy));
  const usm::RoughnessReport rep = usm::roughness_report(maps);
  if (out.empty())
    std::cout << rep.to_json();
  else
    usm::write_text_file(out, rep.to_json());
  return kOk;
}

int cmd_validate(const Overrides& ov) {
  const usm::RunConfig cfg = ov.resolve();
  const usm::MotorCase c = cfg.build_case();
  std::cout << usm::to_json(cfg);
  std::printf("ok: drive pair n=%d at %.6f Hz\n", cfg.geometry.nodal_diameters, c.stator.drive_pair().frequency_hz());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling-wave ultrasonic motor simulator"};
  app.require_subcommand(1);

  Overrides eigen_ov, run_ov, sweep_ov, validate_ov;
  std::string eigen_out = "eigen.csv";
  auto* eigen = app.add_subcommand("eigen", "ring eigenfrequencies and the drive mode pair");
  eigen_ov.attach(eigen, false);
  eigen->add_option("--out", eigen_out, "CSV output path");

  std::string run_out = "run.csv", trace_out = "run_trace.csv", summary_out = "run_summary.json";
  auto* run = app.add_subcommand("run", "one transient with steady-state summary");
  run_ov.attach(run, true);
  run->add_option("--out", run_out, "time-series CSV path");
  run->add_option("--trace", trace_out, "per-step torque trace CSV path");
  run->add_option("--summary", summary_out, "summary JSON path");

  std::string preset, param, values, sweep_out = "sweep.csv", plot;
  int jobs = 1, smoothing = 0;
  auto* sweep = app.add_subcommand("sweep", "parametric sweep with peak report");
  sweep_ov.attach(sweep, true);
  sweep->add_option("--preset", preset, "usr30_preload, usr60_preload, ultem_preload_g or cof_sweep");
  sweep->add_option("--param", param, "preload_N, preload_g, cof, voltage or frequency");
  sweep->add_option("--values", values, "start:stop:step or comma-separated list");
  sweep->add_option("--jobs", jobs, "concurrent simulations")->check(CLI::PositiveNumber);
  sweep->add_option("--smoothing", smoothing, "moving-average window for peak finding");
  sweep->add_option("--out", sweep_out, "sweep CSV path");
  sweep->add_option("--plot", plot, "SVG plot path");

  std::vector<std::string> files;
  double pitch = 1.0, dx = 0.0, dy = 0.0;
  std::string rough_out;
  auto* rough = app.add_subcommand("roughness", "areal roughness report of height-map CSV files");
  rough->add_option("files", files, "height-map CSV files (um)")->required();
  rough->add_option("--pitch", pitch, "pixel pitch for both axes, um");
  rough->add_option("--dx", dx, "pixel pitch along x, um");
  rough->add_option("--dy", dy, "pixel pitch along y, um");
  rough->add_option("--out", rough_out, "JSON output path (default stdout)");

  auto* validate = app.add_subcommand("validate", "check a configuration and build its stator model");
  validate_ov.attach(validate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*eigen) return cmd_eigen(eigen_ov, eigen_out);
    if (*run) return cmd_run(run_ov, run_out, trace_out, summary_out);
    if (*sweep) return cmd_sweep(sweep_ov, preset, param, values, jobs, smoothing, sweep_out, plot);
    if (*rough) return cmd_roughness(files, pitch, dx, dy, rough_out);
    if (*validate) return cmd_validate(validate_ov);
  } catch (const usm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const usm::ModeError& e) {
    std::fprintf(stderr, "mode error: %s\n", e.what());
    return kConfig;
  } catch (const usm::DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s (last valid time %.9g s)\n", e.what(), e.last_valid_time());
    return kDivergence;
  } catch (const usm::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}
