#pragma once

#include <optional>
#include <string>

#include "usm/motor_dynamics.hpp"

namespace usm {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// `t,s_speed,surf_disp,fric_probe,torque,fz,wave_amp`, SI, 17 significant digits.
std::string time_series_csv(const MotorTimeSeries& series);
/// Per-step reaction torque, `t,torque`.
std::string torque_trace_csv(const MotorTimeSeries& series);

/// Rebuilds the probe columns and trace from their CSV forms. `radius` and
/// `drive_frequency` are not part of the files and come from the caller.
MotorTimeSeries parse_time_series(const std::string& series_csv, const std::string& trace_csv, double radius,
                                  double drive_frequency);

struct RunSummary {
  double t_ss = 0.0;
  bool settled = false;
  double evaluated_from = 0.0;   // start of the averaging interval, s
  double reported_torque = 0.0;  // N m
  int envelope_points = 0;
  int envelope_rejected = 0;
  double mean_speed = 0.0;          // rad/s
  double mean_surface_speed = 0.0;  // m/s
  std::optional<double> omega_ideal;  // rad/s, empty if the free wave is not purely traveling
  double final_displacement = 0.0;  // m
  double mean_axial_force = 0.0;    // N, after t_ss

  std::string to_json() const;
};

/// Drive periods that the envelope and speed averages always cover.
inline constexpr double kMinEvaluationPeriods = 20.0;

/// Start of the averaging interval: t_ss, moved back when fewer than
/// kMinEvaluationPeriods drive periods follow it, or the series midpoint when
/// the run never settled.
double evaluation_start(const MotorTimeSeries& series, const SteadyState& ss);

/// Steady state, envelope torque and mean speed of a series over the
/// interval chosen by evaluation_start.
RunSummary summarize(const MotorTimeSeries& series, std::optional<double> omega_ideal, double steady_window = 2.5e-4,
                     double steady_tolerance = 0.02);

/// Free-stator no-slip speed bound for a drive, or empty when the wave has a
/// standing component.
std::optional<double> ideal_speed(const StatorModel& stator, const DriveConfig& drive);

}  // namespace usm
