#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "usm/motor_dynamics.hpp"

namespace usm {

/// Everything one transient needs. The stator model is shared read-only
/// between sweep rows.
struct MotorCase {
  StatorModel stator;
  DriveConfig drive;
  ContactConfig contact;
  RotorConfig rotor;
  SimulationConfig simulation;
  double steady_window = 2.5e-4;  // s
  double steady_tolerance = 0.02;
};

enum class SweepParameter { preload_N, preload_g, cof, voltage, frequency };

std::string_view parameter_name(SweepParameter p);
std::string_view parameter_unit(SweepParameter p);
SweepParameter parse_parameter(std::string_view name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::preload_N;
  std::vector<double> values;

  /// At least 3 strictly ascending values inside the parameter's domain.
  void validate() const;
};

/// A named study grid. A non-empty `stator_material` replaces the base
/// stator material before the model is built.
struct SweepPreset {
  std::string name;
  SweepSpec spec;
  std::string stator_material;
};

SweepPreset sweep_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Parses "a:b:step" (inclusive, snapped to the grid) or "v1,v2,...".
std::vector<double> parse_values(std::string_view text);

double grams_to_newtons(double grams);

/// Copy of `base` with the swept parameter set to `value`.
MotorCase apply_parameter(const MotorCase& base, SweepParameter p, double value);

struct SweepRow {
  double param = 0.0;
  double torque = 0.0;  // envelope-averaged reaction torque, N m
  double speed = 0.0;   // mean rotor speed, rad/s
  double t_ss = 0.0;    // s
  bool settled = false;
  bool failed = false;  // the transient diverged or was rejected
  std::string error;
};

struct SweepCurve {
  SweepParameter parameter = SweepParameter::preload_N;
  std::vector<SweepRow> rows;

  std::string to_csv() const;
  /// Minimal SVG line chart of torque against the parameter.
  std::string to_svg() const;
};

/// Runs one transient and reduces it to a sweep row. Unsettled runs are
/// summarized over the second half of the window and flagged.
SweepRow evaluate_case(const MotorCase& c, double param);

/// Rows come back in input order whatever the completion order.
SweepCurve run_sweep(const MotorCase& base, const SweepSpec& spec, int jobs = 1);

struct PeakReport {
  double param = 0.0;
  double torque = 0.0;
  size_t row = 0;               // index into the curve
  bool unimodal = false;        // rises then falls at most once
  bool boundary_maximum = false;
  std::vector<double> smoothed;  // torque of the rows used, after smoothing
};

/// Peak of the settled rows after an optional centred moving average.
PeakReport find_peak(const SweepCurve& curve, int smoothing_window = 1);

/// True when the sequence never rises again after it starts falling.
bool is_unimodal(const std::vector<double>& values);

struct TrendComparison {
  double location_ratio = 0.0;  // sim peak parameter / experimental peak parameter
  double overshoot_pct = 0.0;   // (sim peak / exp peak - 1) * 100
  bool both_unimodal = false;
  double shape_distance = 0.0;  // RMS gap of the min-max normalized curves
};

TrendComparison compare_trends(const SweepCurve& sim, const std::vector<std::pair<double, double>>& experiment);

}  // namespace usm
