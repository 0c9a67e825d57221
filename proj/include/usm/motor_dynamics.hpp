#pragma once

#include <span>
#include <vector>

#include "usm/contact.hpp"
#include "usm/materials.hpp"
#include "usm/stator_fem.hpp"
#include "usm/wave_drive.hpp"

namespace usm {

/// Rigid rotor pressed onto the stator and free to spin about the z axis.
struct RotorConfig {
  double inertia = 2e-6;        // J, kg m^2
  double mass = 0.01;           // m_r, kg
  double axial_damping = 50.0;  // c_z, N s/m
  double preload = 50.0;        // F_p, N
  double load_torque = 0.0;     // T_L, N m
  double load_damping = 0.03;  // c_L, N m s/rad (speed-proportional shaft load)

  void validate() const;
};

/// Stator FE model plus the retained mode pairs. pairs[0] is the drive pair;
/// neighbor families n - 1 and n + 1 follow when requested.
struct StatorModel {
  StatorGeometry geometry;
  IsotropicMaterial material;
  PiezoMaterial piezo;
  RingMesh mesh;
  SystemMatrices system;
  ModeSet modes;
  std::vector<ModePair> pairs;
  double damping_ratio = 0.01;

  const ModePair& drive_pair() const { return pairs.front(); }
};

StatorModel build_stator_model(const StatorGeometry& geom, const IsotropicMaterial& material,
                               const PiezoMaterial& piezo, int n_elements = 64, int n_modes = 0,
                               double damping_ratio = 0.01, bool neighbor_pairs = false);

enum class ContactCoupling {
  /// Contact forces from the start-of-step state held over the step.
  explicit_start,
  /// Start-of-step contact for a predictor, then the contact forces at the
  /// predicted end state enter the trapezoidal average.
  predictor_corrector,
};

struct SimulationConfig {
  double duration = 5e-3;         // s
  double output_interval = 1e-5;  // s
  int steps_per_period = 400;     // dt = 1 / (steps_per_period f_drive)
  double preload_ramp = 0.0;      // s; 0 applies the full preload at t = 0
  ContactCoupling coupling = ContactCoupling::predictor_corrector;
  bool record_trace = true;       // keep the per-step torque trace

  void validate() const;
};

/// Work and energy totals over one run, J.
struct EnergyBalance {
  double drive_work = 0.0;
  double preload_work = 0.0;      // work of the preload on the rotor
  double load_work = 0.0;         // work of the constant load torque
  double energy_change = 0.0;     // kinetic + modal strain + penalty
  double modal_damping = 0.0;
  double friction = 0.0;
  double axial_damping = 0.0;
  double load_damping = 0.0;

  double residual() const;
  /// |residual| / drive_work.
  double relative_residual() const;
};

/// Reaction torque at integration-step resolution.
struct TorqueTrace {
  double start = 0.0;
  double step = 0.0;
  std::vector<double> values;
};

/// Probes sampled at a uniform output interval, SI units.
struct MotorTimeSeries {
  double radius = 0.0;
  double drive_frequency = 0.0;  // Hz
  double output_interval = 0.0;
  std::vector<double> time;
  std::vector<double> surface_speed;         // R w_r, m/s
  std::vector<double> surface_displacement;  // R phi, m
  std::vector<double> friction_probe;        // friction at theta = 0, N
  std::vector<double> torque;                // N m
  std::vector<double> axial_force;           // N
  std::vector<double> wave_amplitude;        // m
  TorqueTrace trace;
  EnergyBalance energy;
  double max_abs_rotor_speed = 0.0;          // over every integration step, rad/s

  size_t size() const { return time.size(); }
};

/// Fixed-step transient of the coupled stator modes, rotor and contact.
/// Throws DivergenceError on a non-finite state and ConfigError on bad input.
MotorTimeSeries simulate(const StatorModel& stator, const DriveConfig& drive, const ContactConfig& contact,
                         const RotorConfig& rotor, const SimulationConfig& sim);

struct SteadyState {
  double time = 0.0;
  bool settled = false;
};

/// Splits the signal into consecutive windows and returns the first window
/// boundary from which every later pair of neighboring window means agrees
/// within `tolerance` (relative). Unsettled signals return the series end.
SteadyState detect_steady_state(std::span<const double> values, double sample_interval, double window,
                                double tolerance = 0.02);

/// Rotor surface speed of a time series.
SteadyState detect_steady_state(const MotorTimeSeries& series, double window = 2.5e-4,
                                double tolerance = 0.02);

struct EnvelopeResult {
  double torque = 0.0;
  int points = 0;
  int rejected = 0;
};

/// Mean of the per-window maxima of an oscillating signal after `t_ss`,
/// dropping maxima more than `spike_factor` MADs from their median.
EnvelopeResult envelope_average(std::span<const double> values, double start, double step, double t_ss,
                                double window, double spike_factor = 5.0);

/// Envelope of the reaction torque trace with a one-drive-period window.
EnvelopeResult envelope_average(const MotorTimeSeries& series, double t_ss, double spike_factor = 5.0);

struct MeanSpeed {
  double angular = 0.0;  // rad/s
  double surface = 0.0;  // m/s
};

/// Arithmetic mean of the samples at or after t_ss.
MeanSpeed mean_speed(const MotorTimeSeries& series, double t_ss);

}  // namespace usm
