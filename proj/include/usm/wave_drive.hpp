#pragma once

#include <complex>
#include <numbers>

#include "usm/stator_fem.hpp"

namespace usm {

/// Two-phase sinusoidal excitation. Channel B is driven `phase_offset` ahead
/// of channel A in time and its electrodes are channel A's rotated by pi/(2n).
struct DriveConfig {
  double voltage = 100.0;                          // V, amplitude
  double frequency = 0.0;                          // Hz; <= 0 selects the pair frequency
  double detuning = 0.0;                           // relative offset applied to the pair frequency
  double phase_offset = std::numbers::pi / 2.0;    // rad

  /// Drive frequency in Hz for a pair resonating at `pair_frequency_hz`.
  double resolve_frequency(double pair_frequency_hz) const;
  void validate() const;
};

/// Steady forced response of the drive pair, as complex phasors
/// q(t) = Re(q exp(i w t)) in mass-normalized coordinates.
///
/// The forward component is the one produced by a +pi/2 phase offset; its
/// crests travel toward -theta and carry the rotor toward +theta.
struct WaveSolution {
  ModePair pair;
  std::complex<double> q_a;
  std::complex<double> q_b;
  double omega = 0.0;       // drive angular frequency, rad/s
  double forward = 0.0;     // W_f, m
  double backward = 0.0;    // W_b, m
  double amplitude = 0.0;   // W = W_f + W_b, crest deflection, m

  std::complex<double> forward_phasor() const;   // (q_a - i q_b) / 2
  std::complex<double> backward_phasor() const;  // (q_a + i q_b) / 2
};

/// Modal forced response q = F / (w_n^2 - w^2 + 2 i zeta w_n w) per member.
WaveSolution steady_wave_response(const ModePair& pair, const ModalDriveForce& forces,
                                  const DriveConfig& drive, double zeta);

/// Same, with the drive angular frequency given directly.
WaveSolution steady_wave_response(const ModePair& pair, const ModalDriveForce& forces, double omega,
                                  double phase_offset, double zeta);

/// Kinematics of the tooth-tip surface at one point.
struct SurfaceState {
  double w = 0.0;       // axial deflection, m
  double w_dot = 0.0;   // axial velocity, m/s
  double u_t = 0.0;     // tangential displacement, m
  double v_t = 0.0;     // tangential velocity, m/s
};

/// u_t = -z_c dw/dx at the contact offset z_c, x = R theta.
SurfaceState surface_state(const WaveSolution& wave, const StatorGeometry& geom, double theta, double t);

/// No-slip rotor speed n z_c w W / R^2, signed by the wave direction.
/// Throws ConfigError when the weaker component exceeds 1% of the stronger.
double ideal_no_slip_speed(const WaveSolution& wave, const StatorGeometry& geom);

}  // namespace usm
