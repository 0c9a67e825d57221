#include "usm/wave_drive.hpp"

#include <cmath>

#include "usm/errors.hpp"

namespace usm {

using namespace std::complex_literals;

double DriveConfig::resolve_frequency(double pair_frequency_hz) const {
  const double base = frequency > 0 ? frequency : pair_frequency_hz;
  return base * (1.0 + detuning);
}

void DriveConfig::validate() const {
  if (!(voltage >= 0)) throw ConfigError("drive: voltage must be non-negative");
  if (!(frequency >= 0)) throw ConfigError("drive: frequency must be positive (or 0 for the pair frequency)");
  if (!(detuning > -1.0)) throw ConfigError("drive: detuning must exceed -1");
  if (!std::isfinite(phase_offset)) throw ConfigError("drive: phase_offset must be finite");
}

std::complex<double> WaveSolution::forward_phasor() const { return 0.5 * (q_a - 1i * q_b); }
std::complex<double> WaveSolution::backward_phasor() const { return 0.5 * (q_a + 1i * q_b); }

WaveSolution steady_wave_response(const ModePair& pair, const ModalDriveForce& forces, double omega,
                                  double phase_offset, double zeta) {
  if (!(zeta > 0)) throw ConfigError("modal damping ratio must be positive");
  const double wn = pair.omega;
  const std::complex<double> h = 1.0 / std::complex<double>(wn * wn - omega * omega, 2.0 * zeta * wn * omega);
  const std::complex<double> channel_b = std::polar(1.0, phase_offset);

  WaveSolution out;
  out.pair = pair;
  out.omega = omega;
  out.q_a = h * (forces.matrix(0, 0) + forces.matrix(0, 1) * channel_b);
  out.q_b = h * (forces.matrix(1, 0) + forces.matrix(1, 1) * channel_b);
  out.forward = pair.deflection_amplitude * std::abs(out.forward_phasor());
  out.backward = pair.deflection_amplitude * std::abs(out.backward_phasor());
  out.amplitude = out.forward + out.backward;
  return out;
}

WaveSolution steady_wave_response(const ModePair& pair, const ModalDriveForce& forces, const DriveConfig& drive,
                                  double zeta) {
  drive.validate();
  const double omega = 2.0 * std::numbers::pi * drive.resolve_frequency(pair.frequency_hz());
  return steady_wave_response(pair, forces, omega, drive.phase_offset, zeta);
}

SurfaceState surface_state(const WaveSolution& wave, const StatorGeometry& geom, double theta, double t) {
  const ShapeSample s = wave.pair.evaluate(theta);
  const std::complex<double> rot = std::polar(1.0, wave.omega * t);
  const std::complex<double> w = (wave.q_a * s.w_cos + wave.q_b * s.w_sin) * rot;
  const std::complex<double> slope = (wave.q_a * s.slope_cos + wave.q_b * s.slope_sin) * rot;
  const double zc = geom.contact_offset();
  const std::complex<double> iw(0.0, wave.omega);

  SurfaceState out;
  out.w = w.real();
  out.w_dot = (iw * w).real();
  out.u_t = -zc * slope.real();
  out.v_t = -zc * (iw * slope).real();
  return out;
}

double ideal_no_slip_speed(const WaveSolution& wave, const StatorGeometry& geom) {
  const double strong = std::max(wave.forward, wave.backward);
  const double weak = std::min(wave.forward, wave.backward);
  if (strong == 0.0) return 0.0;
  if (weak > 0.01 * strong) throw ConfigError("standing-wave component too large for a no-slip speed bound");
  const double r = geom.mean_radius;
  const double speed = geom.nodal_diameters * geom.contact_offset() * wave.omega * wave.amplitude / (r * r);
  return wave.forward >= wave.backward ? speed : -speed;
}

}  // namespace usm
