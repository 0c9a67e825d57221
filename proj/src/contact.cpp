#include "usm/contact.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "usm/errors.hpp"

namespace usm {

void ContactConfig::validate(int nodal_diameters) const {
  if (point_count < 4 * nodal_diameters)
    throw ConfigError("contact: point_count must be at least 4n = " + std::to_string(4 * nodal_diameters));
  if (!(penalty_stiffness > 0)) throw ConfigError("contact: penalty_stiffness must be positive");
  if (!(regularization_velocity > 0)) throw ConfigError("contact: regularization_velocity must be positive");
  if (!(cof >= 0)) throw ConfigError("contact: cof must be non-negative");
}

std::vector<double> ContactConfig::angles() const {
  std::vector<double> out(static_cast<size_t>(point_count));
  for (int i = 0; i < point_count; ++i) out[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * i / point_count;
  return out;
}

void evaluate_contact(std::span<const SurfaceState> surface, double rotor_z, double rotor_speed,
                      const StatorGeometry& geom, const ContactConfig& cfg, ContactState& out) {
  const size_t m = surface.size();
  out.gap.resize(m);
  out.normal.resize(m);
  out.friction.resize(m);
  out.slip.resize(m);
  out.axial_force = 0.0;
  out.torque = 0.0;
  const double r = geom.mean_radius;
  const double rim_speed = r * rotor_speed;
  for (size_t i = 0; i < m; ++i) {
    const double g = rotor_z - surface[i].w;
    const double n = g < 0 ? -cfg.penalty_stiffness * g : 0.0;
    const double s = rim_speed - surface[i].v_t;
    double f = n > 0 ? -cfg.cof * n * std::tanh(s / cfg.regularization_velocity) : 0.0;
    // tanh rounds to exactly 1 beyond |x| ~ 19; keep the magnitude strictly inside the cone.
    if (n > 0 && cfg.cof > 0 && std::abs(f) >= cfg.cof * n) f = std::copysign(std::nextafter(cfg.cof * n, 0.0), f);
    out.gap[i] = g;
    out.normal[i] = n;
    out.slip[i] = s;
    out.friction[i] = f;
    out.axial_force += n;
    out.torque += r * f;
  }
}

ContactState evaluate_contact(std::span<const SurfaceState> surface, double rotor_z, double rotor_speed,
                              const StatorGeometry& geom, const ContactConfig& cfg) {
  ContactState out;
  evaluate_contact(surface, rotor_z, rotor_speed, geom, cfg, out);
  return out;
}

Eigen::Vector2d modal_reaction(const ContactState& state, std::span<const ShapeSample> shapes,
                               const StatorGeometry& geom) {
  const double zc = geom.contact_offset();
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < shapes.size(); ++i) {
    const double n = state.normal[i];
    const double f = state.friction[i];
    if (n == 0.0 && f == 0.0) continue;
    q(0) += -n * shapes[i].w_cos + f * zc * shapes[i].slope_cos;
    q(1) += -n * shapes[i].w_sin + f * zc * shapes[i].slope_sin;
  }
  return q;
}

ContactPower contact_power(const ContactState& state, std::span<const SurfaceState> surface, double rotor_z_rate,
                           double rotor_speed) {
  ContactPower p;
  p.rotor = state.axial_force * rotor_z_rate + state.torque * rotor_speed;
  for (size_t i = 0; i < surface.size(); ++i) {
    p.stator += -state.normal[i] * surface[i].w_dot - state.friction[i] * surface[i].v_t;
    p.dissipation -= state.friction[i] * state.slip[i];
    // d/dt (1/2 k pen^2) = k pen * d(pen)/dt = N (w_dot - z_dot)
    p.penalty_rate += state.normal[i] * (surface[i].w_dot - rotor_z_rate);
  }
  return p;
}

double penalty_energy(const ContactState& state, const ContactConfig& cfg) {
  double e = 0.0;
  for (double n : state.normal) e += n * n;
  return 0.5 * e / cfg.penalty_stiffness;
}

}  // namespace usm
