#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "usm/stator_fem.hpp"
#include "usm/wave_drive.hpp"

namespace usm {

/// Penalty normal contact with tanh-regularized Coulomb friction, sampled at
/// `point_count` equally spaced angles 2 pi i / M on the mean radius.
struct ContactConfig {
  int point_count = 128;
  double penalty_stiffness = 1e7;         // N/m per point
  double regularization_velocity = 1e-3;  // m/s
  double cof = 0.2;

  void validate(int nodal_diameters) const;
  std::vector<double> angles() const;
};

/// Per-point contact forces. `friction` is the tangential force on the rotor;
/// the stator receives the opposite.
struct ContactState {
  std::vector<double> gap;       // m
  std::vector<double> normal;    // N
  std::vector<double> friction;  // N
  std::vector<double> slip;      // R w_r - v_t, m/s
  double axial_force = 0.0;      // sum of normal, N
  double torque = 0.0;           // on the rotor about the spin axis, N m
};

/// g = z_r - w, N = k_n max(0, -g), s = R w_r - v_t, f = -mu N tanh(s / v_reg).
/// Resultants are summed in point order.
ContactState evaluate_contact(std::span<const SurfaceState> surface, double rotor_z, double rotor_speed,
                              const StatorGeometry& geom, const ContactConfig& cfg);

/// Same, writing into an existing state to avoid reallocations in the time loop.
void evaluate_contact(std::span<const SurfaceState> surface, double rotor_z, double rotor_speed,
                      const StatorGeometry& geom, const ContactConfig& cfg, ContactState& out);

/// Generalized contact forces on one mode pair:
/// Q_j = sum_i [-N_i phi_j(theta_i) + f_i z_c dphi_j/dx(theta_i)].
Eigen::Vector2d modal_reaction(const ContactState& state, std::span<const ShapeSample> shapes,
                               const StatorGeometry& geom);

/// Power flows of one contact evaluation. With consistent inputs
/// rotor + stator + dissipation + penalty_rate = 0.
struct ContactPower {
  double rotor = 0.0;         // F_z dz_r/dt + T w_r
  double stator = 0.0;        // sum_i (-N_i dw_i/dt - f_i v_t,i)
  double dissipation = 0.0;   // -sum_i f_i s_i >= 0
  double penalty_rate = 0.0;  // d/dt of the stored penalty energy
};

ContactPower contact_power(const ContactState& state, std::span<const SurfaceState> surface,
                           double rotor_z_rate, double rotor_speed);

/// Stored penalty energy, 1/2 k_n sum max(0, -g)^2.
double penalty_energy(const ContactState& state, const ContactConfig& cfg);

}  // namespace usm
