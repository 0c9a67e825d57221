#pragma once

#include <vector>

#include <Eigen/Dense>

#include "usm/materials.hpp"

namespace usm {

/// Annular stator reduced to a flexural ring of rectangular section.
struct StatorGeometry {
  double mean_radius = 0.0125;         // R, m
  double section_width = 0.005;        // b, m
  double section_thickness = 0.0025;   // h, m
  double tooth_height = 0.001;         // h_t, m
  int tooth_count = 0;                 // teeth act only through the contact offset
  int nodal_diameters = 4;             // n of the drive mode pair
  double piezo_offset = 0.0028;        // effective piezo lever arm about the neutral axis, m

  /// Tooth-tip surface distance from the neutral axis, h/2 + h_t.
  double contact_offset() const { return 0.5 * section_thickness + tooth_height; }
  double circumference() const;
  double bending_stiffness(double youngs_modulus) const;  // EI, N m^2
  double mass_per_length(double density) const;           // rho A, kg/m

  /// Throws ConfigError on inadmissible values.
  void validate() const;
};

/// Uniform periodic Hermite mesh on the unwrapped circumference.
/// DOFs per node are (w, dw/dx) in that order; element e joins node e and
/// node (e + 1) mod N, so the last element closes the ring onto node 0.
struct RingMesh {
  int element_count = 0;
  double radius = 0.0;
  Eigen::VectorXd node_angles;

  int node_count() const { return element_count; }
  int dof_count() const { return 2 * element_count; }
  double element_length() const;
};

/// Rejects meshes with fewer than 8 elements per drive wavelength.
RingMesh build_ring_mesh(const StatorGeometry& geom, int n_elements);

/// Cubic Hermite Euler-Bernoulli beam element stiffness, DOFs (w1, s1, w2, s2).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> hermite_beam_stiffness(Scalar ei, Scalar l) {
  Eigen::Matrix<Scalar, 4, 4> k;
  const Scalar l2 = l * l;
  // clang-format off
  k << 12,     6 * l,  -12,    6 * l,
       6 * l,  4 * l2, -6 * l, 2 * l2,
       -12,    -6 * l, 12,     -6 * l,
       6 * l,  2 * l2, -6 * l, 4 * l2;
  // clang-format on
  return k * (ei / (l2 * l));
}

/// Consistent mass of the same element.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> hermite_beam_mass(Scalar rho_a, Scalar l) {
  Eigen::Matrix<Scalar, 4, 4> m;
  const Scalar l2 = l * l;
  // clang-format off
  m << 156,     22 * l,  54,      -13 * l,
       22 * l,  4 * l2,  13 * l,  -3 * l2,
       54,      13 * l,  156,     -22 * l,
       -13 * l, -3 * l2, -22 * l, 4 * l2;
  // clang-format on
  return m * (rho_a * l / Scalar(420));
}

struct SystemMatrices {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

SystemMatrices assemble_system(const RingMesh& mesh, const IsotropicMaterial& mat,
                               const StatorGeometry& geom);

/// Analytic flexural frequency of the free periodic Euler-Bernoulli ring, Hz.
double analytic_ring_frequency(const StatorGeometry& geom, const IsotropicMaterial& mat, int n);

struct ModeSet {
  Eigen::VectorXd frequencies;  // Hz, ascending
  Eigen::MatrixXd shapes;       // mass-normalized columns
  std::vector<int> wavenumbers;
  Eigen::VectorXd residuals;    // ||K phi - w^2 M phi|| / ||K phi||, backward error for rigid modes

  int size() const { return static_cast<int>(frequencies.size()); }
};

/// Smallest `k` generalized eigenpairs of K phi = w^2 M phi.
ModeSet solve_eigen(const SystemMatrices& sys, int k);

/// Dominant circumferential wavenumber of a DOF vector (DFT of its w entries).
int wavenumber_of(const Eigen::Ref<const Eigen::VectorXd>& dofs);

/// Shape values at one angle: deflection and slope dw/dx of both pair members.
struct ShapeSample {
  double w_cos = 0.0;
  double slope_cos = 0.0;
  double w_sin = 0.0;
  double slope_sin = 0.0;
};

/// Degenerate pair with n nodal diameters, rotated so the first member's
/// deflection follows +cos(n theta) and the second's +sin(n theta).
struct ModePair {
  int nodal_diameters = 0;
  double omega = 0.0;               // shared natural frequency, rad/s
  double frequency_split = 0.0;     // |f2 - f1| / f1 before rotation
  double cross_mass = 0.0;          // phi_cos^T M phi_sin after rotation
  Eigen::VectorXd cosine_shape;     // FE DOF vectors, mass-normalized
  Eigen::VectorXd sine_shape;
  double deflection_amplitude = 0.0;  // a_w: peak w of either member
  double slope_amplitude = 0.0;       // a_s: peak dw/dx of either member
  double radius = 0.0;
  /// Row r = member (cosine, sine); columns are the cos/sin coefficients of
  /// w and of dw/dx: (w_c, w_s, slope_c, slope_s).
  Eigen::Matrix<double, 2, 4> harmonic = Eigen::Matrix<double, 2, 4>::Zero();

  /// Trigonometric interpolation of the nodal values. The FE modes of the
  /// uniform periodic ring are single discrete harmonics, so the nodal values
  /// are reproduced exactly.
  ShapeSample evaluate(double theta) const;
  double frequency_hz() const;
};

ModePair select_mode_pair(const ModeSet& modes, const SystemMatrices& sys, const RingMesh& mesh,
                          int n);

struct ElectrodeSector {
  double start = 0.0;  // rad
  double end = 0.0;    // rad, end > start
  int polarity = 1;    // +1 or -1
};
using ElectrodePattern = std::vector<ElectrodeSector>;

/// 2n sectors of width pi/n with alternating polarity, the first one centered
/// on theta = rotation. rotation = 0 aligns with cos(n theta); pi/(2n) with sin.
ElectrodePattern alternating_pattern(int n, double rotation = 0.0);

/// Rotates every sector by `angle`.
ElectrodePattern rotated(const ElectrodePattern& p, double angle);

/// Throws ConfigError when two sectors overlap or a sector is malformed.
void check_pattern(const ElectrodePattern& p);

/// Modal forces of a two-channel electrode layout on one mode pair, per volt
/// scaled by `voltage`. Column c is channel c (A, B); row r is pair member r
/// (cosine, sine). Units N per sqrt(kg) (mass-normalized coordinates).
struct ModalDriveForce {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();

  double force_a() const { return matrix(0, 0); }
  double force_b() const { return matrix(1, 1); }
  /// Largest off-diagonal to diagonal ratio over both channels.
  double cross_coupling() const;
};

ModalDriveForce piezo_modal_force(const ModePair& pair, const StatorGeometry& geom,
                                  const PiezoMaterial& piezo, const ElectrodePattern& channel_a,
                                  const ElectrodePattern& channel_b, double voltage);

/// Standard layout for the drive order geom.nodal_diameters: channel A
/// cosine-aligned, channel B rotated by pi/(2n). `pair` may be a neighbor family.
ModalDriveForce piezo_modal_force(const ModePair& pair, const StatorGeometry& geom,
                                  const PiezoMaterial& piezo, double voltage);

}  // namespace usm
