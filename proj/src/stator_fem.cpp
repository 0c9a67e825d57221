#include "usm/stator_fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "usm/errors.hpp"

namespace usm {

using std::numbers::pi;

double StatorGeometry::circumference() const { return 2.0 * pi * mean_radius; }

double StatorGeometry::bending_stiffness(double youngs_modulus) const {
  return youngs_modulus * section_width * section_thickness * section_thickness * section_thickness / 12.0;
}

double StatorGeometry::mass_per_length(double density) const {
  return density * section_width * section_thickness;
}

void StatorGeometry::validate() const {
  if (!(mean_radius > 0)) throw ConfigError("geometry: mean_radius must be positive");
  if (!(section_width > 0)) throw ConfigError("geometry: section_width must be positive");
  if (!(section_thickness > 0)) throw ConfigError("geometry: section_thickness must be positive");
  if (!(tooth_height >= 0)) throw ConfigError("geometry: tooth_height must be non-negative");
  if (tooth_count < 0) throw ConfigError("geometry: tooth_count must be non-negative");
  if (nodal_diameters < 1) throw ConfigError("geometry: nodal_diameters must be at least 1");
  if (!(piezo_offset >= 0)) throw ConfigError("geometry: piezo_offset must be non-negative");
}

double RingMesh::element_length() const { return 2.0 * pi * radius / element_count; }

RingMesh build_ring_mesh(const StatorGeometry& geom, int n_elements) {
  geom.validate();
  const int minimum = 8 * geom.nodal_diameters;
  if (n_elements < minimum)
    throw ConfigError("mesh too coarse: " + std::to_string(n_elements) + " elements given, at least " +
                      std::to_string(minimum) + " required for n = " + std::to_string(geom.nodal_diameters));
  RingMesh mesh;
  mesh.element_count = n_elements;
  mesh.radius = geom.mean_radius;
  mesh.node_angles.resize(n_elements);
  for (int k = 0; k < n_elements; ++k) mesh.node_angles(k) = 2.0 * pi * k / n_elements;
  return mesh;
}

SystemMatrices assemble_system(const RingMesh& mesh, const IsotropicMaterial& mat,
                               const StatorGeometry& geom) {
  const int ndof = mesh.dof_count();
  const double l = mesh.element_length();
  const Eigen::Matrix4d ke = hermite_beam_stiffness(geom.bending_stiffness(mat.youngs_modulus), l);
  const Eigen::Matrix4d me = hermite_beam_mass(geom.mass_per_length(mat.density), l);

  SystemMatrices sys{Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof)};
  for (int e = 0; e < mesh.element_count; ++e) {
    const int a = e;
    const int b = (e + 1) % mesh.element_count;
    const int dofs[4] = {2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        sys.stiffness(dofs[i], dofs[j]) += ke(i, j);
        sys.mass(dofs[i], dofs[j]) += me(i, j);
      }
  }
  return sys;
}

double analytic_ring_frequency(const StatorGeometry& geom, const IsotropicMaterial& mat, int n) {
  const double k = n / geom.mean_radius;
  return k * k * std::sqrt(geom.bending_stiffness(mat.youngs_modulus) / geom.mass_per_length(mat.density)) /
         (2.0 * pi);
}

int wavenumber_of(const Eigen::Ref<const Eigen::VectorXd>& dofs) {
  const int nodes = static_cast<int>(dofs.size() / 2);
  int best = 0;
  double best_mag = -1.0;
  for (int m = 0; m <= nodes / 2; ++m) {
    double c = 0.0, s = 0.0;
    for (int k = 0; k < nodes; ++k) {
      const double arg = 2.0 * pi * m * k / nodes;
      c += dofs(2 * k) * std::cos(arg);
      s += dofs(2 * k) * std::sin(arg);
    }
    // m = 0 and m = N/2 carry a single real coefficient; weight them like the rest.
    const double weight = (m == 0 || 2 * m == nodes) ? 2.0 : 1.0;
    const double mag = weight * std::hypot(c, s);
    if (mag > best_mag * (1.0 + 1e-9)) {
      best_mag = mag;
      best = m;
    }
  }
  return best;
}

ModeSet solve_eigen(const SystemMatrices& sys, int k) {
  const int ndof = static_cast<int>(sys.stiffness.rows());
  if (k < 1 || k > ndof)
    throw ConfigError("requested " + std::to_string(k) + " modes, must lie in [1, " + std::to_string(ndof) + "]");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.stiffness, sys.mass,
                                                              Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw ModeError("generalized eigensolver did not converge");

  // The Cholesky-reduced solve loses a few digits on the low end of the
  // spectrum. Two sweeps of shifted block inverse iteration with a
  // Rayleigh-Ritz projection restore them.
  Eigen::MatrixXd basis = es.eigenvectors().leftCols(k);
  Eigen::VectorXd lambdas = es.eigenvalues().head(k);
  const double shift = std::max(std::abs(lambdas(k - 1)), 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff());
  const Eigen::LLT<Eigen::MatrixXd> shifted(sys.stiffness + shift * sys.mass);
  if (shifted.info() != Eigen::Success) throw ModeError("shifted stiffness factorization failed");
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Eigen::MatrixXd y = shifted.solve(sys.mass * basis);
    Eigen::MatrixXd kr = y.transpose() * sys.stiffness * y;
    Eigen::MatrixXd mr = y.transpose() * sys.mass * y;
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ritz.info() != Eigen::Success) throw ModeError("Rayleigh-Ritz projection did not converge");
    basis = y * ritz.eigenvectors();
    lambdas = ritz.eigenvalues();
  }

  ModeSet out;
  out.frequencies.resize(k);
  out.shapes.resize(ndof, k);
  out.residuals.resize(k);
  out.wavenumbers.resize(k);
  const double k_norm = sys.stiffness.norm(), m_norm = sys.mass.norm();
  for (int j = 0; j < k; ++j) {
    const double lambda = std::max(0.0, lambdas(j));
    Eigen::VectorXd phi = basis.col(j);
    phi /= std::sqrt(phi.dot(sys.mass * phi));
    // Deterministic sign: largest-magnitude w entry positive.
    Eigen::Index arg = 0;
    Eigen::VectorXd w = phi(Eigen::seq(0, ndof - 1, 2));
    w.cwiseAbs().maxCoeff(&arg);
    if (w(arg) < 0) phi = -phi;

    const Eigen::VectorXd kphi = sys.stiffness * phi;
    // Normwise backward error, well defined for the rigid mode as well.
    const double denom = (k_norm + lambda * m_norm) * phi.norm();
    out.residuals(j) = (kphi - lambda * (sys.mass * phi)).norm() / denom;
    out.frequencies(j) = std::sqrt(lambda) / (2.0 * pi);
    out.shapes.col(j) = phi;
    out.wavenumbers[j] = wavenumber_of(phi);
  }
  const double worst = out.residuals.maxCoeff();
  if (!(worst < 1e-6)) {
    std::ostringstream msg;
    msg << "generalized eigensolver residuals too large:";
    for (int j = 0; j < k; ++j) msg << ' ' << out.residuals(j);
    throw ModeError(msg.str());
  }
  return out;
}

namespace {

struct Projection {
  double wc, ws;
};

Projection project_deflection(const Eigen::VectorXd& v, int n) {
  const int nodes = static_cast<int>(v.size() / 2);
  Projection p{0.0, 0.0};
  for (int k = 0; k < nodes; ++k) {
    const double arg = 2.0 * pi * n * k / nodes;
    p.wc += v(2 * k) * std::cos(arg);
    p.ws += v(2 * k) * std::sin(arg);
  }
  return p;
}

Eigen::Vector4d harmonic_coefficients(const Eigen::VectorXd& v, int n) {
  const int nodes = static_cast<int>(v.size() / 2);
  Eigen::Vector4d c = Eigen::Vector4d::Zero();
  for (int k = 0; k < nodes; ++k) {
    const double arg = 2.0 * pi * n * k / nodes;
    c(0) += v(2 * k) * std::cos(arg);
    c(1) += v(2 * k) * std::sin(arg);
    c(2) += v(2 * k + 1) * std::cos(arg);
    c(3) += v(2 * k + 1) * std::sin(arg);
  }
  return c * (2.0 / nodes);
}

}  // namespace

ShapeSample ModePair::evaluate(double theta) const {
  const double c = std::cos(nodal_diameters * theta);
  const double s = std::sin(nodal_diameters * theta);
  ShapeSample out;
  out.w_cos = harmonic(0, 0) * c + harmonic(0, 1) * s;
  out.slope_cos = harmonic(0, 2) * c + harmonic(0, 3) * s;
  out.w_sin = harmonic(1, 0) * c + harmonic(1, 1) * s;
  out.slope_sin = harmonic(1, 2) * c + harmonic(1, 3) * s;
  return out;
}

double ModePair::frequency_hz() const { return omega / (2.0 * pi); }

ModePair select_mode_pair(const ModeSet& modes, const SystemMatrices& sys, const RingMesh& mesh, int n) {
  if (n < 1) throw ModeError("nodal diameter " + std::to_string(n) + " does not form a traveling-wave pair");
  if (2 * n >= mesh.element_count)
    throw ModeError("mode not resolved; increase k or mesh density (n = " + std::to_string(n) + ")");
  std::vector<int> idx;
  for (int j = 0; j < modes.size(); ++j)
    if (modes.wavenumbers[j] == n) idx.push_back(j);
  if (idx.size() < 2)
    throw ModeError("mode not resolved; increase k or mesh density (n = " + std::to_string(n) + ")");

  const double f1 = modes.frequencies(idx[0]);
  const double f2 = modes.frequencies(idx[1]);
  Eigen::VectorXd a = modes.shapes.col(idx[0]);
  Eigen::VectorXd b = modes.shapes.col(idx[1]);

  // Rotate inside the degenerate subspace so that `a` carries no sin(n theta).
  const Projection pa = project_deflection(a, n);
  const Projection pb = project_deflection(b, n);
  const double gamma = std::atan2(-pa.ws, pb.ws);
  Eigen::VectorXd cos_shape = std::cos(gamma) * a + std::sin(gamma) * b;
  Eigen::VectorXd sin_shape = -std::sin(gamma) * a + std::cos(gamma) * b;

  // M-orthonormalize and fix the signs.
  cos_shape /= std::sqrt(cos_shape.dot(sys.mass * cos_shape));
  sin_shape -= cos_shape.dot(sys.mass * sin_shape) * cos_shape;
  sin_shape /= std::sqrt(sin_shape.dot(sys.mass * sin_shape));
  if (project_deflection(cos_shape, n).wc < 0) cos_shape = -cos_shape;
  if (project_deflection(sin_shape, n).ws < 0) sin_shape = -sin_shape;

  ModePair pair;
  pair.nodal_diameters = n;
  pair.omega = 2.0 * pi * 0.5 * (f1 + f2);
  pair.frequency_split = std::abs(f2 - f1) / f1;
  pair.cross_mass = cos_shape.dot(sys.mass * sin_shape);
  pair.radius = mesh.radius;
  pair.harmonic.row(0) = harmonic_coefficients(cos_shape, n).transpose();
  pair.harmonic.row(1) = harmonic_coefficients(sin_shape, n).transpose();
  pair.deflection_amplitude = pair.harmonic(0, 0);
  pair.slope_amplitude = std::abs(pair.harmonic(0, 3));
  pair.cosine_shape = std::move(cos_shape);
  pair.sine_shape = std::move(sin_shape);
  if (pair.frequency_split > 1e-3)
    throw ModeError("pair n = " + std::to_string(n) + " is not degenerate (split " +
                    std::to_string(pair.frequency_split) + ")");
  return pair;
}

ElectrodePattern alternating_pattern(int n, double rotation) {
  if (n < 1) throw ConfigError("electrode pattern needs n >= 1");
  ElectrodePattern p;
  const double width = pi / n;
  for (int k = 0; k < 2 * n; ++k) {
    const double center = rotation + k * width;
    p.push_back({center - 0.5 * width, center + 0.5 * width, (k % 2 == 0) ? 1 : -1});
  }
  return p;
}

ElectrodePattern rotated(const ElectrodePattern& p, double angle) {
  ElectrodePattern out = p;
  for (auto& s : out) {
    s.start += angle;
    s.end += angle;
  }
  return out;
}

void check_pattern(const ElectrodePattern& p) {
  const double two_pi = 2.0 * pi;
  const double eps = 1e-12;
  std::vector<std::pair<double, double>> spans;
  for (const auto& s : p) {
    if (!(s.end > s.start)) throw ConfigError("electrode sector with end <= start");
    if (s.end - s.start > two_pi + eps) throw ConfigError("electrode sector wider than the ring");
    if (s.polarity != 1 && s.polarity != -1) throw ConfigError("electrode polarity must be +1 or -1");
    const double start = s.start - two_pi * std::floor(s.start / two_pi);
    spans.emplace_back(start, start + (s.end - s.start));
  }
  std::sort(spans.begin(), spans.end());
  double total = 0.0;
  for (size_t i = 0; i < spans.size(); ++i) {
    total += spans[i].second - spans[i].first;
    if (i + 1 < spans.size() && spans[i].second > spans[i + 1].first + eps)
      throw ConfigError("electrode sectors overlap");
  }
  if (spans.size() > 1 && spans.back().second - two_pi > spans.front().first + eps)
    throw ConfigError("electrode sectors overlap");
  if (total > two_pi + eps) throw ConfigError("electrode sectors overlap");
}

double ModalDriveForce::cross_coupling() const {
  auto ratio = [](double off, double diag) {
    if (off == 0.0) return 0.0;
    return diag == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(off / diag);
  };
  return std::max(ratio(matrix(1, 0), matrix(0, 0)), ratio(matrix(0, 1), matrix(1, 1)));
}

ModalDriveForce piezo_modal_force(const ModePair& pair, const StatorGeometry& geom, const PiezoMaterial& piezo,
                                  const ElectrodePattern& channel_a, const ElectrodePattern& channel_b,
                                  double voltage) {
  check_pattern(channel_a);
  check_pattern(channel_b);
  // Piezo bending moment per unit width, times the width: N m.
  const double moment = -piezo.e31() * voltage * geom.piezo_offset * geom.section_width;

  // A piecewise-constant moment does virtual work only through the slope jumps
  // at the sector edges: -M [phi'(end) - phi'(start)].
  auto project = [&](const ElectrodePattern& pattern) {
    Eigen::Vector2d f = Eigen::Vector2d::Zero();
    for (const auto& s : pattern) {
      const ShapeSample a = pair.evaluate(s.start);
      const ShapeSample b = pair.evaluate(s.end);
      f(0) -= s.polarity * moment * (b.slope_cos - a.slope_cos);
      f(1) -= s.polarity * moment * (b.slope_sin - a.slope_sin);
    }
    return f;
  };
  ModalDriveForce out;
  out.matrix.col(0) = project(channel_a);
  out.matrix.col(1) = project(channel_b);
  return out;
}

ModalDriveForce piezo_modal_force(const ModePair& pair, const StatorGeometry& geom, const PiezoMaterial& piezo,
                                  double voltage) {
  const int n = geom.nodal_diameters;
  const ElectrodePattern a = alternating_pattern(n);
  return piezo_modal_force(pair, geom, piezo, a, rotated(a, pi / (2.0 * n)), voltage);
}

}  // namespace usm
