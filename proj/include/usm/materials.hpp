#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace usm {

/// Isotropic linear-elastic solid. SI units.
struct IsotropicMaterial {
  std::string name;
  double density = 0.0;         // kg/m^3
  double poisson_ratio = 0.0;   // -
  double youngs_modulus = 0.0;  // Pa
};

/// Transversely isotropic piezoceramic in stress-charge form.
///
/// Voigt ordering is (11, 22, 33, 23, 13, 12), so the shear coupling terms
/// e15 and e24 sit in columns 5 and 4 of the coupling matrix. Permittivity is
/// stored relative to the vacuum value.
struct PiezoMaterial {
  std::string name;
  double density = 0.0;                    // kg/m^3
  Eigen::Matrix<double, 6, 6> elasticity;  // c_E, Pa
  Eigen::Matrix<double, 3, 6> coupling;    // e, C/m^2
  Eigen::Matrix3d relative_permittivity;   // eps_r, -

  /// Transverse coupling coefficient e31 (1-based entry (3,1)).
  double e31() const { return coupling(2, 0); }
};

/// Builds a piezo material from the upper triangle of its elasticity matrix.
/// Entries below the diagonal of `upper` are ignored and mirrored from above.
PiezoMaterial make_piezo(std::string name, double density,
                         const Eigen::Matrix<double, 6, 6>& upper,
                         const Eigen::Matrix<double, 3, 6>& coupling,
                         const Eigen::Matrix3d& relative_permittivity);

/// Named materials. Isotropic and piezoelectric entries live in separate maps
/// because the piezo entries carry no isotropic modulus or Poisson ratio.
class MaterialCatalog {
 public:
  void add(IsotropicMaterial m);
  void add(PiezoMaterial m);

  bool contains(std::string_view name) const;
  const IsotropicMaterial& isotropic(std::string_view name) const;
  const PiezoMaterial& piezo(std::string_view name) const;
  double density(std::string_view name) const;

  std::vector<std::string> names() const;

  const std::map<std::string, IsotropicMaterial, std::less<>>& isotropic_entries() const {
    return isotropic_;
  }
  const std::map<std::string, PiezoMaterial, std::less<>>& piezo_entries() const {
    return piezo_;
  }

  /// Merges materials from a JSON file. The file holds either one material
  /// object or an array of them. Entries with `elasticity` are piezoelectric
  /// (`elasticity` 36 numbers row-major, `coupling` 18, `relative_permittivity` 9);
  /// the rest need `poisson_ratio` and `youngs_modulus`.
  void load_json_file(const std::string& path);
  void load_json_text(std::string_view text);

 private:
  std::map<std::string, IsotropicMaterial, std::less<>> isotropic_;
  std::map<std::string, PiezoMaterial, std::less<>> piezo_;
};

/// Ultem 1000, Epoxy, PZT-5H, Copper and Aluminum.
MaterialCatalog builtin_library();

/// Lists every violated invariant; empty when the material is admissible.
std::vector<std::string> validate_piezo(const PiezoMaterial& m);
std::vector<std::string> validate_isotropic(const IsotropicMaterial& m);

}  // namespace usm
