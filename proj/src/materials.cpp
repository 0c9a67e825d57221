#include "usm/materials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "usm/errors.hpp"

namespace usm {

PiezoMaterial make_piezo(std::string name, double density,
                         const Eigen::Matrix<double, 6, 6>& upper,
                         const Eigen::Matrix<double, 3, 6>& coupling,
                         const Eigen::Matrix3d& relative_permittivity) {
  PiezoMaterial m;
  m.name = std::move(name);
  m.density = density;
  m.elasticity = upper.triangularView<Eigen::Upper>();
  m.elasticity.triangularView<Eigen::StrictlyLower>() = upper.transpose();
  m.coupling = coupling;
  m.relative_permittivity = relative_permittivity;
  return m;
}

void MaterialCatalog::add(IsotropicMaterial m) {
  piezo_.erase(m.name);
  auto key = m.name;
  isotropic_.insert_or_assign(std::move(key), std::move(m));
}

void MaterialCatalog::add(PiezoMaterial m) {
  isotropic_.erase(m.name);
  auto key = m.name;
  piezo_.insert_or_assign(std::move(key), std::move(m));
}

bool MaterialCatalog::contains(std::string_view name) const {
  return isotropic_.find(name) != isotropic_.end() || piezo_.find(name) != piezo_.end();
}

const IsotropicMaterial& MaterialCatalog::isotropic(std::string_view name) const {
  auto it = isotropic_.find(name);
  if (it == isotropic_.end()) {
    if (piezo_.find(name) != piezo_.end())
      throw ConfigError("material '" + std::string(name) + "' is piezoelectric, not isotropic");
    throw ConfigError("unknown material '" + std::string(name) + "'");
  }
  return it->second;
}

const PiezoMaterial& MaterialCatalog::piezo(std::string_view name) const {
  auto it = piezo_.find(name);
  if (it == piezo_.end()) {
    if (isotropic_.find(name) != isotropic_.end())
      throw ConfigError("material '" + std::string(name) + "' is not piezoelectric");
    throw ConfigError("unknown material '" + std::string(name) + "'");
  }
  return it->second;
}

double MaterialCatalog::density(std::string_view name) const {
  if (auto it = isotropic_.find(name); it != isotropic_.end()) return it->second.density;
  return piezo(name).density;
}

std::vector<std::string> MaterialCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : isotropic_) out.push_back(k);
  for (const auto& [k, v] : piezo_) out.push_back(k);
  return out;
}

namespace {

template <int Rows, int Cols>
Eigen::Matrix<double, Rows, Cols> read_matrix(const nlohmann::json& j, const char* key,
                                              const std::string& owner) {
  if (!j.contains(key)) throw IoError("material '" + owner + "': missing '" + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != static_cast<size_t>(Rows * Cols))
    throw IoError("material '" + owner + "': '" + key + "' must hold " +
                  std::to_string(Rows * Cols) + " numbers");
  Eigen::Matrix<double, Rows, Cols> m;
  for (int r = 0; r < Rows; ++r)
    for (int c = 0; c < Cols; ++c) m(r, c) = arr.at(static_cast<size_t>(r * Cols + c)).get<double>();
  return m;
}

void load_entry(MaterialCatalog& cat, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("name") || !j.contains("density"))
    throw IoError("material entry needs at least 'name' and 'density'");
  const auto name = j.at("name").get<std::string>();
  const double density = j.at("density").get<double>();
  if (j.contains("elasticity")) {
    PiezoMaterial m;
    m.name = name;
    m.density = density;
    m.elasticity = read_matrix<6, 6>(j, "elasticity", name);
    m.coupling = read_matrix<3, 6>(j, "coupling", name);
    m.relative_permittivity = read_matrix<3, 3>(j, "relative_permittivity", name);
    cat.add(std::move(m));
  } else {
    if (!j.contains("poisson_ratio") || !j.contains("youngs_modulus"))
      throw IoError("material '" + name + "': isotropic entries need 'poisson_ratio' and 'youngs_modulus'");
    cat.add(IsotropicMaterial{name, density, j.at("poisson_ratio").get<double>(),
                              j.at("youngs_modulus").get<double>()});
  }
}

}  // namespace

void MaterialCatalog::load_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("material JSON: ") + e.what());
  }
  try {
    if (doc.is_array())
      for (const auto& entry : doc) load_entry(*this, entry);
    else
      load_entry(*this, doc);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("material JSON: ") + e.what());
  }
}

void MaterialCatalog::load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open material file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_json_text(ss.str());
}

MaterialCatalog builtin_library() {
  MaterialCatalog cat;
  cat.add(IsotropicMaterial{"Ultem 1000", 1270.0, 0.30, 3.2e9});
  cat.add(IsotropicMaterial{"Epoxy", 3500.0, 0.33, 0.7e9});
  cat.add(IsotropicMaterial{"Copper", 8960.0, 0.35, 110e9});
  cat.add(IsotropicMaterial{"Aluminum", 2700.0, 0.33, 70e9});

  Eigen::Matrix<double, 6, 6> c = Eigen::Matrix<double, 6, 6>::Zero();
  c(0, 0) = 1.27205e11;
  c(0, 1) = 8.02122e10;
  c(0, 2) = 8.46702e10;
  c(1, 1) = 1.27205e11;
  c(1, 2) = 8.46702e10;
  c(2, 2) = 1.17436e11;
  c(3, 3) = 2.29885e10;
  c(4, 4) = 2.29885e10;
  c(5, 5) = 2.34742e10;

  Eigen::Matrix<double, 3, 6> e = Eigen::Matrix<double, 3, 6>::Zero();
  e(0, 4) = 17.0345;
  e(1, 3) = 17.0345;
  e(2, 0) = -6.62281;
  e(2, 1) = -6.62281;
  e(2, 2) = 23.2403;

  const Eigen::Matrix3d eps = Eigen::Vector3d(1704.4, 1704.4, 1433.6).asDiagonal();
  cat.add(make_piezo("PZT-5H", 7500.0, c, e, eps));
  return cat;
}

std::vector<std::string> validate_isotropic(const IsotropicMaterial& m) {
  std::vector<std::string> report;
  if (!(m.density > 0)) report.push_back("density must be positive (got " + std::to_string(m.density) + ")");
  if (!(m.youngs_modulus > 0))
    report.push_back("youngs_modulus must be positive (got " + std::to_string(m.youngs_modulus) + ")");
  if (!(m.poisson_ratio > 0 && m.poisson_ratio < 0.5))
    report.push_back("poisson_ratio must lie in (0, 0.5) (got " + std::to_string(m.poisson_ratio) + ")");
  return report;
}

std::vector<std::string> validate_piezo(const PiezoMaterial& m) {
  std::vector<std::string> report;
  auto entry = [](int r, int c) { return "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")"; };

  if (!(m.density > 0)) report.push_back("density must be positive");

  const double asym = (m.elasticity - m.elasticity.transpose()).cwiseAbs().maxCoeff();
  if (asym > 0) report.push_back("elasticity not symmetric (max asymmetry " + std::to_string(asym) + " Pa)");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(
      0.5 * (m.elasticity + m.elasticity.transpose()), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig > 0))
    report.push_back("elasticity not positive definite (smallest eigenvalue " + std::to_string(min_eig) + " Pa)");

  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const double v = m.relative_permittivity(r, c);
      if (r != c && v != 0)
        report.push_back("relative_permittivity not diagonal: entry " + entry(r, c) + " = " + std::to_string(v));
      if (r == c && !(v > 0))
        report.push_back("relative_permittivity diagonal entry " + entry(r, c) + " must be positive");
    }

  // Transversely isotropic pattern: only (1,5), (2,4), (3,1), (3,2), (3,3).
  static constexpr bool allowed[3][6] = {{false, false, false, false, true, false},
                                         {false, false, false, true, false, false},
                                         {true, true, true, false, false, false}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c)
      if (!allowed[r][c] && m.coupling(r, c) != 0)
        report.push_back("coupling sparsity pattern violated: entry " + entry(r, c) + " = " +
                         std::to_string(m.coupling(r, c)) + " must be zero");
  if (m.coupling(0, 4) != m.coupling(1, 3))
    report.push_back("coupling sparsity pattern violated: entry (1,5) != entry (2,4)");
  if (m.coupling(2, 0) != m.coupling(2, 1))
    report.push_back("coupling sparsity pattern violated: entry (3,1) != entry (3,2)");
  return report;
}

}  // namespace usm
