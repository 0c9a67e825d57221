#include "usm/metrology.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "usm/errors.hpp"

namespace usm {

void HeightMap::validate() const {
  if (z.rows() < 2 || z.cols() < 2) throw ConfigError("height map must have at least 2 rows and 2 columns");
  if (!(dx > 0) || !(dy > 0)) throw ConfigError("height map pitch must be positive");
  if (!z.allFinite()) throw ConfigError("height map contains non-finite heights");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

HeightMap parse_height_map(const std::string& text, double dx, double dy) {
  std::vector<std::vector<double>> grid;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    size_t col = 0;
    while (true) {
      ++col;
      const size_t comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw IoError("height map: bad value '" + std::string(cell) + "' at row " + std::to_string(line_no) +
                      ", column " + std::to_string(col));
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!grid.empty() && row.size() != grid.front().size())
      throw IoError("height map: row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                    " values, expected " + std::to_string(grid.front().size()));
    grid.push_back(std::move(row));
  }
  if (grid.empty()) throw IoError("height map: no data");

  HeightMap map;
  map.z.resize(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.front().size()));
  for (size_t i = 0; i < grid.size(); ++i)
    for (size_t j = 0; j < grid[i].size(); ++j)
      map.z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = grid[i][j];
  map.dx = dx;
  map.dy = dy;
  map.validate();
  return map;
}

HeightMap load_height_map(const std::string& path, double dx, double dy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open height map '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    HeightMap map = parse_height_map(ss.str(), dx, dy);
    map.label = path;
    return map;
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

HeightMap level_mean_plane(const HeightMap& map) {
  map.validate();
  const Eigen::Index r = map.rows(), c = map.cols();
  Eigen::MatrixXd a(r * c, 3);
  Eigen::VectorXd b(r * c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      const Eigen::Index k = i * c + j;
      a(k, 0) = 1.0;
      a(k, 1) = (static_cast<double>(j) + 0.5) * map.dx;
      a(k, 2) = (static_cast<double>(i) + 0.5) * map.dy;
      b(k) = map.z(i, j);
    }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd residual = b - a * coef;

  HeightMap out = map;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) out.z(i, j) = residual(i * c + j);
  out.leveled = true;
  return out;
}

ArealParams areal_params(const HeightMap& map) {
  map.validate();
  if (!map.leveled) throw ConfigError("areal_params requires a leveled map (call level_mean_plane first)");
  const double cell = map.dx * map.dy;
  const double area = map.area();
  const Eigen::ArrayXXd z = map.z.array();

  ArealParams p;
  p.area_size = area;
  p.Sa = z.abs().sum() * cell / area;
  p.Sq = std::sqrt(z.square().sum() * cell / area);
  p.Sp = std::max(0.0, z.maxCoeff());
  p.Sv = std::abs(std::min(0.0, z.minCoeff()));
  p.Sz = p.Sp + p.Sv;
  if (p.Sq > 0) {
    p.Ssk = (z.cube().sum() * cell / area) / (p.Sq * p.Sq * p.Sq);
    p.Sku = (z.square().square().sum() * cell / area) / (p.Sq * p.Sq * p.Sq * p.Sq);
  }
  return p;
}

RoughnessReport roughness_report(const std::vector<HeightMap>& samples) {
  if (samples.empty()) throw ConfigError("roughness report needs at least one sample");
  RoughnessReport rep;
  double sum = 0.0;
  for (const HeightMap& m : samples) {
    const ArealParams p = areal_params(m.leveled ? m : level_mean_plane(m));
    rep.samples.push_back({m.label, p});
    sum += p.Sa;
  }
  rep.mean_Sa = sum / static_cast<double>(samples.size());
  rep.area_size = rep.samples.front().params.area_size;
  return rep;
}

std::string RoughnessReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : samples) {
    nlohmann::ordered_json e;
    e["label"] = s.label;
    e["Sa"] = s.params.Sa;
    e["Sq"] = s.params.Sq;
    e["Sz"] = s.params.Sz;
    e["Sp"] = s.params.Sp;
    e["Sv"] = s.params.Sv;
    e["Ssk"] = s.params.Ssk ? nlohmann::ordered_json(*s.params.Ssk) : nlohmann::ordered_json(nullptr);
    e["Sku"] = s.params.Sku ? nlohmann::ordered_json(*s.params.Sku) : nlohmann::ordered_json(nullptr);
    e["area_size"] = s.params.area_size;
    doc["samples"].push_back(std::move(e));
  }
  doc["mean_Sa"] = mean_Sa;
  doc["area_size"] = area_size;
  return doc.dump(2) + "\n";
}

}  // namespace usm
