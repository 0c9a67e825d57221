#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace usm {

/// Gridded surface heights in micrometres. Row index runs along y, column
/// index along x; cell (i, j) is centred at ((j + 1/2) dx, (i + 1/2) dy).
struct HeightMap {
  Eigen::MatrixXd z;  // um
  double dx = 1.0;    // um
  double dy = 1.0;    // um
  bool leveled = false;
  std::string label;

  Eigen::Index rows() const { return z.rows(); }
  Eigen::Index cols() const { return z.cols(); }
  double area() const { return static_cast<double>(z.size()) * dx * dy; }

  /// Throws ConfigError unless rows, cols >= 2, pitches > 0 and all heights finite.
  void validate() const;
};

/// Reads a rectangular numeric CSV grid. Errors carry the row (and column
/// for bad cells), counting from 1.
HeightMap load_height_map(const std::string& path, double dx, double dy);
HeightMap parse_height_map(const std::string& text, double dx, double dy);

/// Subtracts the least-squares plane a + b x + c y over the cell centres.
HeightMap level_mean_plane(const HeightMap& map);

struct ArealParams {
  double Sa = 0.0;
  double Sq = 0.0;
  double Sz = 0.0;
  double Sp = 0.0;
  double Sv = 0.0;
  std::optional<double> Ssk;  // empty when Sq = 0
  std::optional<double> Sku;
  double area_size = 0.0;     // um^2
};

/// Midpoint-rule areal parameters of a leveled map. Sz = Sp + Sv.
/// Throws ConfigError when the map has not been leveled.
ArealParams areal_params(const HeightMap& map);

struct RoughnessSample {
  std::string label;
  ArealParams params;
};

struct RoughnessReport {
  std::vector<RoughnessSample> samples;
  double mean_Sa = 0.0;
  double area_size = 0.0;  // of the first sample, um^2

  std::string to_json() const;
};

/// Levels each map when needed and tabulates its parameters.
RoughnessReport roughness_report(const std::vector<HeightMap>& samples);

}  // namespace usm
