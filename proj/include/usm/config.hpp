#pragma once

#include <optional>
#include <string>

#include "usm/materials.hpp"
#include "usm/sweep.hpp"

namespace usm {

inline constexpr int kConfigSchemaVersion = 1;

/// Sweep section of a run configuration: either a preset name or an
/// explicit parameter with values.
struct SweepSection {
  std::string preset;
  std::optional<SweepSpec> spec;
  int smoothing_window = 1;
};

/// Complete description of a study. Defaults reproduce the USR30-like copper
/// stator; a JSON file overrides them field by field and CLI flags override
/// the file.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  StatorGeometry geometry;
  std::string stator_material = "Copper";
  std::string piezo_material = "PZT-5H";
  MaterialCatalog catalog = builtin_library();

  int n_elements = 64;
  int n_modes = 0;  // 0: enough for the drive pair
  double damping_ratio = 0.01;
  bool neighbor_pairs = false;

  DriveConfig drive;
  ContactConfig contact;
  RotorConfig rotor;
  SimulationConfig simulation;
  double steady_window = 2.5e-4;
  double steady_tolerance = 0.02;

  std::optional<SweepSection> sweep;

  /// Runs every module-level precondition that does not need the FE model.
  void validate() const;

  /// Builds the stator model and bundles the run parameters.
  MotorCase build_case() const;
  MotorCase build_case(const std::string& stator_material_override) const;
};

/// Parses a configuration document. Unknown keys and wrong types are
/// ConfigErrors; malformed JSON is an IoError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Canonical JSON form (every field, inline materials omitted).
std::string to_json(const RunConfig& cfg);

ContactCoupling parse_coupling(const std::string& name);
std::string coupling_name(ContactCoupling c);

/// Angle with optional unit suffix: "1.57", "1.57rad", "-90deg".
double parse_angle(const std::string& text);

}  // namespace usm
