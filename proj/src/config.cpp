#include "usm/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "usm/errors.hpp"

namespace usm {

using nlohmann::json;

namespace {

/// Reads the known keys of one JSON object and rejects anything else.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const char* key) const { return j_.at(key); }
  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + path_ + "." + it.key());
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_sweep(Section& root, RunConfig& cfg) {
  if (!root.has("sweep")) return;
  Section s(root.at("sweep"), "sweep");
  SweepSection out;
  s.get("preset", out.preset);
  s.get("smoothing_window", out.smoothing_window);
  if (s.has("parameter") || s.has("values")) {
    SweepSpec spec;
    std::string name = "preload_N";
    s.get("parameter", name);
    spec.parameter = parse_parameter(name);
    if (s.has("values")) {
      const json& v = s.at("values");
      if (v.is_string())
        spec.values = parse_values(v.get<std::string>());
      else
        s.get("values", spec.values);
    }
    out.spec = spec;
  }
  s.finish();
  cfg.sweep = out;
}

}  // namespace

ContactCoupling parse_coupling(const std::string& name) {
  if (name == "predictor_corrector") return ContactCoupling::predictor_corrector;
  if (name == "explicit_start") return ContactCoupling::explicit_start;
  throw ConfigError("unknown contact coupling '" + name + "' (predictor_corrector or explicit_start)");
}

std::string coupling_name(ContactCoupling c) {
  return c == ContactCoupling::explicit_start ? "explicit_start" : "predictor_corrector";
}

double parse_angle(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  auto ends_with = [&](const std::string& suffix) {
    return body.size() > suffix.size() && body.compare(body.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("deg")) {
    body.resize(body.size() - 3);
    scale = std::numbers::pi / 180.0;
  } else if (ends_with("rad")) {
    body.resize(body.size() - 3);
  }
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(body, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != body.size()) throw ConfigError("bad angle '" + text + "'");
  return v * scale;
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw IoError(std::string("config JSON: ") + e.what());
  }
  RunConfig cfg;
  Section root(doc, "config");
  root.get("schema_version", cfg.schema_version);
  if (cfg.schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version) + " (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");

  if (root.has("geometry")) {
    Section s(root.at("geometry"), "geometry");
    auto& g = cfg.geometry;
    s.get("mean_radius", g.mean_radius);
    s.get("section_width", g.section_width);
    s.get("section_thickness", g.section_thickness);
    s.get("tooth_height", g.tooth_height);
    s.get("tooth_count", g.tooth_count);
    s.get("nodal_diameters", g.nodal_diameters);
    s.get("piezo_offset", g.piezo_offset);
    s.finish();
  }
  if (root.has("materials")) {
    Section s(root.at("materials"), "materials");
    s.get("stator", cfg.stator_material);
    s.get("piezo", cfg.piezo_material);
    if (s.has("inline")) {
      try {
        cfg.catalog.load_json_text(s.at("inline").dump());
      } catch (const IoError& e) {
        throw ConfigError(std::string("materials.inline: ") + e.what());
      }
    }
    s.finish();
  }
  if (root.has("mesh")) {
    Section s(root.at("mesh"), "mesh");
    s.get("elements", cfg.n_elements);
    s.get("modes", cfg.n_modes);
    s.get("damping_ratio", cfg.damping_ratio);
    s.get("neighbor_pairs", cfg.neighbor_pairs);
    s.finish();
  }
  if (root.has("drive")) {
    Section s(root.at("drive"), "drive");
    s.get("voltage", cfg.drive.voltage);
    s.get("frequency", cfg.drive.frequency);
    s.get("detuning", cfg.drive.detuning);
    if (s.has("phase_offset")) {
      const json& p = s.at("phase_offset");
      if (p.is_string())
        cfg.drive.phase_offset = parse_angle(p.get<std::string>());
      else
        s.get("phase_offset", cfg.drive.phase_offset);
    }
    s.finish();
  }
  if (root.has("contact")) {
    Section s(root.at("contact"), "contact");
    s.get("point_count", cfg.contact.point_count);
    s.get("penalty_stiffness", cfg.contact.penalty_stiffness);
    s.get("regularization_velocity", cfg.contact.regularization_velocity);
    s.get("cof", cfg.contact.cof);
    s.finish();
  }
  if (root.has("rotor")) {
    Section s(root.at("rotor"), "rotor");
    s.get("inertia", cfg.rotor.inertia);
    s.get("mass", cfg.rotor.mass);
    s.get("axial_damping", cfg.rotor.axial_damping);
    s.get("preload", cfg.rotor.preload);
    s.get("load_torque", cfg.rotor.load_torque);
    s.get("load_damping", cfg.rotor.load_damping);
    s.finish();
  }
  if (root.has("simulation")) {
    Section s(root.at("simulation"), "simulation");
    auto& sim = cfg.simulation;
    s.get("duration", sim.duration);
    s.get("output_interval", sim.output_interval);
    s.get("steps_per_period", sim.steps_per_period);
    s.get("preload_ramp", sim.preload_ramp);
    std::string coupling = coupling_name(sim.coupling);
    s.get("coupling", coupling);
    sim.coupling = parse_coupling(coupling);
    s.get("steady_window", cfg.steady_window);
    s.get("steady_tolerance", cfg.steady_tolerance);
    s.finish();
  }
  read_sweep(root, cfg);
  root.finish();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema_version"] = cfg.schema_version;
  const auto& g = cfg.geometry;
  j["geometry"] = {{"mean_radius", g.mean_radius},         {"section_width", g.section_width},
                   {"section_thickness", g.section_thickness}, {"tooth_height", g.tooth_height},
                   {"tooth_count", g.tooth_count},         {"nodal_diameters", g.nodal_diameters},
                   {"piezo_offset", g.piezo_offset}};
  j["materials"] = {{"stator", cfg.stator_material}, {"piezo", cfg.piezo_material}};
  j["mesh"] = {{"elements", cfg.n_elements},
               {"modes", cfg.n_modes},
               {"damping_ratio", cfg.damping_ratio},
               {"neighbor_pairs", cfg.neighbor_pairs}};
  j["drive"] = {{"voltage", cfg.drive.voltage},
                {"frequency", cfg.drive.frequency},
                {"detuning", cfg.drive.detuning},
                {"phase_offset", cfg.drive.phase_offset}};
  j["contact"] = {{"point_count", cfg.contact.point_count},
                  {"penalty_stiffness", cfg.contact.penalty_stiffness},
                  {"regularization_velocity", cfg.contact.regularization_velocity},
                  {"cof", cfg.contact.cof}};
  j["rotor"] = {{"inertia", cfg.rotor.inertia},           {"mass", cfg.rotor.mass},
                {"axial_damping", cfg.rotor.axial_damping}, {"preload", cfg.rotor.preload},
                {"load_torque", cfg.rotor.load_torque},   {"load_damping", cfg.rotor.load_damping}};
  const auto& s = cfg.simulation;
  j["simulation"] = {{"duration", s.duration},
                     {"output_interval", s.output_interval},
                     {"steps_per_period", s.steps_per_period},
                     {"preload_ramp", s.preload_ramp},
                     {"coupling", coupling_name(s.coupling)},
                     {"steady_window", cfg.steady_window},
                     {"steady_tolerance", cfg.steady_tolerance}};
  if (cfg.sweep) {
    nlohmann::ordered_json sw;
    if (!cfg.sweep->preset.empty()) sw["preset"] = cfg.sweep->preset;
    if (cfg.sweep->spec) {
      sw["parameter"] = std::string(parameter_name(cfg.sweep->spec->parameter));
      sw["values"] = cfg.sweep->spec->values;
    }
    sw["smoothing_window"] = cfg.sweep->smoothing_window;
    j["sweep"] = sw;
  }
  return j.dump(2) + "\n";
}

void RunConfig::validate() const {
  geometry.validate();
  if (!catalog.isotropic_entries().count(stator_material))
    throw ConfigError("stator material '" + stator_material + "' is not an isotropic catalog entry");
  if (!catalog.piezo_entries().count(piezo_material))
    throw ConfigError("piezo material '" + piezo_material + "' is not a piezoelectric catalog entry");
  if (auto errs = validate_isotropic(catalog.isotropic(stator_material)); !errs.empty())
    throw ConfigError("stator material: " + errs.front());
  if (auto errs = validate_piezo(catalog.piezo(piezo_material)); !errs.empty())
    throw ConfigError("piezo material: " + errs.front());
  if (n_elements < 8 * geometry.nodal_diameters)
    throw ConfigError("mesh too coarse: need at least 8n = " + std::to_string(8 * geometry.nodal_diameters) +
                      " elements for n = " + std::to_string(geometry.nodal_diameters));
  if (n_modes < 0) throw ConfigError("mesh.modes must be >= 0");
  if (!(damping_ratio > 0)) throw ConfigError("modal damping ratio must be positive");
  drive.validate();
  contact.validate(geometry.nodal_diameters);
  rotor.validate();
  simulation.validate();
  if (!(steady_window > 0) || !(steady_tolerance > 0)) throw ConfigError("steady-state window and tolerance must be positive");
  if (sweep) {
    if (sweep->preset.empty() == !sweep->spec.has_value())
      throw ConfigError("sweep: give either a preset or a parameter with values");
    if (!sweep->preset.empty()) sweep_preset(sweep->preset);
    if (sweep->spec) sweep->spec->validate();
    if (sweep->smoothing_window < 1) throw ConfigError("sweep.smoothing_window must be >= 1");
  }
}

MotorCase RunConfig::build_case() const { return build_case(stator_material); }

MotorCase RunConfig::build_case(const std::string& stator_material_override) const {
  validate();
  MotorCase c;
  c.stator = build_stator_model(geometry, catalog.isotropic(stator_material_override), catalog.piezo(piezo_material),
                                n_elements, n_modes, damping_ratio, neighbor_pairs);
  c.drive = drive;
  c.contact = contact;
  c.rotor = rotor;
  c.simulation = simulation;
  c.steady_window = steady_window;
  c.steady_tolerance = steady_tolerance;
  return c;
}

}  // namespace usm
