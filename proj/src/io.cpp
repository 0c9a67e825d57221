#include "usm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "usm/errors.hpp"

namespace usm {

namespace {

void append_g(std::string& out, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<size_t>(n));
}

std::vector<std::vector<double>> parse_columns(const std::string& csv, const std::string& header, const char* what) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw IoError(std::string(what) + ": expected header '" + header + "'");
  size_t ncol = 1;
  for (char ch : header) ncol += ch == ',';
  std::vector<std::vector<double>> cols(ncol);
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (size_t c = 0; c < ncol; ++c) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p || (c + 1 < ncol && *end != ',') || (c + 1 == ncol && *end != '\0'))
        throw IoError(std::string(what) + ": bad value at row " + std::to_string(row) + ", column " +
                      std::to_string(c + 1));
      cols[c].push_back(v);
      p = end + 1;
    }
  }
  return cols;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string time_series_csv(const MotorTimeSeries& s) {
  std::string out = "t,s_speed,surf_disp,fric_probe,torque,fz,wave_amp\n";
  out.reserve(out.size() + s.size() * 7 * 25);
  for (size_t i = 0; i < s.size(); ++i) {
    for (double v : {s.time[i], s.surface_speed[i], s.surface_displacement[i], s.friction_probe[i], s.torque[i],
                     s.axial_force[i], s.wave_amplitude[i]}) {
      append_g(out, v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string torque_trace_csv(const MotorTimeSeries& s) {
  std::string out = "t,torque\n";
  const auto& tr = s.trace;
  out.reserve(out.size() + tr.values.size() * 50);
  for (size_t i = 0; i < tr.values.size(); ++i) {
    append_g(out, tr.start + static_cast<double>(i) * tr.step);
    out += ',';
    append_g(out, tr.values[i]);
    out += '\n';
  }
  return out;
}

MotorTimeSeries parse_time_series(const std::string& series_csv, const std::string& trace_csv, double radius,
                                  double drive_frequency) {
  auto cols = parse_columns(series_csv, "t,s_speed,surf_disp,fric_probe,torque,fz,wave_amp", "time series CSV");
  MotorTimeSeries s;
  s.radius = radius;
  s.drive_frequency = drive_frequency;
  s.time = std::move(cols[0]);
  s.surface_speed = std::move(cols[1]);
  s.surface_displacement = std::move(cols[2]);
  s.friction_probe = std::move(cols[3]);
  s.torque = std::move(cols[4]);
  s.axial_force = std::move(cols[5]);
  s.wave_amplitude = std::move(cols[6]);
  if (s.time.size() < 2) throw IoError("time series CSV: need at least two samples");
  s.output_interval = (s.time.back() - s.time.front()) / static_cast<double>(s.time.size() - 1);
  for (double v : s.surface_speed) s.max_abs_rotor_speed = std::max(s.max_abs_rotor_speed, std::abs(v) / radius);

  auto tr = parse_columns(trace_csv, "t,torque", "torque trace CSV");
  if (tr[0].size() < 2) throw IoError("torque trace CSV: need at least two samples");
  s.trace.start = tr[0].front();
  s.trace.step = (tr[0].back() - tr[0].front()) / static_cast<double>(tr[0].size() - 1);
  s.trace.values = std::move(tr[1]);
  return s;
}

double evaluation_start(const MotorTimeSeries& series, const SteadyState& ss) {
  const double end = series.time.back();
  if (!ss.settled) return 0.5 * end;
  const double min_tail = kMinEvaluationPeriods / series.drive_frequency;
  return std::max(0.0, std::min(ss.time, end - min_tail));
}

RunSummary summarize(const MotorTimeSeries& series, std::optional<double> omega_ideal, double steady_window,
                     double steady_tolerance) {
  RunSummary r;
  const SteadyState ss = detect_steady_state(series, steady_window, steady_tolerance);
  r.t_ss = ss.time;
  r.settled = ss.settled;
  r.evaluated_from = evaluation_start(series, ss);
  const double from = r.evaluated_from;
  const EnvelopeResult env = envelope_average(series, from);
  r.reported_torque = env.torque;
  r.envelope_points = env.points;
  r.envelope_rejected = env.rejected;
  const MeanSpeed ms = mean_speed(series, from);
  r.mean_speed = ms.angular;
  r.mean_surface_speed = ms.surface;
  r.omega_ideal = omega_ideal;
  r.final_displacement = series.surface_displacement.back();
  double fz = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < series.size(); ++i)
    if (series.time[i] >= from) {
      fz += series.axial_force[i];
      ++n;
    }
  r.mean_axial_force = n ? fz / static_cast<double>(n) : 0.0;
  return r;
}

std::string RunSummary::to_json() const {
  nlohmann::ordered_json j;
  j["t_ss"] = t_ss;
  j["settled"] = settled;
  j["evaluated_from"] = evaluated_from;
  j["reported_torque"] = reported_torque;
  j["envelope_points"] = envelope_points;
  j["envelope_rejected"] = envelope_rejected;
  j["mean_speed"] = mean_speed;
  j["mean_surface_speed"] = mean_surface_speed;
  j["omega_ideal"] = omega_ideal ? nlohmann::ordered_json(*omega_ideal) : nlohmann::ordered_json(nullptr);
  j["final_displacement"] = final_displacement;
  j["mean_axial_force"] = mean_axial_force;
  return j.dump(2) + "\n";
}

std::optional<double> ideal_speed(const StatorModel& stator, const DriveConfig& drive) {
  const ModePair& pair = stator.drive_pair();
  const ModalDriveForce f = piezo_modal_force(pair, stator.geometry, stator.piezo, drive.voltage);
  const WaveSolution wave = steady_wave_response(pair, f, drive, stator.damping_ratio);
  try {
    return ideal_no_slip_speed(wave, stator.geometry);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

}  // namespace usm
