#include "usm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "usm/errors.hpp"
#include "usm/io.hpp"

namespace usm {

namespace {

constexpr double kStandardGravity = 9.80665;

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double snap(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::stod(buf);
}

}  // namespace

std::string_view parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::preload_N: return "preload_N";
    case SweepParameter::preload_g: return "preload_g";
    case SweepParameter::cof: return "cof";
    case SweepParameter::voltage: return "voltage";
    case SweepParameter::frequency: return "frequency";
  }
  return "";
}

std::string_view parameter_unit(SweepParameter p) {
  switch (p) {
    case SweepParameter::preload_N: return "N";
    case SweepParameter::preload_g: return "g";
    case SweepParameter::cof: return "-";
    case SweepParameter::voltage: return "V";
    case SweepParameter::frequency: return "Hz";
  }
  return "";
}

SweepParameter parse_parameter(std::string_view name) {
  for (auto p : {SweepParameter::preload_N, SweepParameter::preload_g, SweepParameter::cof, SweepParameter::voltage,
                 SweepParameter::frequency})
    if (parameter_name(p) == name) return p;
  if (name == "preload") return SweepParameter::preload_N;
  throw ConfigError("unknown sweep parameter '" + std::string(name) +
                    "' (expected preload_N, preload_g, cof, voltage or frequency)");
}

void SweepSpec::validate() const {
  if (values.size() < 3) throw ConfigError("sweep needs at least 3 values");
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    if (i > 0 && !(v > values[i - 1])) throw ConfigError("sweep values must be strictly ascending");
    switch (parameter) {
      case SweepParameter::cof:
        if (v < 0 || v > 2) throw ConfigError("cof sweep values must lie in [0, 2]");
        break;
      case SweepParameter::preload_N:
      case SweepParameter::preload_g:
      case SweepParameter::voltage:
        if (v < 0) throw ConfigError(std::string(parameter_name(parameter)) + " sweep values must be >= 0");
        break;
      case SweepParameter::frequency:
        if (v <= 0) throw ConfigError("frequency sweep values must be positive");
        break;
    }
  }
}

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  auto number = [&](std::string_view s) {
    const std::string str(s);
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != str.size()) throw ConfigError("bad number '" + str + "' in value list");
    return v;
  };
  if (text.find(':') != std::string_view::npos) {
    const size_t c1 = text.find(':');
    const size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ConfigError("range must be start:stop:step");
    const double a = number(text.substr(0, c1));
    const double b = number(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = number(text.substr(c2 + 1));
    if (!(step > 0) || b < a) throw ConfigError("range needs step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) out.push_back(snap(a + static_cast<double>(i) * step));
    return out;
  }
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    out.push_back(number(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

SweepPreset sweep_preset(std::string_view name) {
  SweepPreset p;
  p.name = std::string(name);
  if (name == "usr30_preload") {
    p.spec = {SweepParameter::preload_N, parse_values("25:250:25")};
  } else if (name == "usr60_preload") {
    p.spec = {SweepParameter::preload_N, parse_values("25:500:25")};
  } else if (name == "ultem_preload_g") {
    p.spec.parameter = SweepParameter::preload_g;
    const int n = 20;
    for (int i = 0; i < n; ++i)
      p.spec.values.push_back(snap(20.0 * std::pow(5000.0 / 20.0, static_cast<double>(i) / (n - 1))));
    p.stator_material = "Ultem 1000";
  } else if (name == "cof_sweep") {
    p.spec = {SweepParameter::cof, parse_values("0.05:0.6:0.05")};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> preset_names() { return {"usr30_preload", "usr60_preload", "ultem_preload_g", "cof_sweep"}; }

double grams_to_newtons(double grams) {
  if (!(grams >= 0)) throw ConfigError("mass in grams must be non-negative");
  return grams * kStandardGravity * 1e-3;
}

MotorCase apply_parameter(const MotorCase& base, SweepParameter p, double value) {
  MotorCase c = base;
  switch (p) {
    case SweepParameter::preload_N: c.rotor.preload = value; break;
    case SweepParameter::preload_g: c.rotor.preload = grams_to_newtons(value); break;
    case SweepParameter::cof: c.contact.cof = value; break;
    case SweepParameter::voltage: c.drive.voltage = value; break;
    case SweepParameter::frequency: c.drive.frequency = value; break;
  }
  return c;
}

SweepRow evaluate_case(const MotorCase& c, double param) {
  SweepRow row;
  row.param = param;
  try {
    const MotorTimeSeries ts = simulate(c.stator, c.drive, c.contact, c.rotor, c.simulation);
    const RunSummary s = summarize(ts, std::nullopt, c.steady_window, c.steady_tolerance);
    row.settled = s.settled;
    row.t_ss = s.t_ss;
    row.torque = s.reported_torque;
    row.speed = s.mean_speed;
  } catch (const DivergenceError& e) {
    row.failed = true;
    row.error = e.what();
  } catch (const ConfigError& e) {
    row.failed = true;
    row.error = e.what();
  }
  if (row.failed) {
    row.torque = row.speed = row.t_ss = std::numeric_limits<double>::quiet_NaN();
    row.settled = false;
  }
  return row;
}

SweepCurve run_sweep(const MotorCase& base, const SweepSpec& spec, int jobs) {
  spec.validate();
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  SweepCurve curve;
  curve.parameter = spec.parameter;
  curve.rows.resize(spec.values.size());

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < spec.values.size(); i = next++) {
      const double v = spec.values[i];
      curve.rows[i] = evaluate_case(apply_parameter(base, spec.parameter, v), v);
    }
  };
  const size_t workers = std::min<size_t>(static_cast<size_t>(jobs), spec.values.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return curve;
}

std::string SweepCurve::to_csv() const {
  std::string out = "param,torque,speed,t_ss,settled\n";
  for (const SweepRow& r : rows)
    out += format_g(r.param) + "," + format_g(r.torque) + "," + format_g(r.speed) + "," + format_g(r.t_ss) + "," +
           (r.settled ? "1" : "0") + "\n";
  return out;
}

std::string SweepCurve::to_svg() const {
  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : rows)
    if (!r.failed) pts.emplace_back(r.param, r.torque);

  const double w = 640, h = 420, left = 80, right = 20, top = 20, bottom = 60;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!pts.empty()) {
    xmin = xmax = pts.front().first;
    ymax = pts.front().second;
    for (auto [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
  }
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    s << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << snap(xv) << "</text>\n";
    s << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
      << snap(yv) << "</text>\n";
  }
  s << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 15 << "\" font-size=\"13\" text-anchor=\"middle\">"
    << parameter_name(parameter) << " [" << parameter_unit(parameter) << "]</text>\n";
  s << "<text x=\"18\" y=\"" << (top + h - bottom) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (top + h - bottom) / 2 << ")\">reaction torque [N m]</text>\n";
  if (!pts.empty()) {
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (auto [x, y] : pts) s << px(x) << "," << py(y) << " ";
    s << "\"/>\n";
    for (auto [x, y] : pts) s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

bool is_unimodal(const std::vector<double>& values) {
  bool falling = false;
  for (size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (d < 0) falling = true;
    if (d > 0 && falling) return false;
  }
  return true;
}

PeakReport find_peak(const SweepCurve& curve, int smoothing_window) {
  if (smoothing_window < 1) throw ConfigError("smoothing window must be at least 1");
  std::vector<size_t> idx;
  for (size_t i = 0; i < curve.rows.size(); ++i)
    if (curve.rows[i].settled && !curve.rows[i].failed) idx.push_back(i);
  if (idx.empty()) throw ConfigError("find_peak: no settled rows");
  if (idx.size() < 3) throw ConfigError("find_peak: needs at least 3 settled rows");

  PeakReport rep;
  const auto n = static_cast<long>(idx.size());
  const long half = smoothing_window / 2;
  rep.smoothed.resize(idx.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half), hi = std::min(n - 1, i + half);
    double s = 0.0;
    for (long k = lo; k <= hi; ++k) s += curve.rows[idx[static_cast<size_t>(k)]].torque;
    rep.smoothed[static_cast<size_t>(i)] = s / static_cast<double>(hi - lo + 1);
  }
  const size_t best = static_cast<size_t>(std::max_element(rep.smoothed.begin(), rep.smoothed.end()) - rep.smoothed.begin());
  rep.row = idx[best];
  rep.param = curve.rows[rep.row].param;
  rep.torque = curve.rows[rep.row].torque;
  rep.unimodal = is_unimodal(rep.smoothed);
  rep.boundary_maximum = best == 0 || best + 1 == idx.size();
  return rep;
}

namespace {

struct Normalized {
  std::vector<double> x, y;
};

Normalized normalize(const std::vector<std::pair<double, double>>& pts) {
  auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end(),
                                          [](const auto& a, const auto& b) { return a.first < b.first; });
  auto [ymin, ymax] = std::minmax_element(pts.begin(), pts.end(),
                                          [](const auto& a, const auto& b) { return a.second < b.second; });
  const double x0 = xmin->first, dx = xmax->first - xmin->first;
  const double y0 = ymin->second, dy = ymax->second - ymin->second;
  if (!(dx > 0) || !(dy > 0)) throw ConfigError("compare_trends: degenerate curve (all parameters or torques equal)");
  Normalized n;
  for (auto [x, y] : pts) {
    n.x.push_back((x - x0) / dx);
    n.y.push_back((y - y0) / dy);
  }
  return n;
}

double interpolate(const Normalized& c, double x) {
  if (x <= c.x.front()) return c.y.front();
  if (x >= c.x.back()) return c.y.back();
  const size_t k = static_cast<size_t>(std::upper_bound(c.x.begin(), c.x.end(), x) - c.x.begin());
  const double t = (x - c.x[k - 1]) / (c.x[k] - c.x[k - 1]);
  return c.y[k - 1] + t * (c.y[k] - c.y[k - 1]);
}

}  // namespace

TrendComparison compare_trends(const SweepCurve& sim, const std::vector<std::pair<double, double>>& experiment) {
  std::vector<std::pair<double, double>> s;
  for (const SweepRow& r : sim.rows)
    if (!r.failed) s.emplace_back(r.param, r.torque);
  if (s.size() < 3 || experiment.size() < 3) throw ConfigError("compare_trends: both curves need at least 3 points");
  std::vector<std::pair<double, double>> e = experiment;
  std::sort(e.begin(), e.end());

  const Normalized ns = normalize(s), ne = normalize(e);
  auto peak = [](const std::vector<std::pair<double, double>>& c) {
    return *std::max_element(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  };
  auto values = [](const std::vector<std::pair<double, double>>& c) {
    std::vector<double> v;
    for (const auto& p : c) v.push_back(p.second);
    return v;
  };
  const auto ps = peak(s), pe = peak(e);
  if (pe.first == 0.0 || pe.second == 0.0) throw ConfigError("compare_trends: experimental peak at zero");

  TrendComparison out;
  out.location_ratio = ps.first / pe.first;
  out.overshoot_pct = (ps.second / pe.second - 1.0) * 100.0;
  out.both_unimodal = is_unimodal(values(s)) && is_unimodal(values(e));
  double acc = 0.0;
  for (size_t i = 0; i < ne.x.size(); ++i) {
    const double d = interpolate(ns, ne.x[i]) - ne.y[i];
    acc += d * d;
  }
  out.shape_distance = std::sqrt(acc / static_cast<double>(ne.x.size()));
  return out;
}

}  // namespace usm
