// Acceptance report: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--jobs N] [--expect-fail LIST]
//
// LIST is a comma-separated set of criterion numbers that are known to fail
// and are documented as such. The exit status is 0 only when the set of
// failing criteria equals LIST exactly, so a regression elsewhere or a
// criterion that starts passing both turn the run red.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usm/config.hpp"
#include "usm/contact.hpp"
#include "usm/io.hpp"
#include "usm/metrology.hpp"
#include "usm/motor_dynamics.hpp"
#include "usm/stator_fem.hpp"
#include "usm/sweep.hpp"
#include "usm/wave_drive.hpp"

using namespace usm;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double analytic_hz(const StatorGeometry& g, const IsotropicMaterial& m, int n) {
  const double ei = m.youngs_modulus * g.section_width * std::pow(g.section_thickness, 3) / 12.0;
  const double rho_a = m.density * g.section_width * g.section_thickness;
  const double k = n / g.mean_radius;
  return k * k * std::sqrt(ei / rho_a) / (2.0 * pi);
}

Verdict eigen_oracle() {
  const StatorGeometry geom;
  const IsotropicMaterial cu = builtin_library().isotropic("Copper");
  const Stopwatch clock;
  const RingMesh mesh = build_ring_mesh(geom, 64);
  const SystemMatrices sys = assemble_system(mesh, cu, geom);
  const ModeSet modes = solve_eigen(sys, 13);
  const double elapsed = clock.seconds();

  double worst_freq = 0.0, worst_pair = 0.0;
  bool complete = true;
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> f;
    for (int j = 0; j < modes.size(); ++j)
      if (modes.wavenumbers[j] == n) f.push_back(modes.frequencies(j));
    if (f.size() != 2) {
      complete = false;
      continue;
    }
    const double ref = analytic_hz(geom, cu, n);
    for (double x : f) worst_freq = std::max(worst_freq, std::abs(x - ref) / ref);
    worst_pair = std::max(worst_pair, std::abs(f[0] - f[1]) / std::max(f[0], f[1]));
  }
  return {complete && worst_freq < 0.01 && worst_pair < 1e-3 && elapsed < 1.0,
          "max freq error " + fmt("%.3e", worst_freq) + ", max pair split " + fmt("%.3e", worst_pair) +
              ", " + fmt("%.3f", elapsed) + " s" + (complete ? "" : ", missing pair")};
}

Verdict wave_purity(const MotorCase& base) {
  const Stopwatch clock;
  const ModePair& pair = base.stator.drive_pair();
  const ModalDriveForce force = piezo_modal_force(pair, base.stator.geometry, base.stator.piezo, 100.0);
  const double zeta = base.stator.damping_ratio;
  const WaveSolution fwd = steady_wave_response(pair, force, pair.omega, pi / 2, zeta);
  const WaveSolution rev = steady_wave_response(pair, force, pair.omega, -pi / 2, zeta);
  const double elapsed = clock.seconds();

  const double ratio = fwd.backward / fwd.forward;
  const double swap = std::max(std::abs(rev.backward - fwd.forward) / fwd.forward, rev.forward / fwd.forward);
  return {ratio < 1e-9 && swap < 1e-9 && elapsed < 1.0,
          "W_b/W_f " + fmt("%.3e", ratio) + ", swap mismatch " + fmt("%.3e", swap) + ", " +
              fmt("%.3f", elapsed) + " s"};
}

Verdict friction_cone() {
  std::mt19937_64 rng(314159);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  const StatorGeometry geom;
  long evaluations = 0, violations = 0;
  ContactState s;
  for (int trial = 0; trial < 1200; ++trial) {
    ContactConfig cfg;
    cfg.point_count = 96;
    cfg.penalty_stiffness = std::pow(10.0, 5.0 + 4.0 * pos(rng));
    cfg.regularization_velocity = std::pow(10.0, -6.0 + 4.0 * pos(rng));
    cfg.cof = 0.01 + 1.0 * pos(rng);
    std::vector<SurfaceState> surf(96);
    for (auto& p : surf) p = {1e-6 * u(rng), 0.1 * u(rng), 1e-7 * u(rng), 0.5 * u(rng)};
    evaluate_contact(surf, 1e-6 * u(rng), 40.0 * u(rng), geom, cfg, s);
    for (size_t i = 0; i < surf.size(); ++i, ++evaluations) {
      const double n = s.normal[i], f = s.friction[i];
      const bool cone = n > 0 ? std::abs(f) < cfg.cof * n : f == 0.0;
      violations += !(n >= 0.0) || !cone || !(f * s.slip[i] <= 0.0);
    }
  }
  return {evaluations >= 100000 && violations == 0,
          std::to_string(evaluations) + " evaluations, " + std::to_string(violations) + " violations"};
}

Verdict energy(const MotorCase& base, const MotorTimeSeries& coarse) {
  const Stopwatch clock;
  SimulationConfig fine = base.simulation;
  fine.steps_per_period *= 2;
  const MotorTimeSeries halved = simulate(base.stator, base.drive, base.contact, base.rotor, fine);
  const double elapsed = clock.seconds();
  const double r1 = coarse.energy.relative_residual(), r2 = halved.energy.relative_residual();
  return {r1 < 0.01 && r2 < r1,
          "residual " + fmt("%.3e", r1) + " at dt=1/(400f), " + fmt("%.3e", r2) + " at dt/2 (" +
              fmt("%.1f", elapsed) + " s)"};
}

Verdict settling(const MotorCase& base, const MotorTimeSeries& ts) {
  const SteadyState ss = detect_steady_state(ts, base.steady_window, base.steady_tolerance);
  const std::optional<double> omega = ideal_speed(base.stator, base.drive);
  const double duration = ts.time.back();
  const double bound = omega ? *omega * ts.radius * duration : 0.0;
  const double disp = ts.surface_displacement.back();
  return {ss.settled && omega && disp > 0.0 && disp < bound,
          std::string(ss.settled ? "settled" : "NOT settled") + " at t_ss " + fmt("%.3e", ss.time) +
              " s, displacement " + fmt("%.2f", disp * 1e6) + " um, bound " + fmt("%.2f", bound * 1e6) + " um"};
}

std::string curve_values(const SweepCurve& c) {
  std::ostringstream os;
  for (size_t i = 0; i < c.rows.size(); ++i) os << (i ? " " : "") << fmt("%.3g", c.rows[i].torque);
  return os.str();
}

bool interior(const PeakReport& p, const SweepCurve& c) {
  return !p.boundary_maximum && p.row > 0 && p.row + 1 < c.rows.size();
}

Verdict preload_trend(const SweepCurve& c, double elapsed, int jobs) {
  const PeakReport p = find_peak(c);
  const double ratio = c.rows.front().torque / p.torque;
  return {p.unimodal && interior(p, c) && ratio < 0.5,
          std::string(p.unimodal ? "unimodal" : "NOT unimodal") + ", peak " + fmt("%.4g", p.torque) +
              " N m at " + fmt("%g", p.param) + " N, T(25)/peak " + fmt("%.3f", ratio) + ", " +
              fmt("%.1f", elapsed) + " s with " + std::to_string(jobs) + " jobs; T = [" + curve_values(c) + "]"};
}

Verdict cof_trend(const SweepCurve& c) {
  const PeakReport p = find_peak(c);
  const bool bracket = p.param >= 0.1 && p.param <= 0.45;
  return {p.unimodal && interior(p, c) && bracket,
          std::string(p.unimodal ? "unimodal" : "NOT unimodal") + ", argmax " + fmt("%g", p.param) +
              (bracket ? " (in [0.1, 0.45])" : " (outside [0.1, 0.45])") + "; T = [" + curve_values(c) + "]"};
}

Verdict metrology() {
  const Stopwatch clock;
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_real_distribution<double> pitch(0.3, 4.0);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };

  double worst = 0.0;
  int invariant_breaks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    HeightMap m;
    m.z.resize(40, 60);
    for (Eigen::Index i = 0; i < m.z.size(); ++i) m.z(i) = g(rng) + (trial % 2 ? 0.3 * std::pow(g(rng), 3) : 0.0);
    m.dx = pitch(rng);
    m.dy = pitch(rng);
    m = level_mean_plane(m);
    const ArealParams p = areal_params(m);

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, hi = -INFINITY, lo = INFINITY;
    for (Eigen::Index i = 0; i < m.z.rows(); ++i)
      for (Eigen::Index j = 0; j < m.z.cols(); ++j) {
        const double z = m.z(i, j);
        s1 += std::abs(z);
        s2 += z * z;
        s3 += z * z * z;
        s4 += z * z * z * z;
        hi = std::max(hi, z);
        lo = std::min(lo, z);
      }
    const double cnt = static_cast<double>(m.z.size());
    const double sq = std::sqrt(s2 / cnt);
    worst = std::max({worst, rel(p.Sa, s1 / cnt), rel(p.Sq, sq), rel(*p.Ssk, s3 / cnt / (sq * sq * sq)),
                      rel(*p.Sku, s4 / cnt / (sq * sq * sq * sq)), rel(p.Sp, std::max(0.0, hi)),
                      rel(p.Sv, std::max(0.0, -lo))});
    invariant_breaks += !(p.Sa <= p.Sq) || p.Sz != p.Sp + p.Sv;
  }

  const double amp = 1.3;
  std::vector<double> errors;
  double exact_worst = 0.0;
  for (int cells : {8, 16, 32, 64, 128}) {
    HeightMap m;
    m.dx = 1.0 / cells;
    m.dy = 0.5;
    m.z.resize(3, 2 * cells);
    for (Eigen::Index i = 0; i < m.z.rows(); ++i)
      for (Eigen::Index j = 0; j < m.z.cols(); ++j) m.z(i, j) = amp * std::cos(2 * pi * (j + 0.5) * m.dx);
    const ArealParams p = areal_params(level_mean_plane(m));
    errors.push_back(std::abs(p.Sa - 2 * amp / pi));
    exact_worst = std::max({exact_worst, rel(p.Sq, amp / std::sqrt(2.0)), rel(*p.Sku, 1.5)});
  }
  double worst_order = 0.0;
  for (size_t i = 1; i < errors.size(); ++i)
    worst_order = std::max(worst_order, std::abs(std::log2(errors[i - 1] / errors[i]) - 2.0));
  const double elapsed = clock.seconds();

  return {worst < 1e-12 && invariant_breaks == 0 && worst_order < 0.05 && exact_worst < 1e-12 && elapsed < 5.0,
          "oracle rel error " + fmt("%.2e", worst) + ", invariant breaks " + std::to_string(invariant_breaks) +
              ", Sa order deviation " + fmt("%.3f", worst_order) + ", " + fmt("%.2f", elapsed) + " s"};
}

bool identical(const MotorTimeSeries& a, const MotorTimeSeries& b) {
  return a.time == b.time && a.surface_speed == b.surface_speed && a.surface_displacement == b.surface_displacement &&
         a.friction_probe == b.friction_probe && a.torque == b.torque && a.axial_force == b.axial_force &&
         a.wave_amplitude == b.wave_amplitude && a.trace.values == b.trace.values &&
         a.energy.friction == b.energy.friction;
}

std::set<int> parse_list(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance report"};
  int jobs = 4;
  std::string expect;
  app.add_option("--jobs", jobs, "concurrent sweep jobs")->check(CLI::PositiveNumber);
  app.add_option("--expect-fail", expect, "comma-separated criteria documented as failing");
  CLI11_PARSE(app, argc, argv);

  const MotorCase base = RunConfig{}.build_case();
  auto preset_case = [](const SweepPreset& p) {
    const RunConfig cfg;
    return p.stator_material.empty() ? cfg.build_case() : cfg.build_case(p.stator_material);
  };

  std::vector<std::pair<int, std::function<Verdict()>>> criteria;
  MotorTimeSeries first;
  SweepCurve preload, cof;
  const SweepPreset usr30 = sweep_preset("usr30_preload"), cof_preset = sweep_preset("cof_sweep");

  criteria.emplace_back(1, eigen_oracle);
  criteria.emplace_back(2, [&] { return wave_purity(base); });
  criteria.emplace_back(3, friction_cone);
  criteria.emplace_back(4, [&] {
    first = simulate(base.stator, base.drive, base.contact, base.rotor, base.simulation);
    return energy(base, first);
  });
  criteria.emplace_back(5, [&] { return settling(base, first); });
  criteria.emplace_back(6, [&] {
    const Stopwatch clock;
    preload = run_sweep(preset_case(usr30), usr30.spec, jobs);
    return preload_trend(preload, clock.seconds(), jobs);
  });
  criteria.emplace_back(7, [&] {
    cof = run_sweep(preset_case(cof_preset), cof_preset.spec, jobs);
    return cof_trend(cof);
  });
  criteria.emplace_back(8, metrology);
  criteria.emplace_back(9, [&] {
    const MotorTimeSeries again = simulate(base.stator, base.drive, base.contact, base.rotor, base.simulation);
    const bool run_same = identical(first, again);
    const bool preload_same = run_sweep(preset_case(usr30), usr30.spec, 1).to_csv() == preload.to_csv();
    const bool cof_same = run_sweep(preset_case(cof_preset), cof_preset.spec, 1).to_csv() == cof.to_csv();
    return Verdict{run_same && preload_same && cof_same,
                   std::string("default run ") + (run_same ? "identical" : "DIFFERS") + ", usr30 sweep jobs " +
                       std::to_string(jobs) + " vs 1 " + (preload_same ? "identical" : "DIFFERS") +
                       ", cof sweep " + (cof_same ? "identical" : "DIFFERS")};
  });

  std::set<int> failed;
  for (auto& [id, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) failed.insert(id);
    std::printf("criterion %d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }

  const std::set<int> expected = parse_list(expect);
  std::printf("%zu/%zu criteria pass", criteria.size() - failed.size(), criteria.size());
  if (!expected.empty()) {
    std::printf("; documented failures:");
    for (int id : expected) std::printf(" %d", id);
  }
  std::printf("\n");
  if (failed != expected) {
    std::printf("failing set differs from the documented set\n");
    return 1;
  }
  return 0;
}
