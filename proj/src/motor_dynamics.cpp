#include "usm/motor_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "usm/errors.hpp"

namespace usm {

using std::numbers::pi;

void RotorConfig::validate() const {
  if (!(inertia > 0)) throw ConfigError("rotor: inertia must be positive");
  if (!(mass > 0)) throw ConfigError("rotor: mass must be positive");
  if (!(axial_damping >= 0)) throw ConfigError("rotor: axial_damping must be non-negative");
  if (!(preload >= 0)) throw ConfigError("rotor: preload must be non-negative");
  if (!std::isfinite(load_torque)) throw ConfigError("rotor: load_torque must be finite");
  if (!(load_damping >= 0)) throw ConfigError("rotor: load_damping must be non-negative");
}

void SimulationConfig::validate() const {
  if (!(duration > 0)) throw ConfigError("simulation: duration must be positive");
  if (!(output_interval > 0)) throw ConfigError("simulation: output_interval must be positive");
  if (steps_per_period < 200)
    throw ConfigError("simulation: step too large, need dt <= 1/(200 f_drive) (steps_per_period >= 200)");
  if (!(preload_ramp >= 0)) throw ConfigError("simulation: preload_ramp must be non-negative");
}

double EnergyBalance::residual() const {
  return drive_work + preload_work + load_work -
         (energy_change + modal_damping + friction + axial_damping + load_damping);
}

double EnergyBalance::relative_residual() const { return std::abs(residual()) / std::abs(drive_work); }

StatorModel build_stator_model(const StatorGeometry& geom, const IsotropicMaterial& material,
                               const PiezoMaterial& piezo, int n_elements, int n_modes, double damping_ratio,
                               bool neighbor_pairs) {
  if (!(damping_ratio > 0)) throw ConfigError("modal damping ratio must be positive");
  const int n = geom.nodal_diameters;
  StatorModel model;
  model.geometry = geom;
  model.material = material;
  model.piezo = piezo;
  model.damping_ratio = damping_ratio;
  model.mesh = build_ring_mesh(geom, n_elements);
  model.system = assemble_system(model.mesh, material, geom);
  const int wanted = n_modes > 0 ? n_modes : 2 * (n + 1) + 1;
  model.modes = solve_eigen(model.system, std::min(wanted, model.mesh.dof_count()));
  model.pairs.push_back(select_mode_pair(model.modes, model.system, model.mesh, n));
  if (neighbor_pairs) {
    if (n > 1) model.pairs.push_back(select_mode_pair(model.modes, model.system, model.mesh, n - 1));
    model.pairs.push_back(select_mode_pair(model.modes, model.system, model.mesh, n + 1));
  }
  return model;
}

namespace {

// Scalar second-order DOFs m a + c v + k x = f advanced with the
// average-acceleration Newmark rule.
struct DofSet {
  std::vector<double> m, c, k;
  std::vector<double> x, v, a;
  std::vector<double> denom;

  size_t size() const { return m.size(); }

  void prepare(double dt) {
    denom.resize(size());
    for (size_t i = 0; i < size(); ++i) denom[i] = m[i] + 0.5 * dt * c[i] + 0.25 * dt * dt * k[i];
  }

  void initial_acceleration(const std::vector<double>& f) {
    for (size_t i = 0; i < size(); ++i) a[i] = (f[i] - c[i] * v[i] - k[i] * x[i]) / m[i];
  }

  // Advance from (x, v, a) into the output arrays.
  void step(double dt, const std::vector<double>& f, std::vector<double>& x1, std::vector<double>& v1,
            std::vector<double>& a1) const {
    for (size_t i = 0; i < size(); ++i) {
      const double xp = x[i] + dt * v[i] + 0.25 * dt * dt * a[i];
      const double vp = v[i] + 0.5 * dt * a[i];
      const double acc = (f[i] - c[i] * vp - k[i] * xp) / denom[i];
      a1[i] = acc;
      x1[i] = xp + 0.25 * dt * dt * acc;
      v1[i] = vp + 0.5 * dt * acc;
    }
  }
};

struct PairDrive {
  Eigen::Matrix2d matrix;
};

}  // namespace

MotorTimeSeries simulate(const StatorModel& stator, const DriveConfig& drive, const ContactConfig& contact,
                         const RotorConfig& rotor, const SimulationConfig& sim) {
  const StatorGeometry& geom = stator.geometry;
  drive.validate();
  contact.validate(geom.nodal_diameters);
  rotor.validate();
  sim.validate();

  const double f_drive = drive.resolve_frequency(stator.drive_pair().frequency_hz());
  const double omega = 2.0 * pi * f_drive;
  const double dt = 1.0 / (sim.steps_per_period * f_drive);
  if (!(dt <= 1.0 / (200.0 * f_drive))) throw ConfigError("simulation: step too large");

  const size_t npairs = stator.pairs.size();
  const size_t nmodal = 2 * npairs;
  const size_t iz = nmodal;
  const size_t irot = nmodal + 1;

  std::vector<PairDrive> forces;
  for (const auto& pair : stator.pairs)
    forces.push_back({piezo_modal_force(pair, geom, stator.piezo, drive.voltage).matrix});

  DofSet dofs;
  for (const auto& pair : stator.pairs)
    for (int j = 0; j < 2; ++j) {
      dofs.m.push_back(1.0);
      dofs.c.push_back(2.0 * stator.damping_ratio * pair.omega);
      dofs.k.push_back(pair.omega * pair.omega);
    }
  dofs.m.push_back(rotor.mass);
  dofs.c.push_back(rotor.axial_damping);
  dofs.k.push_back(0.0);
  dofs.m.push_back(rotor.inertia);
  dofs.c.push_back(rotor.load_damping);
  dofs.k.push_back(0.0);
  const size_t ndof = dofs.size();
  dofs.x.assign(ndof, 0.0);
  dofs.v.assign(ndof, 0.0);
  dofs.a.assign(ndof, 0.0);
  dofs.prepare(dt);

  // Shape table: shapes[p][i] for pair p at contact point i.
  const std::vector<double> angles = contact.angles();
  const size_t npts = angles.size();
  std::vector<std::vector<ShapeSample>> shapes(npairs, std::vector<ShapeSample>(npts));
  for (size_t p = 0; p < npairs; ++p)
    for (size_t i = 0; i < npts; ++i) shapes[p][i] = stator.pairs[p].evaluate(angles[i]);

  const double zc = geom.contact_offset();
  const double r = geom.mean_radius;
  const double a_w = stator.drive_pair().deflection_amplitude;

  std::vector<SurfaceState> surface(npts);
  auto update_surface = [&](const std::vector<double>& x, const std::vector<double>& v) {
    for (size_t i = 0; i < npts; ++i) {
      double w = 0, wd = 0, sl = 0, sld = 0;
      for (size_t p = 0; p < npairs; ++p) {
        const ShapeSample& s = shapes[p][i];
        const double qc = x[2 * p], qs = x[2 * p + 1];
        const double vc = v[2 * p], vs = v[2 * p + 1];
        w += s.w_cos * qc + s.w_sin * qs;
        wd += s.w_cos * vc + s.w_sin * vs;
        sl += s.slope_cos * qc + s.slope_sin * qs;
        sld += s.slope_cos * vc + s.slope_sin * vs;
      }
      surface[i] = SurfaceState{w, wd, -zc * sl, -zc * sld};
    }
  };

  auto preload_at = [&](double t) {
    if (sim.preload_ramp > 0 && t < sim.preload_ramp) return rotor.preload * t / sim.preload_ramp;
    return rotor.preload;
  };
  const double psi = drive.phase_offset;
  auto drive_force = [&](double t, size_t p, int member) {
    const Eigen::Matrix2d& m = forces[p].matrix;
    return m(member, 0) * std::cos(omega * t) + m(member, 1) * std::cos(omega * t + psi);
  };

  // Forces at time t with a given contact state.
  auto assemble_forces = [&](double t, const ContactState& cs, std::vector<double>& f) {
    f.assign(ndof, 0.0);
    for (size_t p = 0; p < npairs; ++p) {
      const Eigen::Vector2d q = modal_reaction(cs, shapes[p], geom);
      f[2 * p] = drive_force(t, p, 0) + q(0);
      f[2 * p + 1] = drive_force(t, p, 1) + q(1);
    }
    f[iz] = -preload_at(t) + cs.axial_force;
    f[irot] = cs.torque - rotor.load_torque;
  };

  ContactState cs;
  auto evaluate_at = [&](const std::vector<double>& x, const std::vector<double>& v, ContactState& out) {
    update_surface(x, v);
    evaluate_contact(surface, x[iz], v[irot], geom, contact, out);
  };

  // Energy bookkeeping over accepted states; `surface` must match `cs`.
  struct Powers {
    double drive, preload, load, modal_damping, friction, axial, load_damping;
  };
  auto powers_at = [&](double t, const std::vector<double>& v, const ContactState& c) {
    Powers p{};
    for (size_t k = 0; k < npairs; ++k) {
      p.drive += drive_force(t, k, 0) * v[2 * k] + drive_force(t, k, 1) * v[2 * k + 1];
      p.modal_damping += dofs.c[2 * k] * v[2 * k] * v[2 * k] + dofs.c[2 * k + 1] * v[2 * k + 1] * v[2 * k + 1];
    }
    p.preload = -preload_at(t) * v[iz];
    p.load = -rotor.load_torque * v[irot];
    p.axial = dofs.c[iz] * v[iz] * v[iz];
    p.load_damping = dofs.c[irot] * v[irot] * v[irot];
    p.friction = 0.0;
    for (size_t i = 0; i < npts; ++i) p.friction -= c.friction[i] * c.slip[i];
    return p;
  };
  auto energy_at = [&](const std::vector<double>& x, const std::vector<double>& v, const ContactState& c) {
    double e = penalty_energy(c, contact);
    for (size_t i = 0; i < ndof; ++i) e += 0.5 * (dofs.m[i] * v[i] * v[i] + dofs.k[i] * x[i] * x[i]);
    return e;
  };

  // Probe outputs at an accepted state.
  constexpr int kProbes = 6;
  using ProbeRow = std::array<double, kProbes>;
  auto probes_at = [&](const std::vector<double>& x, const std::vector<double>& v, const ContactState& c) {
    const double qc = x[0], qs = x[1];
    return ProbeRow{r * v[irot], r * x[irot], c.friction.empty() ? 0.0 : c.friction[0], c.torque,
                    c.axial_force, a_w * std::sqrt(qc * qc + qs * qs)};
  };

  MotorTimeSeries out;
  out.radius = r;
  out.drive_frequency = f_drive;
  out.output_interval = sim.output_interval;
  const size_t nsamples = static_cast<size_t>(std::floor(sim.duration / sim.output_interval + 1e-9)) + 1;
  out.time.reserve(nsamples);
  auto push_sample = [&](double t, const ProbeRow& row) {
    out.time.push_back(t);
    out.surface_speed.push_back(row[0]);
    out.surface_displacement.push_back(row[1]);
    out.friction_probe.push_back(row[2]);
    out.torque.push_back(row[3]);
    out.axial_force.push_back(row[4]);
    out.wave_amplitude.push_back(row[5]);
  };

  const size_t nsteps = static_cast<size_t>(std::ceil(sim.duration / dt - 1e-9));
  if (sim.record_trace) {
    out.trace.start = 0.0;
    out.trace.step = dt;
    out.trace.values.reserve(nsteps + 1);
  }

  // Initial state.
  std::vector<double> f(ndof), x1(ndof), v1(ndof), a1(ndof);
  evaluate_at(dofs.x, dofs.v, cs);
  assemble_forces(0.0, cs, f);
  dofs.initial_acceleration(f);

  const double e0 = energy_at(dofs.x, dofs.v, cs);
  Powers p_prev = powers_at(0.0, dofs.v, cs);
  ProbeRow row_prev = probes_at(dofs.x, dofs.v, cs);
  push_sample(0.0, row_prev);
  if (sim.record_trace) out.trace.values.push_back(cs.torque);
  out.max_abs_rotor_speed = std::abs(dofs.v[irot]);
  size_t next_sample = 1;

  EnergyBalance& eb = out.energy;
  ContactState predicted;
  double t = 0.0;
  for (size_t n = 0; n < nsteps; ++n) {
    const double t1 = static_cast<double>(n + 1) * dt;
    assemble_forces(t1, cs, f);
    dofs.step(dt, f, x1, v1, a1);
    if (sim.coupling == ContactCoupling::predictor_corrector) {
      evaluate_at(x1, v1, predicted);
      assemble_forces(t1, predicted, f);
      dofs.step(dt, f, x1, v1, a1);
    }
    for (size_t i = 0; i < ndof; ++i)
      if (!std::isfinite(x1[i]) || !std::isfinite(v1[i]))
        throw DivergenceError("non-finite state after t = " + std::to_string(t) + " s", t);
    dofs.x.swap(x1);
    dofs.v.swap(v1);
    dofs.a.swap(a1);
    t = t1;

    evaluate_at(dofs.x, dofs.v, cs);
    const Powers p_now = powers_at(t, dofs.v, cs);
    eb.drive_work += 0.5 * dt * (p_prev.drive + p_now.drive);
    eb.preload_work += 0.5 * dt * (p_prev.preload + p_now.preload);
    eb.load_work += 0.5 * dt * (p_prev.load + p_now.load);
    eb.modal_damping += 0.5 * dt * (p_prev.modal_damping + p_now.modal_damping);
    eb.friction += 0.5 * dt * (p_prev.friction + p_now.friction);
    eb.axial_damping += 0.5 * dt * (p_prev.axial + p_now.axial);
    eb.load_damping += 0.5 * dt * (p_prev.load_damping + p_now.load_damping);
    p_prev = p_now;

    const ProbeRow row = probes_at(dofs.x, dofs.v, cs);
    while (next_sample < nsamples) {
      const double ts = static_cast<double>(next_sample) * sim.output_interval;
      if (ts > t) break;
      const double s = (ts - (t - dt)) / dt;
      ProbeRow interp;
      for (int k = 0; k < kProbes; ++k) interp[k] = row_prev[k] + s * (row[k] - row_prev[k]);
      push_sample(ts, interp);
      ++next_sample;
    }
    row_prev = row;
    if (sim.record_trace) out.trace.values.push_back(cs.torque);
    out.max_abs_rotor_speed = std::max(out.max_abs_rotor_speed, std::abs(dofs.v[irot]));
  }
  eb.energy_change = energy_at(dofs.x, dofs.v, cs) - e0;
  return out;
}

SteadyState detect_steady_state(std::span<const double> values, double sample_interval, double window,
                                double tolerance) {
  if (!(sample_interval > 0) || !(window > 0)) throw ConfigError("steady state: window and interval must be positive");
  const size_t per_window = static_cast<size_t>(std::llround(window / sample_interval));
  if (per_window < 1 || values.size() < 2 * per_window + 1)
    throw ConfigError("steady state: series must be longer than two windows");
  const size_t nwin = values.size() / per_window;
  std::vector<double> means(nwin);
  for (size_t k = 0; k < nwin; ++k) {
    double s = 0.0;
    for (size_t i = 0; i < per_window; ++i) s += values[k * per_window + i];
    means[k] = s / static_cast<double>(per_window);
  }
  const double end_time = static_cast<double>(values.size() - 1) * sample_interval;
  // Walk back from the last pair while neighbors agree.
  size_t first_ok = nwin - 1;
  for (size_t k = nwin - 1; k-- > 0;) {
    if (std::abs(means[k + 1] - means[k]) <= tolerance * std::abs(means[k + 1]))
      first_ok = k;
    else
      break;
  }
  if (first_ok == nwin - 1) return {end_time, false};
  return {static_cast<double>((first_ok + 1) * per_window) * sample_interval, true};
}

SteadyState detect_steady_state(const MotorTimeSeries& series, double window, double tolerance) {
  return detect_steady_state(series.surface_speed, series.output_interval, window, tolerance);
}

EnvelopeResult envelope_average(std::span<const double> values, double start, double step, double t_ss,
                                double window, double spike_factor) {
  if (!(step > 0) || !(window > 0)) throw ConfigError("envelope: window and step must be positive");
  const double end = start + static_cast<double>(values.size()) * step;
  if (!(t_ss >= start) || !(t_ss < end)) throw ConfigError("envelope: t_ss outside the series");
  const size_t first = static_cast<size_t>(std::ceil((t_ss - start) / step - 1e-9));
  const size_t per_window = std::max<size_t>(1, static_cast<size_t>(std::llround(window / step)));

  std::vector<double> peaks;
  for (size_t i = first; i + per_window <= values.size(); i += per_window)
    peaks.push_back(*std::max_element(values.begin() + static_cast<std::ptrdiff_t>(i),
                                      values.begin() + static_cast<std::ptrdiff_t>(i + per_window)));
  if (peaks.size() < 5) throw ConfigError("envelope: fewer than 5 envelope points after t_ss");

  auto median = [](std::vector<double> v) {
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
      const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
      m = 0.5 * (m + lower);
    }
    return m;
  };
  const double med = median(peaks);
  std::vector<double> dev(peaks.size());
  for (size_t i = 0; i < peaks.size(); ++i) dev[i] = std::abs(peaks[i] - med);
  // A perfectly flat envelope has MAD at rounding level; floor it so that
  // rounding noise is never counted as a spike.
  const double mad = std::max(median(dev), 1e-9 * std::abs(med));

  EnvelopeResult res;
  double sum = 0.0;
  for (double p : peaks) {
    if (std::abs(p - med) > spike_factor * mad) {
      ++res.rejected;
      continue;
    }
    sum += p;
    ++res.points;
  }
  res.torque = sum / res.points;
  return res;
}

EnvelopeResult envelope_average(const MotorTimeSeries& series, double t_ss, double spike_factor) {
  if (series.trace.values.empty()) throw ConfigError("envelope: series has no torque trace");
  return envelope_average(series.trace.values, series.trace.start, series.trace.step, t_ss,
                          1.0 / series.drive_frequency, spike_factor);
}

MeanSpeed mean_speed(const MotorTimeSeries& series, double t_ss) {
  if (series.time.empty() || !(t_ss >= series.time.front()) || !(t_ss <= series.time.back()))
    throw ConfigError("mean speed: t_ss outside the series");
  double sum = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < series.size(); ++i)
    if (series.time[i] >= t_ss - 1e-12) {
      sum += series.surface_speed[i];
      ++count;
    }
  MeanSpeed m;
  m.surface = sum / static_cast<double>(count);
  m.angular = m.surface / series.radius;
  return m;
}

}  // namespace usm
