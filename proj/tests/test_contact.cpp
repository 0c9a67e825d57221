#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "usm/contact.hpp"
#include "usm/errors.hpp"

using namespace usm;
using std::numbers::pi;

namespace {

struct CountingViolations {
  long normal = 0, cone = 0, sign = 0, open_gap = 0;
};

}  // namespace

TEST_CASE("open gaps and frictionless contact") {
  const StatorGeometry g;
  ContactConfig cfg;
  std::vector<SurfaceState> surf(16);
  for (size_t i = 0; i < surf.size(); ++i) surf[i] = {1e-6 * std::cos(4 * 2 * pi * i / 16.0), 0.0, 0.0, 0.3};

  const ContactState open = evaluate_contact(surf, 2e-6, 1.0, g, cfg);
  CHECK(open.axial_force == 0.0);
  CHECK(open.torque == 0.0);
  for (size_t i = 0; i < surf.size(); ++i) {
    CHECK(open.normal[i] == 0.0);
    CHECK(open.friction[i] == 0.0);
  }

  cfg.cof = 0.0;
  const ContactState slick = evaluate_contact(surf, -1e-6, 3.0, g, cfg);
  CHECK(slick.axial_force > 0.0);
  CHECK(slick.torque == 0.0);
}

TEST_CASE("single point penalty and friction values") {
  const StatorGeometry g;
  ContactConfig cfg;
  cfg.penalty_stiffness = 1e8;
  cfg.cof = 0.2;
  const std::vector<SurfaceState> one{{1e-6, 0.0, 0.0, 0.0}};
  const ContactState s = evaluate_contact(one, 0.0, 1.0, g, cfg);  // slip R w = 0.0125 m/s >> v_reg
  CHECK(s.normal[0] == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(s.friction[0] < 0.0);
  CHECK(std::abs(s.friction[0]) < 20.0);
  CHECK(s.friction[0] == doctest::Approx(-20.0).epsilon(1e-9));
  CHECK(s.torque == doctest::Approx(g.mean_radius * s.friction[0]).epsilon(1e-15));
  CHECK(s.gap[0] == doctest::Approx(-1e-6).epsilon(1e-15));
}

TEST_CASE("friction cone and sign invariants over random states") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  const StatorGeometry g;
  CountingViolations bad;
  long evaluations = 0;
  ContactState s;
  for (int trial = 0; trial < 1000; ++trial) {
    ContactConfig cfg;
    cfg.point_count = 100;
    cfg.penalty_stiffness = std::pow(10.0, 5.0 + 4.0 * pos(rng));
    cfg.regularization_velocity = std::pow(10.0, -6.0 + 4.0 * pos(rng));
    cfg.cof = 1.5 * pos(rng);
    std::vector<SurfaceState> surf(100);
    for (auto& p : surf) p = {1e-6 * u(rng), 0.1 * u(rng), 1e-7 * u(rng), 0.5 * u(rng)};
    evaluate_contact(surf, 1e-6 * u(rng), 40.0 * u(rng), g, cfg, s);
    for (size_t i = 0; i < surf.size(); ++i, ++evaluations) {
      bad.normal += !(s.normal[i] >= 0.0);
      bad.open_gap += (s.gap[i] > 0 && s.normal[i] != 0.0);
      const bool loaded = s.normal[i] > 0;
      bad.cone += loaded ? !(std::abs(s.friction[i]) < cfg.cof * s.normal[i] || cfg.cof == 0.0)
                         : (s.friction[i] != 0.0);
      bad.sign += !(s.friction[i] * s.slip[i] <= 0.0);
    }
  }
  CHECK(evaluations >= 100000);
  CHECK(bad.normal == 0);
  CHECK(bad.open_gap == 0);
  CHECK(bad.cone == 0);
  CHECK(bad.sign == 0);
}

TEST_CASE("power bookkeeping closes per evaluation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const StatorGeometry g;
  ContactConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SurfaceState> surf(128);
    for (auto& p : surf) p = {1e-6 * u(rng), 0.2 * u(rng), 0.0, 0.6 * u(rng)};
    const double zdot = 0.01 * u(rng), w = 20.0 * u(rng);
    const ContactState s = evaluate_contact(surf, 0.2e-6 * u(rng), w, g, cfg);
    const ContactPower p = contact_power(s, surf, zdot, w);
    const double scale = std::abs(p.rotor) + std::abs(p.stator) + p.dissipation + std::abs(p.penalty_rate);
    CHECK(std::abs(p.rotor + p.stator + p.dissipation + p.penalty_rate) <= 1e-10 * scale);
    CHECK(p.dissipation >= 0.0);
  }
}

TEST_CASE("regularized friction approaches Coulomb as v_reg shrinks") {
  const StatorGeometry g;
  // Slips of 10, -50 and 250 um/s against a rim speed of 6.25 mm/s.
  const std::vector<SurfaceState> surf{{1e-6, 0, 0, 0.00624}, {1e-6, 0, 0, 0.0063}, {1e-6, 0, 0, 0.006}};
  double previous = INFINITY;
  for (double v : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
    ContactConfig cfg;
    cfg.regularization_velocity = v;
    const ContactState s = evaluate_contact(surf, 0.0, 0.5, g, cfg);
    double err = 0.0;
    for (size_t i = 0; i < surf.size(); ++i) {
      const double coulomb = -cfg.cof * s.normal[i] * (s.slip[i] > 0 ? 1.0 : -1.0);
      err = std::max(err, std::abs(s.friction[i] - coulomb) / (cfg.cof * s.normal[i]));
    }
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-12);
}

TEST_CASE("modal reaction") {
  const StatorGeometry g;
  ModePair pair;
  pair.nodal_diameters = 4;
  pair.harmonic << 1.0, 0.0, 0.0, -320.0, 0.0, 1.0, 320.0, 0.0;

  ContactConfig cfg;
  const auto angles = cfg.angles();
  std::vector<ShapeSample> shapes;
  for (double a : angles) shapes.push_back(pair.evaluate(a));

  ContactState none;
  none.normal.assign(angles.size(), 0.0);
  none.friction.assign(angles.size(), 0.0);
  CHECK(modal_reaction(none, shapes, g).norm() == 0.0);

  ContactState uniform = none;
  uniform.normal.assign(angles.size(), 0.4);
  CHECK(modal_reaction(uniform, shapes, g).norm() < 1e-12);

  ContactState single = none;
  single.normal[5] = 3.0;
  const Eigen::Vector2d q = modal_reaction(single, shapes, g);
  CHECK(q(0) == doctest::Approx(-3.0 * shapes[5].w_cos).epsilon(1e-15));
  CHECK(q(1) == doctest::Approx(-3.0 * shapes[5].w_sin).epsilon(1e-15));

  ContactState tangential = none;
  tangential.normal[9] = 1.0;
  tangential.friction[9] = -0.2;
  const Eigen::Vector2d qt = modal_reaction(tangential, shapes, g);
  CHECK(qt(0) == doctest::Approx(-shapes[9].w_cos - 0.2 * g.contact_offset() * shapes[9].slope_cos).epsilon(1e-14));
}

TEST_CASE("penalty energy and configuration checks") {
  ContactConfig cfg;
  ContactState s;
  s.normal = {10.0, 0.0, 20.0};
  CHECK(penalty_energy(s, cfg) == doctest::Approx(0.5 * (100.0 + 400.0) / 1e7).epsilon(1e-15));

  CHECK(cfg.angles().size() == 128);
  CHECK(cfg.angles()[32] == doctest::Approx(pi / 2).epsilon(1e-15));
  cfg.point_count = 15;
  CHECK_THROWS_AS(cfg.validate(4), ConfigError);
  cfg.point_count = 16;
  CHECK_NOTHROW(cfg.validate(4));
  cfg.regularization_velocity = 0.0;
  CHECK_THROWS_AS(cfg.validate(4), ConfigError);
}
