#include <doctest.h>

#include <numbers>

#include <json.hpp>

#include "usm/config.hpp"
#include "usm/errors.hpp"
#include "usm/io.hpp"

using namespace usm;

TEST_CASE("defaults and field overrides") {
  const RunConfig d = parse_run_config("{}");
  CHECK(d.stator_material == "Copper");
  CHECK(d.contact.cof == 0.2);
  CHECK(d.rotor.preload == 50.0);
  CHECK(d.simulation.duration == 5e-3);
  CHECK(d.simulation.output_interval == 1e-5);
  CHECK(d.simulation.steps_per_period == 400);
  CHECK(d.drive.voltage == 100.0);
  CHECK(d.drive.phase_offset == std::numbers::pi / 2);
  CHECK(d.damping_ratio == 0.01);
  CHECK_NOTHROW(d.validate());

  const RunConfig c = parse_run_config(R"({
    "schema_version": 1,
    "geometry": {"mean_radius": 0.03},
    "contact": {"cof": 0.35, "point_count": 64},
    "drive": {"phase_offset": "-90deg"},
    "simulation": {"coupling": "explicit_start", "steady_tolerance": 0.05},
    "sweep": {"parameter": "cof", "values": "0.1:0.3:0.1"}
  })");
  CHECK(c.geometry.mean_radius == 0.03);
  CHECK(c.geometry.section_width == StatorGeometry{}.section_width);
  CHECK(c.contact.cof == 0.35);
  CHECK(c.contact.point_count == 64);
  CHECK(c.drive.phase_offset == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
  CHECK(c.simulation.coupling == ContactCoupling::explicit_start);
  CHECK(c.steady_tolerance == 0.05);
  REQUIRE(c.sweep.has_value());
  REQUIRE(c.sweep->spec.has_value());
  CHECK(c.sweep->spec->parameter == SweepParameter::cof);
  CHECK(c.sweep->spec->values.size() == 3);
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"contact": {"friction": 0.2}})"),
                       doctest::Contains("unknown key contact.friction"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"rotor": {"preload": "heavy"}})"), doctest::Contains("rotor.preload"),
                       ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{ not json"), IoError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), IoError);
  CHECK_THROWS_AS(parse_run_config(R"({"simulation": {"coupling": "implicit"}})"), ConfigError);

  RunConfig coarse = parse_run_config(R"({"mesh": {"elements": 16}})");
  CHECK_THROWS_WITH_AS(coarse.validate(), doctest::Contains("at least 8n = 32"), ConfigError);

  RunConfig missing = parse_run_config(R"({"materials": {"stator": "Brass"}})");
  CHECK_THROWS_AS(missing.validate(), ConfigError);
  RunConfig piezo_as_stator = parse_run_config(R"({"materials": {"stator": "PZT-5H"}})");
  CHECK_THROWS_AS(piezo_as_stator.validate(), ConfigError);

  RunConfig both = parse_run_config(R"({"sweep": {"preset": "cof_sweep", "parameter": "cof", "values": [0.1, 0.2, 0.3]}})");
  CHECK_THROWS_AS(both.validate(), ConfigError);
  RunConfig neither = parse_run_config(R"({"sweep": {}})");
  CHECK_THROWS_AS(neither.validate(), ConfigError);
  RunConfig unknown = parse_run_config(R"({"sweep": {"preset": "usr90"}})");
  CHECK_THROWS_AS(unknown.validate(), ConfigError);
}

TEST_CASE("inline materials are resolvable by name") {
  const RunConfig c = parse_run_config(R"({
    "materials": {"stator": "Brass",
                  "inline": [{"name": "Brass", "density": 8500, "poisson_ratio": 0.34, "youngs_modulus": 1.0e11}]}
  })");
  CHECK_NOTHROW(c.validate());
  CHECK(c.catalog.isotropic("Brass").density == 8500.0);
  CHECK_THROWS_AS(parse_run_config(R"({"materials": {"inline": {"name": "x"}}})"), ConfigError);
}

TEST_CASE("canonical JSON round-trips") {
  RunConfig c = parse_run_config(R"({"contact": {"cof": 0.123456789012345}, "sweep": {"preset": "cof_sweep"}})");
  const std::string once = to_json(c);
  const std::string twice = to_json(parse_run_config(once));
  CHECK(once == twice);
  CHECK(parse_run_config(once).contact.cof == 0.123456789012345);
}

TEST_CASE("angles") {
  CHECK(parse_angle("1.5") == 1.5);
  CHECK(parse_angle("2rad") == 2.0);
  CHECK(parse_angle("-90deg") == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(parse_angle("ninety"), ConfigError);
  CHECK_THROWS_AS(parse_angle("90 deg"), ConfigError);
  CHECK_THROWS_AS(parse_angle("deg"), ConfigError);
}

TEST_CASE("time series files round-trip to an identical summary") {
  RunConfig cfg;
  cfg.simulation.duration = 2e-3;
  const MotorCase c = cfg.build_case();
  const MotorTimeSeries ts = simulate(c.stator, c.drive, c.contact, c.rotor, c.simulation);
  const std::string series = time_series_csv(ts), trace = torque_trace_csv(ts);
  CHECK(series.rfind("t,s_speed,surf_disp,fric_probe,torque,fz,wave_amp\n", 0) == 0);

  const MotorTimeSeries back = parse_time_series(series, trace, ts.radius, ts.drive_frequency);
  CHECK(back.surface_speed == ts.surface_speed);
  CHECK(back.torque == ts.torque);
  CHECK(back.trace.values == ts.trace.values);
  CHECK(time_series_csv(back) == series);

  const auto omega = ideal_speed(c.stator, c.drive);
  const MotorTimeSeries again = parse_time_series(series, trace, ts.radius, ts.drive_frequency);
  CHECK(summarize(back, omega).to_json() == summarize(again, omega).to_json());

  const auto j = nlohmann::json::parse(summarize(back, omega).to_json());
  for (const char* key : {"t_ss", "settled", "reported_torque", "mean_speed", "omega_ideal"}) CHECK(j.contains(key));

  CHECK_THROWS_AS(parse_time_series("t,x\n1,2\n", trace, 0.0125, 41000), IoError);
  CHECK_THROWS_AS(parse_time_series(series + "1,2,x,4,5,6,7\n", trace, 0.0125, 41000), IoError);
}

TEST_CASE("summary averaging interval") {
  MotorTimeSeries s;
  s.radius = 0.01;
  s.drive_frequency = 40000;
  s.output_interval = 1e-5;
  for (int i = 0; i <= 500; ++i) s.time.push_back(i * 1e-5);
  // Settled near the end: the interval still spans the minimum number of periods.
  CHECK(evaluation_start(s, {4.9e-3, true}) == doctest::Approx(5e-3 - kMinEvaluationPeriods / 40000).epsilon(1e-12));
  CHECK(evaluation_start(s, {1.5e-3, true}) == 1.5e-3);
  CHECK(evaluation_start(s, {5e-3, false}) == doctest::Approx(2.5e-3).epsilon(1e-15));
}
