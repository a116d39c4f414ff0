#include <doctest.h>

#include <fstream>

#include "geoquad/config.hpp"
#include "support.hpp"

using namespace geoquad;

namespace {

const char* kCustom = R"({
  "mission": {
    "name": "climb",
    "initial_state": {"x": [0, 0, 0], "omega": [0.1, 0, 0]},
    "segments": [
      {"mode": "position", "t_start": 0, "t_end": 2,
       "x_d": {"x": 0, "y": {"poly": [0, 0.5]}, "z": {"sines": [{"amplitude": 0.2, "omega": 3.0}]}},
       "b1d": [0, 1, 0]},
      {"mode": "velocity", "t_start": 2, "t_end": 3, "v_d": [0, 1, 0]},
      {"mode": "attitude", "t_start": 3, "t_end": 4, "R0": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
       "body_rate": [0, 0, 1], "thrust": {"altitude": -1.0}}
    ]
  },
  "params": {"mass": 2.0, "inertia": [0.02, 0.03, 0.04]},
  "gains": {"k_x": 10},
  "sim": {"dt": 0.002, "log_decimation": 5},
  "output": "out/climb"
})";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("registry") {
  CHECK(scenario_registry().size() == 2);
  CHECK(scenario_registry()[0].name == "case1");
  CHECK(scenario_registry()[1].name == "case2");
  CHECK(is_registered("case2"));
  CHECK_FALSE(is_registered("custom"));
  CHECK(message_of([] { registry_mission("nosuch"); }) == "unknown scenario 'nosuch'");
}

TEST_CASE("a registry name gives the builder mission and default sim config") {
  const ScenarioConfig c = parse_config(R"({"scenario": "case1"})");
  CHECK(c.mission == build_case1());
  CHECK(c.sim == SimConfig{});
  CHECK(c.scenario == "case1");
  CHECK(c.output_prefix == "case1");
  CHECK(c == default_config("case1"));
}

TEST_CASE("overriding dt leaves the mission unchanged") {
  const ScenarioConfig c = parse_config(R"({"scenario": "case1", "sim": {"dt": 5e-4}})");
  CHECK(c.mission == build_case1());
  CHECK(c.sim.dt == 5e-4);
  CHECK(c.sim.log_decimation == SimConfig{}.log_decimation);
}

TEST_CASE("parameter overrides are validated") {
  const std::string text = R"({"scenario": "case1", "params": {"mass": -1}})";
  CHECK(kind_of([&] { parse_config(text); }) == ErrorKind::ValidationError);
  CHECK(message_of([&] { parse_config(text); }) == "mass must be positive");
  CHECK(message_of([] { parse_config(R"({"scenario": "case1", "sim": {"dt": 0}})"); }) ==
        "dt must be positive");
  CHECK(message_of([] { parse_config(R"({"scenario": "case1", "gains": {"k_R": -2}})"); }) ==
        "k_R must be positive");
}

TEST_CASE("unknown keys are rejected") {
  CHECK(message_of([] { parse_config(R"({"scenario": "case1", "bogus": 1})"); }) ==
        "unknown key 'bogus' in config");
  CHECK(kind_of([] { parse_config(R"({"scenario": "case1", "sim": {"step": 1}})"); }) ==
        ErrorKind::ValidationError);
}

TEST_CASE("exactly one mission source") {
  CHECK(kind_of([] { parse_config("{}"); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_config(R"({"scenario": "nosuch"})"); }) == ErrorKind::ValidationError);
}

TEST_CASE("malformed text reports line and column") {
  const std::string text = "{\n  \"scenario\": \"case1\",\n  \"sim\": {\"dt\": }\n}";
  CHECK(kind_of([&] { parse_config(text); }) == ErrorKind::ParseError);
  CHECK(message_of([&] { parse_config(text); }).rfind("line 3, column", 0) == 0);
}

TEST_CASE("inline mission") {
  const ScenarioConfig c = parse_config(kCustom);
  CHECK(c.scenario == "climb");
  CHECK(c.output_prefix == "out/climb");
  CHECK(c.mission.params.mass == 2.0);
  CHECK(c.mission.params.inertia.diagonal() == Vec3(0.02, 0.03, 0.04));
  CHECK(c.mission.gains.k_x == 10.0);
  CHECK(c.mission.gains.k_v == reference_gains(reference_params()).k_v);
  CHECK(c.sim.dt == 0.002);
  CHECK(c.sim.log_decimation == 5);
  REQUIRE(c.mission.segments.size() == 3);
  CHECK(c.mission.segments[2].mode() == FlightMode::Attitude);

  const auto p = std::get<PositionCommand>(evaluate_command(c.mission.segments[0], 1.0));
  CHECK(p.x_d.y() == 0.5);
  CHECK(p.x_d.z() == doctest::Approx(0.2 * std::sin(3.0)));
  CHECK(p.b1d == kE2);
  const auto a = std::get<AttitudeModeCommand>(evaluate_command(c.mission.segments[2], 3.0));
  CHECK(std::get<AltitudeTarget>(a.thrust).x3d == -1.0);
  CHECK(a.attitude.Omega_d == kE3);
}

TEST_CASE("inline mission validation") {
  const char* gap = R"({"mission": {"segments": [
      {"mode": "position", "t_start": 0, "t_end": 1, "x_d": [0, 0, 0]},
      {"mode": "position", "t_start": 2, "t_end": 3, "x_d": [0, 0, 0]}]}})";
  CHECK(message_of([&] { parse_config(gap); }) ==
        "segment 1: segments must be contiguous starting at 0");
  const char* mode = R"({"mission": {"segments": [
      {"mode": "hover", "t_start": 0, "t_end": 1}]}})";
  CHECK(kind_of([&] { parse_config(mode); }) == ErrorKind::ValidationError);
  const char* rot = R"({"mission": {"initial_state": {"R": [[2, 0, 0], [0, 1, 0], [0, 0, 1]]},
      "segments": [{"mode": "position", "t_start": 0, "t_end": 1, "x_d": [0, 0, 0]}]}})";
  CHECK(kind_of([&] { parse_config(rot); }) == ErrorKind::ValidationError);
}

TEST_CASE("config round trip is the identity") {
  for (const char* name : {"case1", "case2"}) {
    const ScenarioConfig c = default_config(name);
    CHECK(parse_config(config_to_json(c)) == c);
  }
  const ScenarioConfig custom = parse_config(kCustom);
  CHECK(parse_config(config_to_json(custom)) == custom);
}

TEST_CASE("load_config") {
  const auto dir = scratch_dir("config");
  const auto path = dir / "c.json";
  std::ofstream(path) << kCustom;
  CHECK(load_config(path.string()) == parse_config(kCustom));
  CHECK(kind_of([&] { load_config((dir / "missing.json").string()); }) == ErrorKind::IoError);
}

}  // TEST_SUITE
