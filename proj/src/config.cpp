#include "geoquad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geoquad/error.hpp"

namespace geoquad {

using nlohmann::json;

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> reg{
      {"case1", "position mode hover, recovering from an upside-down start (10 s)"},
      {"case2", "velocity, 720 deg flip, position, 360 deg roll, position (12 s)"},
  };
  return reg;
}

bool is_registered(std::string_view name) {
  for (const ScenarioInfo& s : scenario_registry()) {
    if (s.name == name) return true;
  }
  return false;
}

Mission registry_mission(std::string_view name) {
  if (name == "case1") return build_case1();
  if (name == "case2") return build_case2();
  throw Error(ErrorKind::ValidationError, "unknown scenario '" + std::string(name) + "'");
}

ScenarioConfig default_config(std::string_view name) {
  ScenarioConfig c;
  c.mission = registry_mission(name);
  c.scenario = c.mission.name;
  c.output_prefix = c.mission.name;
  return c;
}

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::ValidationError, what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) invalid(where + " must be a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) invalid(where + " must be an array of 3 numbers");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

Mat3 mat3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) invalid(where + " must be a 3x3 array of rows");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3(j[static_cast<std::size_t>(r)], where).transpose();
  return m;
}

Rotation rotation(const json& j, const std::string& where) {
  try {
    return Rotation(mat3(j, where));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    invalid(where + " must be a rotation matrix");
  }
}

Signal signal(const json& j, const std::string& where) {
  if (j.is_number()) return Signal::constant(j.get<double>());
  check_keys(j, where, {"poly", "sines"});
  Signal s;
  if (j.contains("poly")) {
    if (!j["poly"].is_array()) invalid(where + ".poly must be an array");
    for (const json& c : j["poly"]) s.poly.push_back(number(c, where + ".poly"));
  }
  if (j.contains("sines")) {
    if (!j["sines"].is_array()) invalid(where + ".sines must be an array");
    for (const json& w : j["sines"]) {
      check_keys(w, where + ".sines", {"amplitude", "omega", "phase"});
      Sinusoid sn;
      if (w.contains("amplitude")) sn.amplitude = number(w["amplitude"], where + ".amplitude");
      if (w.contains("omega")) sn.omega = number(w["omega"], where + ".omega");
      if (w.contains("phase")) sn.phase = number(w["phase"], where + ".phase");
      s.sines.push_back(sn);
    }
  }
  return s;
}

Trajectory3 trajectory(const json& j, const std::string& where) {
  if (j.is_array()) return Trajectory3::constant(vec3(j, where));
  check_keys(j, where, {"x", "y", "z"});
  Trajectory3 t;
  if (j.contains("x")) t.x = signal(j["x"], where + ".x");
  if (j.contains("y")) t.y = signal(j["y"], where + ".y");
  if (j.contains("z")) t.z = signal(j["z"], where + ".z");
  return t;
}

const json& required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) invalid(where + " requires '" + key + "'");
  return obj[key];
}

FlightSegment segment(const json& j, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  const json& mode_j = required(j, "mode", where);
  if (!mode_j.is_string()) invalid(where + ".mode must be a string");
  const std::string mode = mode_j.get<std::string>();
  FlightSegment seg;
  if (mode == "position") {
    check_keys(j, where, {"mode", "t_start", "t_end", "x_d", "b1d"});
    PositionSegment p;
    p.x_d = trajectory(required(j, "x_d", where), where + ".x_d");
    if (j.contains("b1d")) p.b1d = vec3(j["b1d"], where + ".b1d");
    seg.spec = p;
  } else if (mode == "velocity") {
    check_keys(j, where, {"mode", "t_start", "t_end", "v_d", "b1d"});
    VelocitySegment v;
    v.v_d = trajectory(required(j, "v_d", where), where + ".v_d");
    if (j.contains("b1d")) v.b1d = vec3(j["b1d"], where + ".b1d");
    seg.spec = v;
  } else if (mode == "attitude") {
    check_keys(j, where, {"mode", "t_start", "t_end", "R0", "body_rate", "t0", "thrust"});
    AttitudeSegment a;
    if (j.contains("R0")) a.attitude.R0 = rotation(j["R0"], where + ".R0");
    if (j.contains("body_rate")) a.attitude.body_rate = vec3(j["body_rate"], where + ".body_rate");
    const json& thrust = required(j, "thrust", where);
    const std::string tw = where + ".thrust";
    check_keys(thrust, tw, {"hold", "altitude"});
    if (thrust.contains("hold") == thrust.contains("altitude")) {
      invalid(tw + " needs exactly one of 'hold' or 'altitude'");
    }
    if (thrust.contains("hold")) {
      a.thrust = PositionHold{vec3(thrust["hold"], tw + ".hold")};
    } else {
      a.thrust = AltitudeTracking{signal(thrust["altitude"], tw + ".altitude")};
    }
    seg.spec = a;
  } else {
    invalid(where + ".mode must be one of attitude, position, velocity");
  }
  seg.t_start = number(required(j, "t_start", where), where + ".t_start");
  seg.t_end = number(required(j, "t_end", where), where + ".t_end");
  if (auto* a = std::get_if<AttitudeSegment>(&seg.spec)) {
    a->attitude.t0 = j.contains("t0") ? number(j["t0"], where + ".t0") : seg.t_start;
  }
  return seg;
}

void apply_params(QuadParams& p, const json& j) {
  check_keys(j, "params", {"mass", "inertia", "arm_length", "c_tau_f", "gravity"});
  if (j.contains("mass")) p.mass = number(j["mass"], "params.mass");
  if (j.contains("inertia")) {
    const json& in = j["inertia"];
    if (in.is_array() && in.size() == 3 && in[0].is_number()) {
      p.inertia = vec3(in, "params.inertia").asDiagonal();
    } else {
      p.inertia = mat3(in, "params.inertia");
    }
  }
  if (j.contains("arm_length")) p.arm_length = number(j["arm_length"], "params.arm_length");
  if (j.contains("c_tau_f")) p.c_tau_f = number(j["c_tau_f"], "params.c_tau_f");
  if (j.contains("gravity")) p.gravity = number(j["gravity"], "params.gravity");
}

void apply_gains(Gains& g, const json& j) {
  check_keys(j, "gains", {"k_x", "k_v", "k_R", "k_Omega"});
  if (j.contains("k_x")) g.k_x = number(j["k_x"], "gains.k_x");
  if (j.contains("k_v")) g.k_v = number(j["k_v"], "gains.k_v");
  if (j.contains("k_R")) g.k_R = number(j["k_R"], "gains.k_R");
  if (j.contains("k_Omega")) g.k_Omega = number(j["k_Omega"], "gains.k_Omega");
}

void apply_sim(SimConfig& s, const json& j) {
  check_keys(j, "sim", {"dt", "duration", "ortho_tolerance", "log_decimation"});
  if (j.contains("dt")) s.dt = number(j["dt"], "sim.dt");
  if (j.contains("duration")) s.duration = number(j["duration"], "sim.duration");
  if (j.contains("ortho_tolerance")) {
    s.ortho_tolerance = number(j["ortho_tolerance"], "sim.ortho_tolerance");
  }
  if (j.contains("log_decimation")) {
    const json& d = j["log_decimation"];
    if (!d.is_number_integer()) invalid("log_decimation must be a positive integer");
    s.log_decimation = d.get<int>();
  }
}

Mission inline_mission(const json& j) {
  check_keys(j, "mission", {"name", "initial_state", "segments"});
  Mission m;
  m.name = "custom";
  if (j.contains("name")) {
    if (!j["name"].is_string()) invalid("mission.name must be a string");
    m.name = j["name"].get<std::string>();
  }
  m.params = reference_params();
  m.gains = reference_gains(m.params);
  if (j.contains("initial_state")) {
    const json& s = j["initial_state"];
    check_keys(s, "mission.initial_state", {"x", "v", "R", "omega"});
    if (s.contains("x")) m.initial_state.x = vec3(s["x"], "initial_state.x");
    if (s.contains("v")) m.initial_state.v = vec3(s["v"], "initial_state.v");
    if (s.contains("R")) m.initial_state.R = rotation(s["R"], "initial_state.R");
    if (s.contains("omega")) m.initial_state.omega = vec3(s["omega"], "initial_state.omega");
  }
  const json& segs = required(j, "segments", "mission");
  if (!segs.is_array() || segs.empty()) invalid("mission.segments must be a non-empty array");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    m.segments.push_back(segment(segs[i], "segment " + std::to_string(i)));
  }
  return m;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(to_json(Vec3(m.row(r).transpose())));
  return rows;
}

json to_json(const Signal& s) {
  json j;
  j["poly"] = s.poly;
  json sines = json::array();
  for (const Sinusoid& w : s.sines) {
    sines.push_back({{"amplitude", w.amplitude}, {"omega", w.omega}, {"phase", w.phase}});
  }
  j["sines"] = sines;
  return j;
}

json to_json(const Trajectory3& t) {
  return {{"x", to_json(t.x)}, {"y", to_json(t.y)}, {"z", to_json(t.z)}};
}

json to_json(const FlightSegment& seg) {
  json j;
  j["mode"] = std::string(to_string(seg.mode()));
  j["t_start"] = seg.t_start;
  j["t_end"] = seg.t_end;
  if (const auto* p = std::get_if<PositionSegment>(&seg.spec)) {
    j["x_d"] = to_json(p->x_d);
    j["b1d"] = to_json(p->b1d);
  } else if (const auto* v = std::get_if<VelocitySegment>(&seg.spec)) {
    j["v_d"] = to_json(v->v_d);
    j["b1d"] = to_json(v->b1d);
  } else {
    const auto& a = std::get<AttitudeSegment>(seg.spec);
    j["R0"] = to_json(a.attitude.R0.matrix());
    j["body_rate"] = to_json(a.attitude.body_rate);
    j["t0"] = a.attitude.t0;
    if (const auto* hold = std::get_if<PositionHold>(&a.thrust)) {
      j["thrust"] = {{"hold", to_json(hold->x_c)}};
    } else {
      j["thrust"] = {{"altitude", to_json(std::get<AltitudeTracking>(a.thrust).x3d)}};
    }
  }
  return j;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorKind::ParseError, os.str());
  }
  check_keys(root, "config", {"scenario", "mission", "params", "gains", "sim", "output"});
  if (root.contains("scenario") == root.contains("mission")) {
    invalid("config needs exactly one of 'scenario' or 'mission'");
  }

  ScenarioConfig c;
  if (root.contains("scenario")) {
    if (!root["scenario"].is_string()) invalid("scenario must be a string");
    c.mission = registry_mission(root["scenario"].get<std::string>());
  } else {
    c.mission = inline_mission(root["mission"]);
  }
  if (root.contains("params")) apply_params(c.mission.params, root["params"]);
  if (root.contains("gains")) apply_gains(c.mission.gains, root["gains"]);
  if (root.contains("sim")) apply_sim(c.sim, root["sim"]);
  c.scenario = c.mission.name;
  c.output_prefix = c.mission.name;
  if (root.contains("output")) {
    if (!root["output"].is_string() || root["output"].get<std::string>().empty()) {
      invalid("output must be a non-empty string");
    }
    c.output_prefix = root["output"].get<std::string>();
  }

  try {
    c.mission.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  c.sim.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string config_to_json(const ScenarioConfig& config) {
  const Mission& m = config.mission;
  json mission;
  mission["name"] = m.name;
  mission["initial_state"] = {{"x", to_json(m.initial_state.x)},
                              {"v", to_json(m.initial_state.v)},
                              {"R", to_json(m.initial_state.R.matrix())},
                              {"omega", to_json(m.initial_state.omega)}};
  json segs = json::array();
  for (const FlightSegment& s : m.segments) segs.push_back(to_json(s));
  mission["segments"] = segs;

  json root;
  root["mission"] = mission;
  root["params"] = {{"mass", m.params.mass},
                    {"inertia", to_json(m.params.inertia)},
                    {"arm_length", m.params.arm_length},
                    {"c_tau_f", m.params.c_tau_f},
                    {"gravity", m.params.gravity}};
  root["gains"] = {{"k_x", m.gains.k_x},
                   {"k_v", m.gains.k_v},
                   {"k_R", m.gains.k_R},
                   {"k_Omega", m.gains.k_Omega}};
  json sim = {{"dt", config.sim.dt},
              {"ortho_tolerance", config.sim.ortho_tolerance},
              {"log_decimation", config.sim.log_decimation}};
  if (config.sim.duration) sim["duration"] = *config.sim.duration;
  root["sim"] = sim;
  root["output"] = config.output_prefix;
  return root.dump(2) + "\n";
}

}  // namespace geoquad
