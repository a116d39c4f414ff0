#include "geoquad/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "geoquad/error.hpp"

namespace geoquad {

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t"};
    auto add = [&c](const char* stem, int n) {
      for (int i = 1; i <= n; ++i) c.push_back(stem + std::to_string(i));
    };
    add("x", 3);
    add("v", 3);
    for (int r = 1; r <= 3; ++r) {
      for (int k = 1; k <= 3; ++k) c.push_back("R" + std::to_string(r) + std::to_string(k));
    }
    add("W", 3);
    c.push_back("f");
    add("M", 3);
    add("f", 4);
    c.push_back("mode");
    c.push_back("Psi");
    add("eR", 3);
    add("eW", 3);
    add("ex", 3);
    add("ev", 3);
    return c;
  }();
  return cols;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out << ',';
  out.write(buf, res.ptr - buf);
}

void put(std::ostream& out, const Vec3& v) {
  for (int i = 0; i < 3; ++i) put(out, v(i));
}

FlightMode parse_mode(const std::string& s, std::size_t line) {
  if (s == "attitude") return FlightMode::Attitude;
  if (s == "position") return FlightMode::Position;
  if (s == "velocity") return FlightMode::Velocity;
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": unknown mode '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "# schema_version=" << kTraceSchemaVersion << '\n';
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const TraceRecord& r : trace) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, r.t, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
    put(out, r.x);
    put(out, r.v);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) put(out, r.R(i, k));
    }
    put(out, r.omega);
    put(out, r.f);
    put(out, r.M);
    for (double fi : r.rotor_thrusts) put(out, fi);
    out << ',' << to_string(r.mode);
    put(out, r.psi);
    put(out, r.e_R);
    put(out, r.e_Omega);
    put(out, r.e_x);
    put(out, r.e_v);
    out << '\n';
  }
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  write_trace_csv(trace, out);
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  const std::string version = "# schema_version=" + std::to_string(kTraceSchemaVersion);
  if (!std::getline(in, line) || line != version) {
    throw Error(ErrorKind::ParseError, "line 1: expected '" + version + "'");
  }
  const auto& cols = trace_columns();
  if (!std::getline(in, line) || split(line) != cols) {
    throw Error(ErrorKind::ParseError, "line 2: header does not match the trace columns");
  }
  Trace trace;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != cols.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(cols.size()) + " columns");
    }
    std::size_t k = 0;
    auto num = [&]() {
      const std::string& c = cells[k++];
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ", column " +
                                               std::to_string(k) + ": bad number '" + c + "'");
      }
      return v;
    };
    auto vec = [&]() {
      const double a = num(), b = num(), c = num();
      return Vec3(a, b, c);
    };
    TraceRecord r;
    r.t = num();
    r.x = vec();
    r.v = vec();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) r.R(i, j) = num();
    }
    r.omega = vec();
    r.f = num();
    r.M = vec();
    for (double& fi : r.rotor_thrusts) fi = num();
    r.mode = parse_mode(cells[k++], lineno);
    r.psi = num();
    r.e_R = vec();
    r.e_Omega = vec();
    r.e_x = vec();
    r.e_v = vec();
    trace.push_back(r);
  }
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return read_trace_csv(in);
}

namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Mat2& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

json to_json(const SegmentReport& s) {
  json j;
  j["index"] = s.index;
  j["mode"] = std::string(to_string(s.mode));
  j["t_start"] = s.t_start;
  j["t_end"] = s.t_end;
  j["attitude_roa"] = {{"inside", s.roa.inside},
                       {"psi0", s.roa.psi0},
                       {"psi_margin", s.roa.psi_margin},
                       {"omega_margin", s.roa.omega_margin}};
  j["psi2"] = s.psi2;
  j["psi2_clamped"] = s.psi2_clamped;
  if (s.mode != FlightMode::Attitude) {
    j["psi1"] = s.psi1;
    j["t_star"] = s.t_star ? json(*s.t_star) : json(nullptr);
  }
  if (s.certificate) {
    const GainCertificate& c = *s.certificate;
    j["certificate"] = {{"c1", c.c1},
                        {"c2", c.c2},
                        {"psi1", c.psi1},
                        {"alpha", c.alpha},
                        {"e_x_max", c.e_x_max},
                        {"B", c.B},
                        {"c1_bound", c.c1_bound},
                        {"c2_bound", c.c2_bound},
                        {"margin", finite_or_null(c.margin)},
                        {"feasible", c.feasible},
                        {"W1", to_json(c.W1)},
                        {"W12", to_json(c.W12)},
                        {"W2", to_json(c.W2)},
                        {"M11", to_json(c.M11)},
                        {"M12", to_json(c.M12)},
                        {"M21", to_json(c.M21)},
                        {"M22", to_json(c.M22)},
                        {"M22prime", to_json(c.M22prime)}};
  }
  if (s.coupled_roa_at_t_star) j["coupled_roa_at_t_star"] = *s.coupled_roa_at_t_star;
  if (s.envelope) {
    j["envelope"] = {{"alpha", s.envelope->alpha},
                     {"beta", s.envelope->beta},
                     {"decaying", s.envelope->decaying},
                     {"bound_holds", s.envelope->bound_holds},
                     {"samples", s.envelope->samples}};
  }
  json viol = json::array();
  for (const Violation& v : s.violations) {
    viol.push_back({{"t", v.t}, {"condition", v.condition}, {"detail", v.detail}});
  }
  j["violations"] = viol;
  j["series"] = {{"t", s.time}, {"psi", s.psi}, {"V2prime", s.v2prime}, {"V", s.v}};
  return j;
}

}  // namespace

std::string report_to_json(const std::string& scenario, const SimResult& result) {
  json j;
  j["scenario"] = scenario;
  j["aborted"] = result.aborted;
  if (result.aborted) {
    j["diagnostic"] = result.diagnostic;
    j["abort_time"] = result.abort_time;
  }
  j["records"] = result.trace.size();
  j["max_ortho_defect"] = result.max_ortho_defect;
  j["negative_thrust_steps"] = result.negative_thrust_steps;
  j["heading_fallbacks"] = result.heading_fallbacks;
  j["violation_count"] = result.report.violation_count();
  json segs = json::array();
  for (const SegmentReport& s : result.report.segments) segs.push_back(to_json(s));
  j["segments"] = segs;
  return j.dump(2) + "\n";
}

void write_report(const std::string& scenario, const SimResult& result,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out << report_to_json(scenario, result);
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace geoquad
