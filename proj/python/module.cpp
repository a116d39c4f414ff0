#include <filesystem>
#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geoquad/config.hpp"
#include "geoquad/error.hpp"
#include "geoquad/sim.hpp"
#include "geoquad/trace_io.hpp"

namespace py = pybind11;
using namespace geoquad;

namespace {

ScenarioConfig resolve(const std::string& scenario, std::optional<double> dt,
                       std::optional<double> duration, std::optional<int> log_decimation) {
  ScenarioConfig c = is_registered(scenario) || !std::filesystem::is_regular_file(scenario)
                         ? default_config(scenario)
                         : load_config(scenario);
  if (dt) c.sim.dt = *dt;
  if (duration) c.sim.duration = *duration;
  if (log_decimation) c.sim.log_decimation = *log_decimation;
  c.sim.validate();
  return c;
}

py::dict params_dict(const QuadParams& p) {
  py::dict d;
  d["mass"] = p.mass;
  d["inertia"] = Mat3(p.inertia);
  d["arm_length"] = p.arm_length;
  d["c_tau_f"] = p.c_tau_f;
  d["gravity"] = p.gravity;
  return d;
}

QuadParams mixing_params(double arm_length, double c_tau_f) {
  QuadParams p = reference_params();
  p.arm_length = arm_length;
  p.c_tau_f = c_tau_f;
  return p;
}

py::dict columns(const Trace& trace) {
  const auto& names = trace_columns();
  const auto n = static_cast<py::ssize_t>(trace.size());
  std::vector<py::array_t<double>> cols;
  for (std::size_t k = 0; k + 1 < names.size(); ++k) cols.emplace_back(n);
  std::vector<double*> ptr;
  for (auto& c : cols) ptr.push_back(c.mutable_data());
  py::list modes;
  for (py::ssize_t i = 0; i < n; ++i) {
    const TraceRecord& r = trace[static_cast<std::size_t>(i)];
    std::size_t k = 0;
    auto put = [&](double v) { ptr[k++][i] = v; };
    auto put3 = [&](const Vec3& v) {
      for (int j = 0; j < 3; ++j) put(v(j));
    };
    put(r.t);
    put3(r.x);
    put3(r.v);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) put(r.R(a, b));
    }
    put3(r.omega);
    put(r.f);
    put3(r.M);
    for (double fi : r.rotor_thrusts) put(fi);
    put(r.psi);
    put3(r.e_R);
    put3(r.e_Omega);
    put3(r.e_x);
    put3(r.e_v);
    modes.append(std::string(to_string(r.mode)));
  }
  py::dict out;
  std::size_t k = 0;
  for (const std::string& name : names) {
    if (name == "mode") {
      out["mode"] = modes;
    } else {
      out[py::str(name)] = cols[k++];
    }
  }
  return out;
}

py::dict segment_summary(const SegmentReport& s) {
  py::dict d;
  d["index"] = s.index;
  d["mode"] = std::string(to_string(s.mode));
  d["t_start"] = s.t_start;
  d["t_end"] = s.t_end;
  d["psi0"] = s.roa.psi0;
  d["t_star"] = s.t_star ? py::cast(*s.t_star) : py::none();
  d["certificate_feasible"] = s.certificate ? py::cast(s.certificate->feasible) : py::none();
  d["beta"] = s.envelope ? py::cast(s.envelope->beta) : py::none();
  py::list viol;
  for (const Violation& v : s.violations) viol.append(py::make_tuple(v.t, v.condition, v.detail));
  d["violations"] = viol;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometric SE(3) quadrotor control and simulation";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> exc_storage;
  exc_storage.call_once_and_store_result(
      [&m] { return py::exception<Error>(m, "GeoquadError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc_storage.get_stored(),
                    (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("hat", &hat, py::arg("x"));
  m.def("vee", &vee, py::arg("S"));
  m.def("exp_so3", [](const Vec3& x) { return Mat3(exp_so3(x).matrix()); }, py::arg("x"));
  m.def("psi", [](const Mat3& R, const Mat3& Rd) { return psi(Rotation(R), Rotation(Rd)); },
        py::arg("R"), py::arg("R_d"));
  m.def("attitude_error",
        [](const Mat3& R, const Mat3& Rd) { return attitude_error(Rotation(R), Rotation(Rd)); },
        py::arg("R"), py::arg("R_d"));

  m.def("reference_params", [] { return params_dict(reference_params()); });
  m.def("mixing_matrix",
        [](double d, double c) { return Eigen::Matrix4d(mixing_matrix(mixing_params(d, c))); },
        py::arg("arm_length") = 0.315, py::arg("c_tau_f") = 8.004e-3);
  m.def("mixing_to_rotors",
        [](double f, const Vec3& M, double d, double c) {
          return mixing_to_rotors(f, M, mixing_params(d, c));
        },
        py::arg("f"), py::arg("M"), py::arg("arm_length") = 0.315, py::arg("c_tau_f") = 8.004e-3);
  m.def("mixing_from_rotors",
        [](const RotorThrusts& rotors, double d, double c) {
          const ThrustAndMoment fm = mixing_from_rotors(rotors, mixing_params(d, c));
          return py::make_tuple(fm.f, fm.M);
        },
        py::arg("rotors"), py::arg("arm_length") = 0.315, py::arg("c_tau_f") = 8.004e-3);

  m.def("scenario_names", [] {
    std::vector<std::string> names;
    for (const ScenarioInfo& s : scenario_registry()) names.push_back(s.name);
    return names;
  });
  m.def("trace_columns", &trace_columns);
  m.def("parse_config", [](const std::string& text) {
          const ScenarioConfig c = parse_config(text);
          py::dict d;
          d["scenario"] = c.scenario;
          d["output"] = c.output_prefix;
          d["dt"] = c.sim.dt;
          d["duration"] = c.sim.duration.value_or(c.mission.duration());
          d["log_decimation"] = c.sim.log_decimation;
          d["params"] = params_dict(c.mission.params);
          py::list modes;
          for (const FlightSegment& s : c.mission.segments) modes.append(std::string(to_string(s.mode())));
          d["segments"] = modes;
          return d;
        },
        py::arg("text"));
  m.def("config_to_json", [](const std::string& name) { return config_to_json(default_config(name)); },
        py::arg("scenario"));

  m.def("run",
        [](const std::string& scenario, std::optional<double> dt, std::optional<double> duration,
           std::optional<int> log_decimation, std::optional<std::string> out) {
          const ScenarioConfig c = resolve(scenario, dt, duration, log_decimation);
          SimResult r;
          {
            py::gil_scoped_release release;
            r = run(c.mission, c.sim);
          }
          if (out) {
            write_trace_csv(r.trace, std::filesystem::path(*out + ".csv"));
            write_report(c.scenario, r, *out + ".report");
          }
          py::dict d;
          d["scenario"] = c.scenario;
          d["aborted"] = r.aborted;
          d["diagnostic"] = r.diagnostic;
          d["violations"] = r.report.violation_count();
          d["max_ortho_defect"] = r.max_ortho_defect;
          d["columns"] = columns(r.trace);
          return d;
        },
        py::arg("scenario"), py::arg("dt") = py::none(), py::arg("duration") = py::none(),
        py::arg("log_decimation") = py::none(), py::arg("out") = py::none());

  m.def("check",
        [](const std::string& scenario, std::optional<double> dt) {
          const ScenarioConfig c = resolve(scenario, dt, std::nullopt, std::nullopt);
          SimResult r;
          {
            py::gil_scoped_release release;
            r = run(c.mission, c.sim);
          }
          py::list segs;
          for (const SegmentReport& s : r.report.segments) segs.append(segment_summary(s));
          py::dict d;
          d["aborted"] = r.aborted;
          d["violations"] = r.report.violation_count();
          d["segments"] = segs;
          return d;
        },
        py::arg("scenario"), py::arg("dt") = py::none());
}
