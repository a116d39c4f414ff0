#include "geoquad/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "geoquad/config.hpp"
#include "geoquad/error.hpp"
#include "geoquad/trace_io.hpp"

namespace geoquad {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string scenario;
  std::optional<double> dt;
  std::optional<double> duration;
  std::string out;
  bool all = false;
};

ScenarioConfig resolve(const RunOptions& o) {
  ScenarioConfig c;
  if (is_registered(o.scenario)) {
    c = default_config(o.scenario);
  } else if (std::filesystem::is_regular_file(o.scenario)) {
    c = load_config(o.scenario);
  } else {
    throw UsageError("unknown scenario '" + o.scenario +
                     "' (not a registered name or a config file; see `geoquad list`)");
  }
  if (o.dt) c.sim.dt = *o.dt;
  if (o.duration) c.sim.duration = *o.duration;
  c.sim.validate();
  return c;
}

void print_segments(const MonitorReport& report, std::ostream& out) {
  for (const SegmentReport& s : report.segments) {
    out << "  segment " << s.index << " " << std::left << std::setw(8) << to_string(s.mode)
        << std::right << " [" << s.t_start << ", " << s.t_end << "] psi0=" << s.roa.psi0;
    if (s.t_star) out << " t*=" << *s.t_star;
    if (s.certificate) out << " certificate=" << (s.certificate->feasible ? "feasible" : "infeasible");
    if (s.envelope) out << " beta=" << s.envelope->beta;
    out << " violations=" << s.violations.size() << "\n";
    for (const Violation& v : s.violations) {
      out << "    t=" << v.t << " " << v.condition;
      if (!v.detail.empty()) out << " (" << v.detail << ")";
      out << "\n";
    }
  }
}

int status(const SimResult& r) {
  return r.aborted || !r.report.ok() ? kExitViolation : kExitOk;
}

int do_run(const ScenarioConfig& c, const std::string& prefix, std::ostream& out,
           std::ostream& err) {
  const SimResult r = run(c.mission, c.sim);
  const std::string csv = prefix + ".csv";
  const std::string rep = prefix + ".report";
  write_trace_csv(r.trace, std::filesystem::path(csv));
  write_report(c.scenario, r, rep);
  out << c.scenario << ": " << r.trace.size() << " records, "
      << r.report.violation_count() << " monitor violations -> " << csv << ", " << rep << "\n";
  if (r.aborted) err << c.scenario << ": aborted: " << r.diagnostic << "\n";
  return status(r);
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  if (o.all) {
    int code = kExitOk;
    for (const ScenarioInfo& info : scenario_registry()) {
      RunOptions one = o;
      one.scenario = info.name;
      const ScenarioConfig c = resolve(one);
      const std::string prefix =
          o.out.empty() ? c.output_prefix : (std::filesystem::path(o.out) / c.output_prefix).string();
      if (!o.out.empty()) std::filesystem::create_directories(o.out);
      code = std::max(code, do_run(c, prefix, out, err));
    }
    return code;
  }
  const ScenarioConfig c = resolve(o);
  return do_run(c, o.out.empty() ? c.output_prefix : o.out, out, err);
}

int cmd_check(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig c = resolve(o);
  const SimResult r = run(c.mission, c.sim);
  out << c.scenario << ": " << r.report.segments.size() << " segments, "
      << r.report.violation_count() << " violations\n";
  print_segments(r.report, out);
  if (r.aborted) err << c.scenario << ": aborted: " << r.diagnostic << "\n";
  return status(r);
}

void add_sim_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--dt", o.dt, "integration step [s]");
  cmd->add_option("--duration", o.duration, "simulated time [s] (default: whole mission)");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric SE(3) quadrotor control simulator", "geoquad"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario and write PREFIX.csv and PREFIX.report");
  auto* scen = run_cmd->add_option("--scenario", run_opts.scenario, "registry name or JSON config file");
  add_sim_options(run_cmd, run_opts);
  run_cmd->add_option("--out", run_opts.out,
                      "output prefix (with --all: output directory)");
  auto* all = run_cmd->add_flag("--all", run_opts.all, "run every registry scenario");
  scen->excludes(all);

  RunOptions check_opts;
  CLI::App* check_cmd = app.add_subcommand("check", "simulate and print the stability monitor summary");
  check_cmd->add_option("--scenario", check_opts.scenario, "registry name or JSON config file")
      ->required();
  add_sim_options(check_cmd, check_opts);

  CLI::App* list_cmd = app.add_subcommand("list", "list registry scenarios");

  std::vector<std::string> argv{"geoquad"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> cargv;
  for (const std::string& a : argv) cargv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
    if (*run_cmd && !run_opts.all && run_opts.scenario.empty()) {
      throw CLI::RequiredError("--scenario");
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*list_cmd) {
      for (const ScenarioInfo& s : scenario_registry()) {
        out << std::left << std::setw(8) << s.name << s.description << "\n";
      }
      out << std::left << std::setw(8) << "custom" << "any JSON config file passed to --scenario\n";
      return kExitOk;
    }
    if (*run_cmd) return cmd_run(run_opts, out, err);
    return cmd_check(check_opts, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::ValidationError:
        return kExitUsage;
      default:
        return kExitViolation;
    }
  }
}

}  // namespace geoquad
