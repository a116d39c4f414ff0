#include "geoquad/sim.hpp"

#include <cmath>
#include <sstream>

#include "geoquad/error.hpp"

namespace geoquad {

void SimConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::ValidationError, what); };
  if (!(std::isfinite(dt) && dt > 0.0)) fail("dt must be positive");
  if (duration && !(std::isfinite(*duration) && *duration >= 0.0)) {
    fail("duration must be non-negative");
  }
  if (duration && *duration > 0.0 && *duration < dt) fail("duration must be at least dt");
  if (!(std::isfinite(ortho_tolerance) && ortho_tolerance > 0.0)) {
    fail("ortho_tolerance must be positive");
  }
  if (log_decimation < 1) fail("log_decimation must be a positive integer");
}

SegmentController::SegmentController(const FlightSegment& segment, const QuadParams& params,
                                     const Gains& gains)
    : segment_(&segment), params_(&params), gains_(&gains) {}

ControlEval SegmentController::evaluate(double t, const VehicleState& s) const {
  const QuadParams& p = *params_;
  const Gains& g = *gains_;
  const SegmentCommand cmd = command_at(*segment_, t);
  ControlEval ev;

  if (const auto* att = std::get_if<AttitudeModeCommand>(&cmd)) {
    const AttitudeCommand& a = att->attitude;
    double f = 0.0;
    if (const auto* alt = std::get_if<AltitudeTarget>(&att->thrust)) {
      f = altitude_thrust(s, alt->x3d, alt->dx3d, alt->ddx3d, g, p);
      ev.e_x = Vec3(0.0, 0.0, s.x.z() - alt->x3d);
      ev.e_v = Vec3(0.0, 0.0, s.v.z() - alt->dx3d);
    } else {
      const Vec3& x_c = std::get<PositionHold>(att->thrust).x_c;
      f = position_hold_thrust(s, x_c, g, p);
      ev.e_x = s.x - x_c;
      ev.e_v = s.v;
    }
    ev.output = make_control_output(f, attitude_moment(s, a, g, p), p);
    ev.R_ref = a.R_d;
    ev.Omega_ref = a.Omega_d;
  } else if (const auto* pos = std::get_if<PositionCommand>(&cmd)) {
    auto [out, ca] = position_control(s, *pos, g, p, prev_);
    ev.output = out;
    ev.e_x = s.x - pos->x_d;
    ev.e_v = s.v - pos->dx_d;
    ev.R_ref = ca.R_c;
    ev.Omega_ref = ca.Omega_c;
    ev.computed = std::move(ca);
  } else {
    const auto& vel = std::get<VelocityCommand>(cmd);
    auto [out, ca] = velocity_control(s, vel, g, p, prev_);
    ev.output = out;
    ev.e_v = s.v - vel.v_d;
    ev.R_ref = ca.R_c;
    ev.Omega_ref = ca.Omega_c;
    ev.computed = std::move(ca);
  }
  ev.psi = psi(s.R, ev.R_ref);
  ev.e_R = attitude_error(s.R, ev.R_ref);
  ev.e_Omega = angular_velocity_error(s.omega, s.R, ev.R_ref, ev.Omega_ref);
  return ev;
}

void SegmentController::commit(const ControlEval& eval) {
  if (eval.computed) {
    if (eval.computed->used_previous_heading) ++heading_fallbacks_;
    prev_ = eval.computed;
  }
}

namespace {

struct FlatState {
  Vec3 x, v;
  Mat3 R;
  Vec3 omega;
};

FlatState axpy(const FlatState& s, double h, const StateDerivative& d) {
  return {s.x + h * d.dx, s.v + h * d.dv, s.R + h * d.dR, s.omega + h * d.domega};
}

VehicleState to_vehicle(const FlatState& s) {
  return {s.x, s.v, Rotation::unchecked(s.R), s.omega};
}

StateDerivative eval_rhs(const FlatState& s, double t, const ControlLaw& law,
                         const QuadParams& p) {
  const ControlOutput u = law(t, to_vehicle(s));
  return state_derivative(s.v, s.R, s.omega, u.f, u.M, p);
}

VehicleState rk4_from_first_stage(const VehicleState& s0, double t, double dt,
                                  const StateDerivative& k1, const ControlLaw& law,
                                  const QuadParams& p, double ortho_tolerance) {
  const FlatState s{s0.x, s0.v, s0.R.matrix(), s0.omega};
  const double h2 = 0.5 * dt;
  const StateDerivative k2 = eval_rhs(axpy(s, h2, k1), t + h2, law, p);
  const StateDerivative k3 = eval_rhs(axpy(s, h2, k2), t + h2, law, p);
  const StateDerivative k4 = eval_rhs(axpy(s, dt, k3), t + dt, law, p);
  const double w = dt / 6.0;
  FlatState out;
  out.x = s.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.v = s.v + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  out.R = s.R + w * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
  out.omega = s.omega + w * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
  if (!out.R.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "non-finite attitude after integration step");
  }
  if (orthogonality_defect(out.R) > ortho_tolerance) {
    return {out.x, out.v, orthonormalize(out.R), out.omega};
  }
  return to_vehicle(out);
}

bool finite_state(const VehicleState& s) {
  return s.x.allFinite() && s.v.allFinite() && s.R.matrix().allFinite() && s.omega.allFinite();
}

TraceRecord make_record(double t, const VehicleState& s, const ControlEval& ev,
                        FlightMode mode, std::size_t segment) {
  TraceRecord r;
  r.t = t;
  r.x = s.x;
  r.v = s.v;
  r.R = s.R.matrix();
  r.omega = s.omega;
  r.f = ev.output.f;
  r.M = ev.output.M;
  r.rotor_thrusts = ev.output.rotor_thrusts;
  r.mode = mode;
  r.psi = ev.psi;
  r.e_R = ev.e_R;
  r.e_Omega = ev.e_Omega;
  r.e_x = ev.e_x;
  r.e_v = ev.e_v;
  r.segment = segment;
  return r;
}

}  // namespace

VehicleState rk4_step(const VehicleState& s, double t, double dt, const ControlLaw& law,
                      const QuadParams& p, double ortho_tolerance) {
  const ControlOutput u = law(t, s);
  const StateDerivative k1 = state_derivative(s, u, p);
  return rk4_from_first_stage(s, t, dt, k1, law, p, ortho_tolerance);
}

SimResult run_trace(const Mission& mission, const SimConfig& cfg) {
  mission.validate();
  cfg.validate();
  SimResult result;
  result.final_state = mission.initial_state;
  const double duration = cfg.duration.value_or(mission.duration());
  if (duration <= 0.0 || mission.segments.empty()) return result;

  const double dt = cfg.dt;
  const auto steps = static_cast<long>(std::floor(duration / dt + 1e-9));
  const QuadParams& p = mission.params;

  VehicleState s = mission.initial_state;
  std::size_t active = mission.segment_index_at(0.5 * dt);
  std::optional<SegmentController> ctrl;
  ctrl.emplace(mission.segments[active], p, mission.gains);

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    try {
      // The half-step offset keeps boundary times on the incoming segment.
      const std::size_t idx = mission.segment_index_at(t + 0.5 * dt);
      if (idx != active) {
        active = idx;
        result.heading_fallbacks += ctrl->heading_fallbacks();
        ctrl.emplace(mission.segments[active], p, mission.gains);
      }
      const ControlEval ev = ctrl->evaluate(t, s);
      ctrl->commit(ev);
      if (!std::isfinite(ev.output.f) || !ev.output.M.allFinite()) {
        throw Error(ErrorKind::NonFiniteState, "non-finite control output");
      }
      for (double fi : ev.output.rotor_thrusts) {
        if (fi < 0.0) {
          ++result.negative_thrust_steps;
          break;
        }
      }
      if (k % cfg.log_decimation == 0 || k == steps) {
        result.trace.push_back(make_record(t, s, ev, ctrl->mode(), active));
      }
      if (k == steps) break;

      const SegmentController& c = *ctrl;
      const ControlLaw law = [&c](double ts, const VehicleState& vs) {
        return c.evaluate(ts, vs).output;
      };
      const StateDerivative k1 = state_derivative(s, ev.output, p);
      s = rk4_from_first_stage(s, t, dt, k1, law, p, cfg.ortho_tolerance);
      if (!finite_state(s)) {
        throw Error(ErrorKind::NonFiniteState, "non-finite vehicle state");
      }
      result.max_ortho_defect = std::max(result.max_ortho_defect, orthogonality_defect(s.R.matrix()));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "t = " << t << " s, segment " << active << " ("
         << to_string(mission.segments[active].mode()) << "): " << to_string(e.kind()) << ": "
         << e.what();
      result.aborted = true;
      result.abort_time = t;
      result.diagnostic = os.str();
      break;
    }
  }
  result.heading_fallbacks += ctrl->heading_fallbacks();
  result.final_state = s;
  return result;
}

SimResult run(const Mission& mission, const SimConfig& cfg) {
  SimResult result = run_trace(mission, cfg);
  result.report = analyze(mission, result.trace);
  return result;
}

}  // namespace geoquad
