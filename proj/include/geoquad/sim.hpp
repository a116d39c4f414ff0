#pragma once

#include <functional>
#include <optional>
#include <string>

#include "geoquad/control.hpp"
#include "geoquad/mission.hpp"
#include "geoquad/monitor.hpp"
#include "geoquad/trace.hpp"

namespace geoquad {

struct SimConfig {
  double dt = 1e-3;                 // s
  std::optional<double> duration;   // s; defaults to the mission duration
  double ortho_tolerance = 1e-9;    // re-orthonormalize R above this defect
  int log_decimation = 10;          // log every n-th step (1 = full rate)

  /// Throws Error(ValidationError).
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Everything a controller evaluation produces, including the tracking errors
/// that end up in the trace.
struct ControlEval {
  ControlOutput output;
  Rotation R_ref;
  Vec3 Omega_ref = Vec3::Zero();
  double psi = 0.0;
  Vec3 e_R = Vec3::Zero();
  Vec3 e_Omega = Vec3::Zero();
  Vec3 e_x = Vec3::Zero();
  Vec3 e_v = Vec3::Zero();
  std::optional<ComputedAttitude> computed;
};

/**
 * @brief Controller bound to one flight segment.
 *
 * evaluate() is pure given the current memory; commit() stores the computed
 * attitude of an accepted step so a degenerate heading projection can fall
 * back to the previous b1c. A fresh instance is created at every switch.
 */
class SegmentController {
 public:
  SegmentController(const FlightSegment& segment, const QuadParams& params, const Gains& gains);

  ControlEval evaluate(double t, const VehicleState& s) const;
  void commit(const ControlEval& eval);

  FlightMode mode() const { return segment_->mode(); }
  int heading_fallbacks() const { return heading_fallbacks_; }

 private:
  const FlightSegment* segment_;
  const QuadParams* params_;
  const Gains* gains_;
  std::optional<ComputedAttitude> prev_;
  int heading_fallbacks_ = 0;
};

using ControlLaw = std::function<ControlOutput(double t, const VehicleState& s)>;

/// Classical RK4 on (x, v, R, omega) with R embedded as nine reals; the
/// control is recomputed at each stage. R is polar-projected back onto SO(3)
/// when its orthogonality defect exceeds ortho_tolerance.
VehicleState rk4_step(const VehicleState& s, double t, double dt, const ControlLaw& law,
                      const QuadParams& p, double ortho_tolerance = 1e-9);

struct SimResult {
  Trace trace;
  MonitorReport report;
  bool aborted = false;
  std::string diagnostic;    // set when aborted
  double abort_time = 0.0;
  VehicleState final_state;
  double max_ortho_defect = 0.0;   // after the re-orthonormalization policy
  long negative_thrust_steps = 0;  // accepted steps with any rotor thrust < 0
  int heading_fallbacks = 0;
};

/// Deterministic: identical inputs produce bit-identical traces.
SimResult run(const Mission& mission, const SimConfig& cfg);

/// run() without the stability monitor.
SimResult run_trace(const Mission& mission, const SimConfig& cfg);

}  // namespace geoquad
