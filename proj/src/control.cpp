#include "geoquad/control.hpp"

#include <cmath>

#include "geoquad/error.hpp"

namespace geoquad {

void Gains::validate() const {
  auto positive = [](double g) { return std::isfinite(g) && g > 0.0; };
  if (!positive(k_x)) throw Error(ErrorKind::InvalidParameter, "k_x must be positive");
  if (!positive(k_v)) throw Error(ErrorKind::InvalidParameter, "k_v must be positive");
  if (!positive(k_R)) throw Error(ErrorKind::InvalidParameter, "k_R must be positive");
  if (!positive(k_Omega)) throw Error(ErrorKind::InvalidParameter, "k_Omega must be positive");
}

Vec3 attitude_moment(const VehicleState& s, const AttitudeCommand& cmd, const Gains& gains,
                     const QuadParams& p) {
  const Mat3& R = s.R.matrix();
  const Mat3 RtRd = R.transpose() * cmd.R_d.matrix();
  const Vec3 e_R = attitude_error(s.R, cmd.R_d);
  const Vec3 e_W = s.omega - RtRd * cmd.Omega_d;
  const Mat3& J = p.inertia;
  return -gains.k_R * e_R - gains.k_Omega * e_W + s.omega.cross(J * s.omega) -
         J * (hat(s.omega) * RtRd * cmd.Omega_d - RtRd * cmd.dOmega_d);
}

double altitude_thrust(const VehicleState& s, double x3d, double dx3d, double ddx3d,
                       const Gains& gains, const QuadParams& p) {
  const double c = kE3.dot(s.R * kE3);
  if (std::abs(c) <= 1e-3) {
    throw Error(ErrorKind::ThrustSingularity,
                "altitude thrust undefined: third body axis is horizontal");
  }
  const double num = gains.k_x * (s.x.z() - x3d) + gains.k_v * (s.v.z() - dx3d) +
                     p.mass * p.gravity - p.mass * ddx3d;
  return num / c;
}

double position_hold_thrust(const VehicleState& s, const Vec3& x_c, const Gains& gains,
                            const QuadParams& p) {
  const Vec3 demand = gains.k_x * (s.x - x_c) + gains.k_v * s.v + p.mass * p.gravity * kE3;
  return demand.dot(s.R * kE3);
}

namespace {

/// A unit vector y/|y| and its first two time derivatives.
struct UnitJet {
  Vec3 u, du, d2u;
};

UnitJet normalize_jet(const Vec3& y, const Vec3& dy, const Vec3& d2y) {
  const double n = y.norm();
  const double n3 = n * n * n;
  const double ydy = y.dot(dy);
  UnitJet out;
  out.u = y / n;
  out.du = dy / n - y * (ydy / n3);
  out.d2u = d2y / n - 2.0 * dy * (ydy / n3) - y * ((dy.squaredNorm() + y.dot(d2y)) / n3) +
            y * (3.0 * ydy * ydy / (n3 * n * n));
  return out;
}

/// Thrust-direction vector A and its first two derivatives along the
/// closed-loop flow.
struct ThrustVectorJet {
  Vec3 A, dA, d2A;
};

struct HeadingJet {
  Vec3 b1d, db1d, d2b1d;
};

ComputedAttitude assemble_setpoint(const ThrustVectorJet& a, HeadingJet heading,
                                   const std::optional<ComputedAttitude>& prev) {
  if (!(a.A.norm() > 1e-6)) {
    throw Error(ErrorKind::ThrustVectorSingularity,
                "commanded thrust vector vanishes (|A| <= 1e-6)");
  }
  const UnitJet b3 = normalize_jet(-a.A, -a.dA, -a.d2A);

  bool fallback = false;
  if (!(b3.u.cross(heading.b1d).norm() > 1e-6)) {
    if (!prev) {
      throw Error(ErrorKind::DegenerateProjection,
                  "b1d is parallel to b3c and no previous heading is available");
    }
    heading = {prev->R_c.col(0), Vec3::Zero(), Vec3::Zero()};
    fallback = true;
  }

  // b1c = unit(-b3c x (b3c x b1d)), differentiated by the product rule.
  const Vec3 C = b3.u.cross(heading.b1d);
  const Vec3 dC = b3.du.cross(heading.b1d) + b3.u.cross(heading.db1d);
  const Vec3 d2C = b3.d2u.cross(heading.b1d) + 2.0 * b3.du.cross(heading.db1d) +
                   b3.u.cross(heading.d2b1d);
  const Vec3 y = -b3.u.cross(C);
  if (!(y.norm() > 1e-6)) {
    throw Error(ErrorKind::DegenerateProjection, "heading is parallel to b3c");
  }
  const Vec3 dy = -(b3.du.cross(C) + b3.u.cross(dC));
  const Vec3 d2y = -(b3.d2u.cross(C) + 2.0 * b3.du.cross(dC) + b3.u.cross(d2C));
  const UnitJet b1 = normalize_jet(y, dy, d2y);

  const Vec3 b2 = b3.u.cross(b1.u);
  const Vec3 db2 = b3.du.cross(b1.u) + b3.u.cross(b1.du);
  const Vec3 d2b2 = b3.d2u.cross(b1.u) + 2.0 * b3.du.cross(b1.du) + b3.u.cross(b1.d2u);

  Mat3 Rc, dRc, d2Rc;
  Rc << b1.u, b2, b3.u;
  dRc << b1.du, db2, b3.du;
  d2Rc << b1.d2u, d2b2, b3.d2u;

  ComputedAttitude out;
  out.R_c = Rotation::unchecked(Rc);
  out.b3c = b3.u;
  out.A = a.A;
  // R_c^T dR_c and R_c^T d2R_c - hat(Omega_c)^2 are skew up to roundoff.
  out.Omega_c = vee_skew_part(Rc.transpose() * dRc);
  out.dOmega_c = vee_skew_part(Rc.transpose() * d2Rc);
  out.used_previous_heading = fallback;
  return out;
}

/// Shared by the position and velocity laws: given the error-feedback part of
/// A and its derivatives expressed through e_v, computes the jet of A.
/// `accel_ref` is the commanded acceleration and its next two derivatives.
ThrustVectorJet thrust_vector_jet(const VehicleState& s, const Vec3& e_x, const Vec3& e_v,
                                  double k_x, double k_v, const Vec3& a_ref, const Vec3& da_ref,
                                  const Vec3& d2a_ref, const QuadParams& p) {
  const double m = p.mass;
  const Vec3 b3 = s.R * kE3;
  const Vec3 db3 = s.R.matrix() * s.omega.cross(kE3);

  ThrustVectorJet jet;
  jet.A = -k_x * e_x - k_v * e_v - m * p.gravity * kE3 + m * a_ref;
  const double f = -jet.A.dot(b3);
  const Vec3 de_v = p.gravity * kE3 - (f / m) * b3 - a_ref;
  jet.dA = -k_x * e_v - k_v * de_v + m * da_ref;
  const double df = -jet.dA.dot(b3) - jet.A.dot(db3);
  const Vec3 d2e_v = -(df / m) * b3 - (f / m) * db3 - da_ref;
  jet.d2A = -k_x * de_v - k_v * d2e_v + m * d2a_ref;
  return jet;
}

}  // namespace

ComputedAttitude compute_attitude_setpoint(const VehicleState& s, const PositionCommand& cmd,
                                           const Gains& gains, const QuadParams& p,
                                           const std::optional<ComputedAttitude>& prev) {
  const Vec3 e_x = s.x - cmd.x_d;
  const Vec3 e_v = s.v - cmd.dx_d;
  const ThrustVectorJet jet = thrust_vector_jet(s, e_x, e_v, gains.k_x, gains.k_v, cmd.d2x_d,
                                                cmd.d3x_d, cmd.d4x_d, p);
  return assemble_setpoint(jet, {cmd.b1d, cmd.db1d, cmd.d2b1d}, prev);
}

ComputedAttitude compute_attitude_setpoint(const VehicleState& s, const VelocityCommand& cmd,
                                           const Gains& gains, const QuadParams& p,
                                           const std::optional<ComputedAttitude>& prev) {
  // The velocity law is the position law with the position feedback removed.
  const Vec3 e_v = s.v - cmd.v_d;
  const ThrustVectorJet jet = thrust_vector_jet(s, Vec3::Zero(), e_v, 0.0, gains.k_v, cmd.dv_d,
                                                cmd.d2v_d, cmd.d3v_d, p);
  return assemble_setpoint(jet, {cmd.b1d, cmd.db1d, cmd.d2b1d}, prev);
}

namespace {

std::pair<ControlOutput, ComputedAttitude> track_setpoint(const VehicleState& s,
                                                          ComputedAttitude sp,
                                                          const Gains& gains,
                                                          const QuadParams& p) {
  const double f = -sp.A.dot(s.R * kE3);
  const Vec3 M = attitude_moment(s, {sp.R_c, sp.Omega_c, sp.dOmega_c}, gains, p);
  return {make_control_output(f, M, p), std::move(sp)};
}

}  // namespace

std::pair<ControlOutput, ComputedAttitude> position_control(
    const VehicleState& s, const PositionCommand& cmd, const Gains& gains, const QuadParams& p,
    const std::optional<ComputedAttitude>& prev) {
  return track_setpoint(s, compute_attitude_setpoint(s, cmd, gains, p, prev), gains, p);
}

std::pair<ControlOutput, ComputedAttitude> velocity_control(
    const VehicleState& s, const VelocityCommand& cmd, const Gains& gains, const QuadParams& p,
    const std::optional<ComputedAttitude>& prev) {
  return track_setpoint(s, compute_attitude_setpoint(s, cmd, gains, p, prev), gains, p);
}

}  // namespace geoquad
