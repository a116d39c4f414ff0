#pragma once

#include <optional>
#include <utility>

#include "geoquad/dynamics.hpp"
#include "geoquad/so3.hpp"

namespace geoquad {

struct Gains {
  double k_x = 1.0;
  double k_v = 1.0;
  double k_R = 1.0;
  double k_Omega = 1.0;

  /// Throws Error(InvalidParameter) unless every gain is strictly positive.
  void validate() const;

  friend bool operator==(const Gains&, const Gains&) = default;
};

/// Desired attitude with hat(Omega_d) = R_d^T dR_d/dt.
struct AttitudeCommand {
  Rotation R_d;
  Vec3 Omega_d = Vec3::Zero();
  Vec3 dOmega_d = Vec3::Zero();
};

/// Position reference with derivatives up to fourth order and a heading
/// direction b1d (unit) with its first two derivatives.
struct PositionCommand {
  Vec3 x_d = Vec3::Zero();
  Vec3 dx_d = Vec3::Zero();
  Vec3 d2x_d = Vec3::Zero();
  Vec3 d3x_d = Vec3::Zero();
  Vec3 d4x_d = Vec3::Zero();
  Vec3 b1d = kE1;
  Vec3 db1d = Vec3::Zero();
  Vec3 d2b1d = Vec3::Zero();
};

/// Velocity reference with derivatives up to third order.
struct VelocityCommand {
  Vec3 v_d = Vec3::Zero();
  Vec3 dv_d = Vec3::Zero();
  Vec3 d2v_d = Vec3::Zero();
  Vec3 d3v_d = Vec3::Zero();
  Vec3 b1d = kE1;
  Vec3 db1d = Vec3::Zero();
  Vec3 d2b1d = Vec3::Zero();
};

/**
 * @brief Attitude setpoint built from the desired thrust vector.
 *
 * A is the un-normalized thrust-direction vector; b3c = -A / |A|. R_c has
 * columns (b1c, b3c x b1c, b3c). Omega_c and dOmega_c are the exact body
 * rate and acceleration of R_c(t) along the closed-loop trajectory.
 */
struct ComputedAttitude {
  Rotation R_c;
  Vec3 Omega_c = Vec3::Zero();
  Vec3 dOmega_c = Vec3::Zero();
  Vec3 b3c = kE3;
  Vec3 A = Vec3::Zero();
  /// True when b1d was parallel to b3c and the previous b1c was projected instead.
  bool used_previous_heading = false;
};

/// Moment for attitude tracking: -k_R e_R - k_Omega e_Omega + Omega x J Omega
/// - J (hat(Omega) R^T R_d Omega_d - R^T R_d dOmega_d).
Vec3 attitude_moment(const VehicleState& s, const AttitudeCommand& cmd, const Gains& gains,
                     const QuadParams& p);

/// Thrust that makes the altitude error obey a stable second-order linear ODE.
/// Throws ThrustSingularity when |e3 . R e3| <= 1e-3.
double altitude_thrust(const VehicleState& s, double x3d, double dx3d, double ddx3d,
                       const Gains& gains, const QuadParams& p);

/// (k_x (x - x_c) + k_v v + m g e3) . R e3, used to loiter near x_c while the
/// attitude is commanded independently.
double position_hold_thrust(const VehicleState& s, const Vec3& x_c, const Gains& gains,
                            const QuadParams& p);

/// Throws ThrustVectorSingularity when |A| <= 1e-6 and DegenerateProjection
/// when b1d is parallel to b3c and no previous setpoint is available.
ComputedAttitude compute_attitude_setpoint(const VehicleState& s, const PositionCommand& cmd,
                                           const Gains& gains, const QuadParams& p,
                                           const std::optional<ComputedAttitude>& prev);

ComputedAttitude compute_attitude_setpoint(const VehicleState& s, const VelocityCommand& cmd,
                                           const Gains& gains, const QuadParams& p,
                                           const std::optional<ComputedAttitude>& prev);

std::pair<ControlOutput, ComputedAttitude> position_control(
    const VehicleState& s, const PositionCommand& cmd, const Gains& gains, const QuadParams& p,
    const std::optional<ComputedAttitude>& prev = std::nullopt);

std::pair<ControlOutput, ComputedAttitude> velocity_control(
    const VehicleState& s, const VelocityCommand& cmd, const Gains& gains, const QuadParams& p,
    const std::optional<ComputedAttitude>& prev = std::nullopt);

}  // namespace geoquad
