#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geoquad/control.hpp"
#include "geoquad/dynamics.hpp"

namespace geoquad {

/// a * sin(omega * t + phase), t in absolute mission time.
struct Sinusoid {
  double amplitude = 0.0;
  double omega = 0.0;  // rad/s
  double phase = 0.0;  // rad

  friend bool operator==(const Sinusoid&, const Sinusoid&) = default;
};

/// Scalar reference signal: polynomial in absolute time plus sinusoids.
/// Derivatives of every order are analytic.
struct Signal {
  std::vector<double> poly;  // poly[k] multiplies t^k
  std::vector<Sinusoid> sines;

  static Signal constant(double c) { return {{c}, {}}; }
  double derivative(double t, int order) const;
  double value(double t) const { return derivative(t, 0); }

  friend bool operator==(const Signal&, const Signal&) = default;
};

struct Trajectory3 {
  Signal x, y, z;

  static Trajectory3 constant(const Vec3& c);
  Vec3 derivative(double t, int order) const;
  Vec3 value(double t) const { return derivative(t, 0); }

  friend bool operator==(const Trajectory3&, const Trajectory3&) = default;
};

/// R_d(t) = R0 exp((t - t0) hat(body_rate)): a constant body-rate rotation,
/// so Omega_d = body_rate and dOmega_d = 0 exactly.
struct RotationProfile {
  Rotation R0;
  Vec3 body_rate = Vec3::Zero();
  double t0 = 0.0;

  friend bool operator==(const RotationProfile&, const RotationProfile&) = default;
};

enum class FlightMode { Attitude, Position, Velocity };

std::string_view to_string(FlightMode mode);

/// Thrust policies available while the attitude is commanded.
struct AltitudeTracking {
  Signal x3d;
  friend bool operator==(const AltitudeTracking&, const AltitudeTracking&) = default;
};
struct PositionHold {
  Vec3 x_c = Vec3::Zero();
  friend bool operator==(const PositionHold&, const PositionHold&) = default;
};
using ThrustPolicy = std::variant<AltitudeTracking, PositionHold>;

struct AttitudeSegment {
  RotationProfile attitude;
  ThrustPolicy thrust = PositionHold{};
  friend bool operator==(const AttitudeSegment&, const AttitudeSegment&) = default;
};

/// b1d is held constant over the segment.
struct PositionSegment {
  Trajectory3 x_d;
  Vec3 b1d = kE1;
  friend bool operator==(const PositionSegment&, const PositionSegment&) = default;
};

struct VelocitySegment {
  Trajectory3 v_d;
  Vec3 b1d = kE1;
  friend bool operator==(const VelocitySegment&, const VelocitySegment&) = default;
};

using SegmentSpec = std::variant<AttitudeSegment, PositionSegment, VelocitySegment>;

struct FlightSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  SegmentSpec spec;

  FlightMode mode() const;
  friend bool operator==(const FlightSegment&, const FlightSegment&) = default;
};

/// Altitude reference and its derivatives, or the loiter point.
struct AltitudeTarget {
  double x3d = 0.0, dx3d = 0.0, ddx3d = 0.0;
};
using ThrustTarget = std::variant<AltitudeTarget, PositionHold>;

struct AttitudeModeCommand {
  AttitudeCommand attitude;
  ThrustTarget thrust;
};

using SegmentCommand = std::variant<AttitudeModeCommand, PositionCommand, VelocityCommand>;

/// Tolerance on the segment window used by evaluate_command.
inline constexpr double kWindowTol = 1e-9;

/// Throws Error(OutOfWindow) unless t lies in [t_start, t_end].
SegmentCommand evaluate_command(const FlightSegment& seg, double t);

/// Same as evaluate_command without the window check; the analytic profiles
/// extend beyond the window, which the integrator relies on when a step
/// straddles a boundary.
SegmentCommand command_at(const FlightSegment& seg, double t);

struct Mission {
  std::string name;
  std::vector<FlightSegment> segments;
  VehicleState initial_state;
  QuadParams params;
  Gains gains;

  double duration() const { return segments.empty() ? 0.0 : segments.back().t_end; }
  /// Index of the segment active at t: t_start <= t < t_end, the last segment
  /// also owning its end point.
  std::size_t segment_index_at(double t) const;

  /// Throws Error(ValidationError) if segments are not contiguous from 0 or a
  /// segment is malformed; also validates params and gains.
  void validate() const;

  friend bool operator==(const Mission&, const Mission&) = default;
};

/// Vehicle parameters and controller gains used by the reference maneuvers.
QuadParams reference_params();
Gains reference_gains(const QuadParams& p);
/// Upside-down initial attitude of the recovery maneuver (polar-projected
/// onto SO(3) from its four-digit tabulation).
Rotation reference_initial_attitude();

/// Hover at the origin, recovering from the upside-down initial attitude.
Mission build_case1();
/// Velocity, attitude (720 deg flip), position, attitude (360 deg roll),
/// position segments over 12 s.
Mission build_case2();

}  // namespace geoquad
