#pragma once

#include <array>

#include "geoquad/so3.hpp"

namespace geoquad {

inline constexpr double kDefaultGravity = 9.81;

/// Rigid-body and rotor-geometry parameters. Inertial e3 points down, so
/// gravity acts along +e3.
struct QuadParams {
  double mass = 1.0;                   // kg
  Mat3 inertia = Mat3::Identity();     // kg m^2, body frame, SPD
  double arm_length = 0.1;             // m
  double c_tau_f = 0.01;               // m
  double gravity = kDefaultGravity;    // m/s^2

  /// Throws Error(InvalidParameter) naming the first violated invariant.
  void validate() const;

  double min_inertia_eigenvalue() const;
  double max_inertia_eigenvalue() const;

  friend bool operator==(const QuadParams&, const QuadParams&) = default;
};

struct VehicleState {
  Vec3 x = Vec3::Zero();        // m, inertial
  Vec3 v = Vec3::Zero();        // m/s, inertial
  Rotation R;                   // body -> inertial
  Vec3 omega = Vec3::Zero();    // rad/s, body

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

using RotorThrusts = std::array<double, 4>;

struct ControlOutput {
  double f = 0.0;               // N, along -b3
  Vec3 M = Vec3::Zero();        // N m, body
  RotorThrusts rotor_thrusts{};
};

/// Time derivative of (x, v, R, omega).
struct StateDerivative {
  Vec3 dx;
  Vec3 dv;
  Mat3 dR;
  Vec3 domega;
};

/// The 4x4 matrix mapping (f1..f4) to (f, M1, M2, M3).
Eigen::Matrix4d mixing_matrix(const QuadParams& p);

RotorThrusts mixing_to_rotors(double f, const Vec3& M, const QuadParams& p);

struct ThrustAndMoment {
  double f;
  Vec3 M;
};
ThrustAndMoment mixing_from_rotors(const RotorThrusts& rotors, const QuadParams& p);

/// Fills rotor_thrusts from (f, M).
ControlOutput make_control_output(double f, const Vec3& M, const QuadParams& p);

/// Equations of motion evaluated on a raw attitude matrix; the integrator
/// calls this with stage matrices that are only approximately orthogonal.
StateDerivative state_derivative(const Vec3& v, const Mat3& R, const Vec3& omega,
                                 double f, const Vec3& M, const QuadParams& p);

StateDerivative state_derivative(const VehicleState& s, const ControlOutput& u,
                                 const QuadParams& p);

/// 0.5 m |v|^2 + 0.5 omega^T J omega - m g (e3 . x); conserved when f = 0, M = 0.
double mechanical_energy(const VehicleState& s, const QuadParams& p);

}  // namespace geoquad
