#include "geoquad/dynamics.hpp"

#include <cmath>

#include "geoquad/error.hpp"

namespace geoquad {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParameter, what);
}

}  // namespace

void QuadParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "mass must be positive");
  require(inertia.allFinite(), "inertia must be finite");
  require((inertia - inertia.transpose()).norm() <= 1e-12 * (1.0 + inertia.norm()),
          "inertia must be symmetric");
  require(Eigen::LLT<Mat3>(inertia).info() == Eigen::Success && min_inertia_eigenvalue() > 0.0,
          "inertia must be positive definite");
  require(std::isfinite(arm_length) && arm_length > 0.0, "arm length must be positive");
  require(std::isfinite(c_tau_f) && c_tau_f != 0.0, "c_tau_f must be nonzero");
  require(std::isfinite(gravity) && gravity > 0.0, "gravity must be positive");
}

double QuadParams::min_inertia_eigenvalue() const {
  return Eigen::SelfAdjointEigenSolver<Mat3>(inertia, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double QuadParams::max_inertia_eigenvalue() const {
  return Eigen::SelfAdjointEigenSolver<Mat3>(inertia, Eigen::EigenvaluesOnly).eigenvalues()(2);
}

Eigen::Matrix4d mixing_matrix(const QuadParams& p) {
  const double d = p.arm_length;
  const double c = p.c_tau_f;
  Eigen::Matrix4d m;
  // clang-format off
  m << 1.0, 1.0, 1.0, 1.0,
       0.0,  -d, 0.0,   d,
         d, 0.0,  -d, 0.0,
        -c,   c,  -c,   c;
  // clang-format on
  return m;
}

RotorThrusts mixing_to_rotors(double f, const Vec3& M, const QuadParams& p) {
  const double d = p.arm_length;
  const double c = p.c_tau_f;
  if (std::abs(d) <= 1e-12 || std::abs(c) <= 1e-12) {
    throw Error(ErrorKind::SingularMixing, "mixing matrix is singular (d or c_tau_f is zero)");
  }
  // Closed-form inverse; the matrix has determinant 8 c d^2.
  const double base = 0.25 * f;
  const double yaw = 0.25 * M.z() / c;
  return {base + 0.5 * M.y() / d - yaw,
          base - 0.5 * M.x() / d + yaw,
          base - 0.5 * M.y() / d - yaw,
          base + 0.5 * M.x() / d + yaw};
}

ThrustAndMoment mixing_from_rotors(const RotorThrusts& r, const QuadParams& p) {
  const double d = p.arm_length;
  const double c = p.c_tau_f;
  return {r[0] + r[1] + r[2] + r[3],
          Vec3(d * (r[3] - r[1]), d * (r[0] - r[2]), c * (-r[0] + r[1] - r[2] + r[3]))};
}

ControlOutput make_control_output(double f, const Vec3& M, const QuadParams& p) {
  return {f, M, mixing_to_rotors(f, M, p)};
}

StateDerivative state_derivative(const Vec3& v, const Mat3& R, const Vec3& omega,
                                 double f, const Vec3& M, const QuadParams& p) {
  StateDerivative out;
  out.dx = v;
  out.dv = p.gravity * kE3 - (f / p.mass) * R.col(2);
  out.dR = R * hat(omega);
  out.domega = p.inertia.llt().solve(M - omega.cross(p.inertia * omega));
  return out;
}

StateDerivative state_derivative(const VehicleState& s, const ControlOutput& u,
                                 const QuadParams& p) {
  return state_derivative(s.v, s.R.matrix(), s.omega, u.f, u.M, p);
}

double mechanical_energy(const VehicleState& s, const QuadParams& p) {
  return 0.5 * p.mass * s.v.squaredNorm() + 0.5 * s.omega.dot(p.inertia * s.omega) -
         p.mass * p.gravity * s.x.z();
}

}  // namespace geoquad
