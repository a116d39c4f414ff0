#include "geoquad/so3.hpp"

#include <cmath>
#include <string>

#include "geoquad/error.hpp"

namespace geoquad {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSkewSymmetric: return "NotSkewSymmetric";
    case ErrorKind::NotARotation: return "NotARotation";
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::SingularMixing: return "SingularMixing";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ThrustSingularity: return "ThrustSingularity";
    case ErrorKind::ThrustVectorSingularity: return "ThrustVectorSingularity";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::InfeasibleInputs: return "InfeasibleInputs";
    case ErrorKind::FitFailed: return "FitFailed";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

double orthogonality_defect(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::NotARotation, "rotation matrix has non-finite entries");
  }
  const double defect = orthogonality_defect(m);
  const double det = m.determinant();
  if (defect > kRotationOrthoTol || std::abs(det - 1.0) > kRotationDetTol) {
    throw Error(ErrorKind::NotARotation,
                "matrix is not in SO(3): ||R^T R - I||_F = " + std::to_string(defect) +
                    ", det = " + std::to_string(det));
  }
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Vec3 vee(const Mat3& m) {
  if ((m + m.transpose()).norm() > kSkewTol) {
    throw Error(ErrorKind::NotSkewSymmetric, "vee: matrix is not skew-symmetric");
  }
  return vee_skew_part(m);
}

Vec3 vee_skew_part(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Rotation exp_so3(const Vec3& v) {
  const double theta = v.norm();
  const Mat3 k = hat(v);
  double a;  // sin(theta) / theta
  double b;  // (1 - cos(theta)) / theta^2
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Rotation::unchecked(Mat3::Identity() + a * k + b * k * k);
}

double psi(const Rotation& r, const Rotation& rd) {
  return 0.5 * (3.0 - (rd.matrix().transpose() * r.matrix()).trace());
}

Vec3 attitude_error(const Rotation& r, const Rotation& rd) {
  const Mat3 rel = rd.matrix().transpose() * r.matrix();
  return 0.5 * vee(rel - rel.transpose());
}

Vec3 angular_velocity_error(const Vec3& omega, const Rotation& r,
                            const Rotation& rd, const Vec3& omega_d) {
  return omega - r.matrix().transpose() * rd.matrix() * omega_d;
}

Vec3 normalized_projection(const Vec3& b1d, const Vec3& b3c) {
  if (std::abs(b3c.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidParameter, "normalized_projection: b3c must be a unit vector");
  }
  const Vec3 c = b3c.cross(b1d);
  const double n = c.norm();
  if (!(n > 1e-6)) {
    throw Error(ErrorKind::DegenerateProjection,
                "normalized_projection: b1d is parallel to b3c");
  }
  return -b3c.cross(c) / n;
}

Rotation orthonormalize(const Mat3& m) {
  const double det = m.determinant();
  if (!(det > 1e-12)) {
    throw Error(ErrorKind::SingularInput, "orthonormalize: det(m) must be positive");
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation::unchecked(svd.matrixU() * svd.matrixV().transpose());
}

}  // namespace geoquad
