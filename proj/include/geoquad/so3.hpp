#pragma once

#include <Eigen/Dense>

namespace geoquad {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kE1 = Vec3::UnitX();
inline const Vec3 kE2 = Vec3::UnitY();
inline const Vec3 kE3 = Vec3::UnitZ();

/// Tolerances enforced when a matrix is admitted as a rotation.
inline constexpr double kRotationOrthoTol = 1e-9;
inline constexpr double kRotationDetTol = 1e-9;
inline constexpr double kSkewTol = 1e-8;

/**
 * @brief Element of SO(3), stored as a 3x3 matrix.
 *
 * Checked construction verifies ||R^T R - I||_F and det(R) against
 * kRotationOrthoTol / kRotationDetTol. The integrator evaluates controllers
 * at intermediate Runge-Kutta stages where the matrix is only approximately
 * orthogonal; those call sites use unchecked().
 */
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Throws Error(NotARotation) if the invariants do not hold.
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }
  static Rotation unchecked(const Mat3& m) {
    Rotation r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }
  Vec3 col(int i) const { return m_.col(i); }
  Rotation transpose() const { return unchecked(m_.transpose()); }

  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return unchecked(a.m_ * b.m_);
  }
  friend Vec3 operator*(const Rotation& a, const Vec3& v) { return a.m_ * v; }
  friend bool operator==(const Rotation& a, const Rotation& b) {
    return a.m_ == b.m_;
  }

 private:
  Mat3 m_;
};

/// ||m^T m - I||_F.
double orthogonality_defect(const Mat3& m);

/// Skew-symmetric matrix with hat(v) * w == v.cross(w).
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws Error(NotSkewSymmetric) when ||m + m^T||_F > kSkewTol.
Vec3 vee(const Mat3& m);

/// vee of the skew-symmetric part, for matrices that are skew up to roundoff.
Vec3 vee_skew_part(const Mat3& m);

/// Rodrigues exponential; Taylor series below |v| < 1e-4.
Rotation exp_so3(const Vec3& v);

/// Attitude error function 0.5 * tr(I - rd^T r).
double psi(const Rotation& r, const Rotation& rd);

/// e_R = 0.5 * vee(rd^T r - r^T rd).
Vec3 attitude_error(const Rotation& r, const Rotation& rd);

/// e_Omega = omega - r^T rd omega_d.
Vec3 angular_velocity_error(const Vec3& omega, const Rotation& r,
                            const Rotation& rd, const Vec3& omega_d);

/// Unit vector obtained by projecting b1d onto the plane normal to b3c.
/// Throws DegenerateProjection when ||b3c x b1d|| <= 1e-6, InvalidParameter
/// when b3c is not unit.
Vec3 normalized_projection(const Vec3& b1d, const Vec3& b3c);

/// Closest rotation in Frobenius norm (polar factor). Throws SingularInput
/// when det(m) <= 1e-12.
Rotation orthonormalize(const Mat3& m);

}  // namespace geoquad
