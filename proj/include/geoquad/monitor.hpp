#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoquad/control.hpp"
#include "geoquad/mission.hpp"
#include "geoquad/trace.hpp"

namespace geoquad {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// Eigenvalues of a symmetric 2x2 matrix in ascending order (closed form).
Vec2 symmetric_eigenvalues(const Mat2& m);
double min_eigenvalue(const Mat2& m);
double max_eigenvalue(const Mat2& m);
/// Spectral norm of an arbitrary 2x2 matrix.
double spectral_norm(const Mat2& m);

/// Initial-condition test for exponential attitude tracking:
/// Psi(0) < 2 and |e_Omega(0)|^2 < (2 / lambda_max(J)) k_R (2 - Psi(0)).
struct RoaCheck {
  bool inside = false;
  double psi0 = 0.0;
  double psi_margin = 0.0;    // 2 - Psi(0)
  double omega_margin = 0.0;  // bound - |e_Omega(0)|^2
};

RoaCheck check_attitude_roa(const VehicleState& s0, const AttitudeCommand& cmd0,
                            const Gains& gains, const QuadParams& p);

/// Constants and matrices certifying exponential stability of the coupled
/// translational/rotational error dynamics.
struct GainCertificate {
  double c1 = 0.0;
  double c2 = 0.0;
  double psi1 = 0.0;
  double alpha = 0.0;  // sqrt(psi1 (2 - psi1))
  double e_x_max = 0.0;
  double B = 0.0;
  double c1_bound = 0.0;
  double c2_bound = 0.0;
  Mat2 W1 = Mat2::Zero(), W12 = Mat2::Zero(), W2 = Mat2::Zero();
  Mat2 M11 = Mat2::Zero(), M12 = Mat2::Zero(), M21 = Mat2::Zero(), M22 = Mat2::Zero(),
       M22prime = Mat2::Zero();
  /// lambda_min(W2) - 4 |W12|^2 / lambda_min(W1) at the chosen (c1, c2).
  double margin = 0.0;
  bool feasible = false;
};

/// The matrices for a given (c1, c2). M22 uses psi2 = psi1 when not given.
GainCertificate certificate_matrices(const Gains& gains, const QuadParams& p, double psi1,
                                     double e_x_max, double B, double c1, double c2);

/// 100 x 100 log grid over c1 and c2 below their admissible bounds, keeping
/// the pair with the largest margin. Throws InfeasibleInputs unless
/// psi1 in (0, 1), e_x_max > 0 and B > 0.
GainCertificate search_certificate(const Gains& gains, const QuadParams& p, double psi1,
                                   double e_x_max, double B);

/// Region-of-attraction ellipsoid test for the coupled dynamics:
/// lambda_max(M12) |z1|^2 + lambda_max(M22') |z2|^2 < 0.5 k_x e_x_max^2.
bool coupled_roa_holds(const GainCertificate& cert, const Gains& gains, double ex_norm,
                       double ev_norm, double eR_norm, double eW_norm);

struct EnvelopeFit {
  double alpha = 0.0;
  double beta = 0.0;
  bool decaying = false;  // beta > 0
  bool bound_holds = false;
  std::size_t samples = 0;
};

/// Least-squares fit of log(psi) against t for the decay rate; alpha is raised
/// to the smallest value for which psi <= min(2, alpha e^{-beta t}) holds on
/// every sample. Throws FitFailed on non-positive samples or fewer than 3.
EnvelopeFit fit_exponential_envelope(const std::vector<double>& t,
                                     const std::vector<double>& psi_series);

struct Violation {
  double t = 0.0;
  std::string condition;
  std::string detail;
};

/// Lyapunov bookkeeping for one flight segment. The V series is filled with
/// the searched (c1, c2) whenever a certificate exists; V is only checked
/// when that certificate is feasible. Envelope time is relative to t_start.
struct SegmentReport {
  std::size_t index = 0;
  FlightMode mode = FlightMode::Position;
  double t_start = 0.0;
  double t_end = 0.0;
  RoaCheck roa;
  double psi1 = 0.0;
  std::optional<double> t_star;   // first time psi < psi1 (position/velocity)
  std::optional<GainCertificate> certificate;
  std::optional<bool> coupled_roa_at_t_star;
  double psi2 = 0.0;              // V2'(0) / k_R, clamped to 2
  bool psi2_clamped = false;
  std::vector<double> time, psi, v2prime, v;
  std::optional<EnvelopeFit> envelope;
  std::vector<Violation> violations;
};

struct MonitorReport {
  std::vector<SegmentReport> segments;
  std::size_t violation_count() const;
  bool ok() const { return violation_count() == 0; }
};

/// Options that override the per-segment defaults.
struct MonitorOptions {
  std::optional<double> psi1;
  std::optional<double> e_x_max;
  double jitter = 1e-9;  // relative to the series maximum
};

/// V2' = 0.5 e_Omega . J e_Omega + k_R psi.
double lyapunov_v2prime(const TraceRecord& r, const Gains& gains, const QuadParams& p);
/// V = V1 + V2 with V1 = 0.5 k_x |e_x|^2 + 0.5 m |e_v|^2 + c1 e_x . e_v and
/// V2 = V2' + c2 e_R . e_Omega.
double lyapunov_v(const TraceRecord& r, const Gains& gains, const QuadParams& p, double c1,
                  double c2);

/// Sup of |-m g e3 + m a_d(t)| over [t_start, t_end] sampled at 1 kHz, plus 1%.
double acceleration_bound(const FlightSegment& seg, const QuadParams& p);

/// Largest value of |d e_R/dt| - |e_Omega| over the trace, with the rate taken
/// by central differences inside each segment.
double max_error_rate_excess(const Trace& trace);
/// Largest |dPsi/dt - e_R . e_Omega| over the trace (central differences).
double max_psi_rate_residual(const Trace& trace);

/// Lyapunov series and condition checks for the trace records of one segment.
SegmentReport lyapunov_series(const Mission& mission, std::size_t segment_index,
                              const Trace& records, const MonitorOptions& opts = {});

/// Runs lyapunov_series for every segment present in the trace.
MonitorReport analyze(const Mission& mission, const Trace& trace,
                      const MonitorOptions& opts = {});

}  // namespace geoquad
