#include "geoquad/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "geoquad/error.hpp"

namespace geoquad {

Vec2 symmetric_eigenvalues(const Mat2& m) {
  const double a = m(0, 0);
  const double d = m(1, 1);
  const double b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  return {mean - r, mean + r};
}

double min_eigenvalue(const Mat2& m) { return symmetric_eigenvalues(m)(0); }
double max_eigenvalue(const Mat2& m) { return symmetric_eigenvalues(m)(1); }

double spectral_norm(const Mat2& m) {
  return std::sqrt(std::max(0.0, max_eigenvalue(m.transpose() * m)));
}

namespace {

RoaCheck roa_from_errors(double psi0, const Vec3& e_omega0, const Gains& gains,
                         const QuadParams& p) {
  RoaCheck out;
  out.psi0 = psi0;
  out.psi_margin = 2.0 - psi0;
  const double bound = 2.0 / p.max_inertia_eigenvalue() * gains.k_R * (2.0 - psi0);
  out.omega_margin = bound - e_omega0.squaredNorm();
  out.inside = psi0 < 2.0 && out.omega_margin > 0.0;
  return out;
}

bool positive_definite(const Mat2& m) { return min_eigenvalue(m) > 0.0; }

}  // namespace

RoaCheck check_attitude_roa(const VehicleState& s0, const AttitudeCommand& cmd0,
                            const Gains& gains, const QuadParams& p) {
  return roa_from_errors(psi(s0.R, cmd0.R_d),
                         angular_velocity_error(s0.omega, s0.R, cmd0.R_d, cmd0.Omega_d), gains,
                         p);
}

GainCertificate certificate_matrices(const Gains& gains, const QuadParams& p, double psi1,
                                     double e_x_max, double B, double c1, double c2) {
  const double m = p.mass;
  const double kx = gains.k_x, kv = gains.k_v, kR = gains.k_R, kW = gains.k_Omega;
  const double jmin = p.min_inertia_eigenvalue();
  const double jmax = p.max_inertia_eigenvalue();
  const double alpha = std::sqrt(psi1 * (2.0 - psi1));

  GainCertificate c;
  c.c1 = c1;
  c.c2 = c2;
  c.psi1 = psi1;
  c.alpha = alpha;
  c.e_x_max = e_x_max;
  c.B = B;
  c.c1_bound = std::min({kv * (1.0 - alpha),
                         4.0 * m * kx * kv * (1.0 - alpha) * (1.0 - alpha) /
                             (kv * kv * (1.0 + alpha) * (1.0 + alpha) + 4.0 * m * kx * (1.0 - alpha)),
                         std::sqrt(kx * m)});
  c.c2_bound = std::min({kW, 4.0 * kW * kR * jmin * jmin / (kW * kW * jmax + 4.0 * kR * jmin * jmin),
                         std::sqrt(kR * jmin)});

  const double w1_off = -c1 * kv / (2.0 * m) * (1.0 + alpha);
  c.W1 << c1 * kx / m * (1.0 - alpha), w1_off, w1_off, kv * (1.0 - alpha) - c1;
  c.W12 << c1 / m * B, 0.0, B + kx * e_x_max, 0.0;
  const double w2_off = -c2 * kW / (2.0 * jmin);
  c.W2 << c2 * kR / jmax, w2_off, w2_off, kW - c2;
  c.M11 << 0.5 * kx, -0.5 * c1, -0.5 * c1, 0.5 * m;
  c.M12 << 0.5 * kx, 0.5 * c1, 0.5 * c1, 0.5 * m;
  c.M21 << 0.5 * kR, -0.5 * c2, -0.5 * c2, 0.5 * jmin;
  c.M22prime << kR / (2.0 - psi1), 0.5 * c2, 0.5 * c2, 0.5 * jmax;
  c.M22 = c.M22prime;

  const double w1_min = min_eigenvalue(c.W1);
  const double w12 = spectral_norm(c.W12);
  c.margin = w1_min > 0.0 ? min_eigenvalue(c.W2) - 4.0 * w12 * w12 / w1_min
                          : -std::numeric_limits<double>::infinity();
  c.feasible = c1 > 0.0 && c2 > 0.0 && c1 < c.c1_bound && c2 < c.c2_bound && c.margin > 0.0 &&
               positive_definite(c.W1) && positive_definite(c.W2) && positive_definite(c.M11) &&
               positive_definite(c.M12) && positive_definite(c.M21) &&
               positive_definite(c.M22prime);
  return c;
}

GainCertificate search_certificate(const Gains& gains, const QuadParams& p, double psi1,
                                   double e_x_max, double B) {
  if (!(psi1 > 0.0 && psi1 < 1.0)) {
    throw Error(ErrorKind::InfeasibleInputs, "psi1 must lie in (0, 1)");
  }
  if (!(e_x_max > 0.0)) throw Error(ErrorKind::InfeasibleInputs, "e_x_max must be positive");
  if (!(B > 0.0)) throw Error(ErrorKind::InfeasibleInputs, "B must be positive");

  const GainCertificate bounds = certificate_matrices(gains, p, psi1, e_x_max, B, 0.0, 0.0);
  constexpr int kGrid = 100;
  constexpr double kDecades = 4.0;
  auto grid = [&](double bound, int i) {
    // Strictly below the bound: 10^-4 .. 1 times (1 - 1e-6).
    return bound * std::pow(10.0, -kDecades + kDecades * i / (kGrid - 1)) * (1.0 - 1e-6);
  };

  GainCertificate best;
  bool have = false;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      GainCertificate c = certificate_matrices(gains, p, psi1, e_x_max, B,
                                               grid(bounds.c1_bound, i), grid(bounds.c2_bound, j));
      if (!have || c.margin > best.margin) {
        best = c;
        have = true;
      }
    }
  }
  return best;
}

bool coupled_roa_holds(const GainCertificate& cert, const Gains& gains, double ex_norm,
                       double ev_norm, double eR_norm, double eW_norm) {
  const double lhs = max_eigenvalue(cert.M12) * (ex_norm * ex_norm + ev_norm * ev_norm) +
                     max_eigenvalue(cert.M22prime) * (eR_norm * eR_norm + eW_norm * eW_norm);
  return lhs < 0.5 * gains.k_x * cert.e_x_max * cert.e_x_max;
}

EnvelopeFit fit_exponential_envelope(const std::vector<double>& t,
                                     const std::vector<double>& psi_series) {
  if (t.size() != psi_series.size()) {
    throw Error(ErrorKind::FitFailed, "time and psi series differ in length");
  }
  if (psi_series.size() < 3) throw Error(ErrorKind::FitFailed, "need at least 3 samples");
  for (double v : psi_series) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::FitFailed, "psi series must be positive and finite");
    }
  }
  const auto n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += std::log(psi_series[i]);
  }
  const double tm = st / n, ym = sy / n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (std::log(psi_series[i]) - ym);
  }
  if (!(stt > 0.0)) throw Error(ErrorKind::FitFailed, "time samples are degenerate");

  EnvelopeFit fit;
  fit.samples = t.size();
  fit.beta = -sty / stt;
  // Smallest alpha with psi <= alpha e^{-beta t} on every sample.
  double log_alpha = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    log_alpha = std::max(log_alpha, std::log(psi_series[i]) + fit.beta * t[i]);
  }
  fit.alpha = std::exp(log_alpha);
  fit.decaying = fit.beta > 1e-9;
  fit.bound_holds = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double env = std::min(2.0, fit.alpha * std::exp(-fit.beta * t[i]));
    if (psi_series[i] > env * (1.0 + 1e-6)) fit.bound_holds = false;
  }
  return fit;
}

double lyapunov_v2prime(const TraceRecord& r, const Gains& gains, const QuadParams& p) {
  return 0.5 * r.e_Omega.dot(p.inertia * r.e_Omega) + gains.k_R * r.psi;
}

double lyapunov_v(const TraceRecord& r, const Gains& gains, const QuadParams& p, double c1,
                  double c2) {
  const double v1 = 0.5 * gains.k_x * r.e_x.squaredNorm() + 0.5 * p.mass * r.e_v.squaredNorm() +
                    c1 * r.e_x.dot(r.e_v);
  return v1 + lyapunov_v2prime(r, gains, p) + c2 * r.e_R.dot(r.e_Omega);
}

double acceleration_bound(const FlightSegment& seg, const QuadParams& p) {
  const auto n = static_cast<long>(std::ceil((seg.t_end - seg.t_start) * 1000.0));
  double sup = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double t = std::min(seg.t_end, seg.t_start + static_cast<double>(i) * 1e-3);
    Vec3 accel = Vec3::Zero();
    const SegmentCommand cmd = command_at(seg, t);
    if (const auto* pc = std::get_if<PositionCommand>(&cmd)) accel = pc->d2x_d;
    if (const auto* vc = std::get_if<VelocityCommand>(&cmd)) accel = vc->dv_d;
    sup = std::max(sup, (-p.mass * p.gravity * kE3 + p.mass * accel).norm());
  }
  return 1.01 * sup;
}

namespace {

constexpr double kFitFloor = 1e-10;
// Psi is only as accurate as the orthogonality of the logged R.
constexpr double kPsiRoundoff = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Flags every sample where `series` rises by more than tol over its predecessor.
void flag_increases(const std::vector<double>& time, const std::vector<double>& series,
                    std::size_t begin, double tol, const std::string& name,
                    std::vector<Violation>& out) {
  for (std::size_t i = std::max<std::size_t>(begin, 1); i < series.size(); ++i) {
    if (i <= begin) continue;
    const double rise = series[i] - series[i - 1];
    if (rise > tol) {
      out.push_back({time[i], name + " increased", "rise " + fmt(rise) + " > " + fmt(tol)});
    }
  }
}

double default_psi1(double psi0) {
  if (psi0 >= 1.0) return 0.9;
  const double candidate = std::min(std::max(psi0 + 0.05, 0.9), 0.99);
  return candidate > psi0 ? candidate : 0.5 * (psi0 + 1.0);
}

void fit_envelope(SegmentReport& rep, std::size_t begin) {
  std::vector<double> t, y;
  for (std::size_t i = begin; i < rep.psi.size(); ++i) {
    if (!(rep.psi[i] > kFitFloor)) break;
    t.push_back(rep.time[i] - rep.t_start);
    y.push_back(rep.psi[i]);
  }
  if (t.size() < 3) return;
  rep.envelope = fit_exponential_envelope(t, y);
  if (!rep.envelope->decaying) {
    rep.violations.push_back({t.front() + rep.t_start, "psi envelope not decaying",
                              "fitted beta = " + fmt(rep.envelope->beta)});
  }
}

}  // namespace

SegmentReport lyapunov_series(const Mission& mission, std::size_t segment_index,
                              const Trace& records, const MonitorOptions& opts) {
  const FlightSegment& seg = mission.segments.at(segment_index);
  const Gains& g = mission.gains;
  const QuadParams& p = mission.params;

  SegmentReport rep;
  rep.index = segment_index;
  rep.mode = seg.mode();
  rep.t_start = seg.t_start;
  rep.t_end = seg.t_end;
  if (records.empty()) return rep;

  for (const TraceRecord& r : records) {
    rep.time.push_back(r.t);
    rep.psi.push_back(r.psi);
    rep.v2prime.push_back(lyapunov_v2prime(r, g, p));
  }
  const TraceRecord& first = records.front();
  rep.roa = roa_from_errors(first.psi, first.e_Omega, g, p);
  if (!rep.roa.inside) {
    rep.violations.push_back({first.t, "attitude region of attraction",
                              "psi0 = " + fmt(first.psi) +
                                  ", omega margin = " + fmt(rep.roa.omega_margin)});
  }
  rep.psi2 = rep.v2prime.front() / g.k_R;
  if (rep.psi2 > 2.0) {
    rep.psi2 = 2.0;
    rep.psi2_clamped = true;
  }

  const double v2max = *std::max_element(rep.v2prime.begin(), rep.v2prime.end());
  const double v2tol = opts.jitter * v2max;

  // k_R psi <= V2'(t) <= V2'(0) along the segment.
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (g.k_R * rep.psi[i] > rep.v2prime[i] + v2tol) {
      rep.violations.push_back({rep.time[i], "k_R psi <= V2'", ""});
    }
    if (rep.v2prime[i] > rep.v2prime.front() + v2tol) {
      rep.violations.push_back({rep.time[i], "V2' <= V2'(0)", ""});
    }
  }

  if (rep.mode == FlightMode::Attitude) {
    flag_increases(rep.time, rep.v2prime, 0, v2tol, "V2'", rep.violations);
    fit_envelope(rep, 0);
    return rep;
  }

  // Position / velocity mode: track psi until it enters {psi < psi1}, then
  // hand over to the coupled certificate.
  rep.psi1 = opts.psi1.value_or(default_psi1(first.psi));
  std::size_t star = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (rep.psi[i] < rep.psi1) {
      star = i;
      break;
    }
  }
  if (star < records.size()) rep.t_star = rep.time[star];

  // Before t*: V2' must not increase and the translational errors stay finite.
  std::vector<double> pre(rep.v2prime.begin(),
                          rep.v2prime.begin() + static_cast<std::ptrdiff_t>(std::min(star + 1, records.size())));
  flag_increases(rep.time, pre, 0, v2tol, "V2' (before t*)", rep.violations);
  for (std::size_t i = 0; i < star && i < records.size(); ++i) {
    if (!records[i].e_x.allFinite() || !records[i].e_v.allFinite()) {
      rep.violations.push_back({rep.time[i], "translational errors bounded before t*", ""});
      break;
    }
  }

  if (rep.mode == FlightMode::Position) {
    const double e_x_max = opts.e_x_max.value_or(2.0 * first.e_x.norm() + 1.0);
    const double B = acceleration_bound(seg, p);
    rep.certificate = search_certificate(g, p, rep.psi1, e_x_max, B);
    const GainCertificate& cert = *rep.certificate;
    for (const TraceRecord& r : records) rep.v.push_back(lyapunov_v(r, g, p, cert.c1, cert.c2));

    if (rep.t_star) {
      const TraceRecord& rs = records[star];
      rep.coupled_roa_at_t_star = coupled_roa_holds(cert, g, rs.e_x.norm(), rs.e_v.norm(),
                                                    rs.e_R.norm(), rs.e_Omega.norm());
      if (cert.feasible) {
        const double vmax = *std::max_element(rep.v.begin() + static_cast<std::ptrdiff_t>(star), rep.v.end());
        flag_increases(rep.time, rep.v, star, opts.jitter * vmax, "V (after t*)", rep.violations);
        for (std::size_t i = star; i < records.size(); ++i) {
          const TraceRecord& r = records[i];
          if (!(r.psi < rep.psi1)) continue;
          const Vec2 z1(r.e_x.norm(), r.e_v.norm());
          const Vec2 z2(r.e_R.norm(), r.e_Omega.norm());
          const double lo = z1.dot(cert.M11 * z1) + z2.dot(cert.M21 * z2);
          const double hi = z1.dot(cert.M12 * z1) + z2.dot(cert.M22prime * z2);
          const double slack =
              1e-9 * std::max(1.0, std::abs(rep.v[i])) + g.k_R * kPsiRoundoff;
          if (rep.v[i] < lo - slack || rep.v[i] > hi + slack) {
            rep.violations.push_back({r.t, "V sandwich bounds", ""});
          }
        }
      }
    }
  }
  if (rep.t_star) fit_envelope(rep, star);
  return rep;
}

double max_error_rate_excess(const Trace& trace) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const TraceRecord& a = trace[i - 1];
    const TraceRecord& b = trace[i + 1];
    if (a.segment != trace[i].segment || b.segment != trace[i].segment) continue;
    const double rate = ((b.e_R - a.e_R) / (b.t - a.t)).norm();
    worst = std::max(worst, rate - trace[i].e_Omega.norm());
  }
  return worst;
}

double max_psi_rate_residual(const Trace& trace) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const TraceRecord& a = trace[i - 1];
    const TraceRecord& b = trace[i + 1];
    if (a.segment != trace[i].segment || b.segment != trace[i].segment) continue;
    const double rate = (b.psi - a.psi) / (b.t - a.t);
    worst = std::max(worst, std::abs(rate - trace[i].e_R.dot(trace[i].e_Omega)));
  }
  return worst;
}

std::size_t MonitorReport::violation_count() const {
  std::size_t n = 0;
  for (const SegmentReport& s : segments) n += s.violations.size();
  return n;
}

MonitorReport analyze(const Mission& mission, const Trace& trace, const MonitorOptions& opts) {
  MonitorReport report;
  std::size_t i = 0;
  while (i < trace.size()) {
    std::size_t j = i;
    while (j < trace.size() && trace[j].segment == trace[i].segment) ++j;
    const Trace records(trace.begin() + static_cast<std::ptrdiff_t>(i),
                        trace.begin() + static_cast<std::ptrdiff_t>(j));
    report.segments.push_back(lyapunov_series(mission, trace[i].segment, records, opts));
    i = j;
  }
  return report;
}

}  // namespace geoquad
