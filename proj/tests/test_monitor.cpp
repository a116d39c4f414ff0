#include <doctest.h>

#include <cmath>

#include "geoquad/monitor.hpp"
#include "geoquad/sim.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace geoquad;

namespace {

QuadParams unit_params() {
  QuadParams p;
  p.mass = 1.0;
  p.inertia = Mat3::Identity();
  p.arm_length = 0.2;
  p.c_tau_f = 0.01;
  p.gravity = 9.81;
  return p;
}

/// Stiff attitude loop on a unit vehicle; the coupled certificate is feasible.
Mission stiff_hover(const Vec3& x0) {
  Mission m;
  m.name = "stiff";
  m.params = unit_params();
  m.gains = {4.0, 4.0, 1e4, 1e3};
  m.segments.push_back({0.0, 4.0, PositionSegment{Trajectory3::constant(Vec3::Zero()), kE1}});
  m.initial_state.x = x0;
  // R_c depends only on the errors; Omega_c also depends on R, so evaluate twice.
  for (int pass = 0; pass < 2; ++pass) {
    const ComputedAttitude ca = compute_attitude_setpoint(m.initial_state, PositionCommand{},
                                                          m.gains, m.params, std::nullopt);
    m.initial_state.R = ca.R_c;
    m.initial_state.omega = ca.Omega_c;
  }
  return m;
}

bool has_violation(const SegmentReport& r, const std::string& condition) {
  for (const auto& v : r.violations) {
    if (v.condition == condition) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("monitor") {

TEST_CASE("closed-form eigenvalues match the characteristic polynomial") {
  oracle::Rng rng(61);
  for (int i = 0; i < 1000; ++i) {
    Mat2 m;
    const double off = rng.uniform(-5, 5);
    m << rng.uniform(-5, 5), off, off, rng.uniform(-5, 5);
    const Vec2 e = symmetric_eigenvalues(m);
    const Eigen::Vector2d ref = oracle::eig2(m);
    CHECK(std::abs(e(0) - ref(0)) < 1e-12 * std::max(1.0, std::abs(ref(0))));
    CHECK(std::abs(e(1) - ref(1)) < 1e-12 * std::max(1.0, std::abs(ref(1))));
    CHECK(min_eigenvalue(m) == e(0));
    CHECK(max_eigenvalue(m) == e(1));
  }
}

TEST_CASE("spectral norm matches the largest singular value") {
  oracle::Rng rng(62);
  for (int i = 0; i < 500; ++i) {
    Mat2 m;
    m << rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3);
    Eigen::JacobiSVD<Mat2> svd(m);
    CHECK(std::abs(spectral_norm(m) - svd.singularValues()(0)) < 1e-12);
  }
}

TEST_CASE("attitude region of attraction examples") {
  const QuadParams p = reference_params();
  const Gains g = reference_gains(p);
  VehicleState rest;
  AttitudeCommand at_rest{rest.R, Vec3::Zero(), Vec3::Zero()};
  RoaCheck r = check_attitude_roa(rest, at_rest, g, p);
  CHECK(r.inside);
  CHECK(r.psi_margin == 2.0);
  CHECK(r.omega_margin == doctest::Approx(2.0 / 0.1377 * g.k_R * 2.0));

  const Mission m1 = build_case1();
  const ComputedAttitude ca =
      compute_attitude_setpoint(m1.initial_state, PositionCommand{}, g, p, std::nullopt);
  r = check_attitude_roa(m1.initial_state, {ca.R_c, ca.Omega_c, ca.dOmega_c}, g, p);
  CHECK(r.inside);
  CHECK(std::abs(r.psi0 - 1.995) <= 0.005);

  VehicleState flipped;
  flipped.R = exp_so3({std::numbers::pi, 0, 0});
  r = check_attitude_roa(flipped, at_rest, g, p);
  CHECK_FALSE(r.inside);
}

TEST_CASE("certificate regression fixture for the reference gains") {
  const Mission m = build_case1();
  const double B = acceleration_bound(m.segments[0], m.params);
  CHECK(B == doctest::Approx(43.001154).epsilon(1e-9));
  const GainCertificate c = search_certificate(m.gains, m.params, 0.9, 1.0, B);
  CHECK(c.c1 == doctest::Approx(0.00016284613845440267).epsilon(1e-12));
  CHECK(c.c2 == doctest::Approx(0.05734776753616086).epsilon(1e-12));
  CHECK_FALSE(c.feasible);
  CHECK(c.margin < 0.0);
  CHECK(c.alpha == doctest::Approx(std::sqrt(0.9 * 1.1)));
}

TEST_CASE("returned constants respect their admissible bounds") {
  const QuadParams p = reference_params();
  const Gains g = reference_gains(p);
  const GainCertificate c = search_certificate(g, p, 0.5, 2.0, 50.0);
  const double jmin = 0.0820, jmax = 0.1377;
  const double c2_bound =
      std::min({g.k_Omega,
                4 * g.k_Omega * g.k_R * jmin * jmin / (g.k_Omega * g.k_Omega * jmax + 4 * g.k_R * jmin * jmin),
                std::sqrt(g.k_R * jmin)});
  CHECK(c.c2 > 0.0);
  CHECK(c.c2 < c2_bound);
  CHECK(c.c1 > 0.0);
  CHECK(c.c1 < c.c1_bound);
}

TEST_CASE("vanishing attitude gain is infeasible") {
  const QuadParams p = unit_params();
  CHECK(search_certificate({1, 1, 1e4, 1e4}, p, 0.01, 1.0, 1.01 * 9.81).feasible);
  CHECK_FALSE(search_certificate({1, 1, 1e-12, 1e4}, p, 0.01, 1.0, 1.01 * 9.81).feasible);
}

TEST_CASE("feasible certificate") {
  const GainCertificate c = search_certificate({4, 4, 1e4, 1e3}, unit_params(), 0.01, 1.0, 1.01 * 9.81);
  CHECK(c.feasible);
  CHECK(c.margin > 0.0);
  CHECK(min_eigenvalue(c.W2) > 4 * std::pow(spectral_norm(c.W12), 2) / min_eigenvalue(c.W1));
  for (const Mat2* m : {&c.W1, &c.W2, &c.M11, &c.M12, &c.M21, &c.M22prime}) {
    CHECK(min_eigenvalue(*m) > 0.0);
  }
}

TEST_CASE("search rejects bad inputs") {
  const QuadParams p = reference_params();
  const Gains g = reference_gains(p);
  CHECK(kind_of([&] { search_certificate(g, p, 0.0, 1.0, 1.0); }) == ErrorKind::InfeasibleInputs);
  CHECK(kind_of([&] { search_certificate(g, p, 1.0, 1.0, 1.0); }) == ErrorKind::InfeasibleInputs);
  CHECK(kind_of([&] { search_certificate(g, p, 0.5, 0.0, 1.0); }) == ErrorKind::InfeasibleInputs);
  CHECK(kind_of([&] { search_certificate(g, p, 0.5, -1.0, 1.0); }) == ErrorKind::InfeasibleInputs);
}

TEST_CASE("exponential envelope fit") {
  std::vector<double> t, y;
  for (int i = 0; i < 200; ++i) {
    t.push_back(0.01 * i);
    y.push_back(1.7 * std::exp(-2.3 * t.back()));
  }
  EnvelopeFit f = fit_exponential_envelope(t, y);
  CHECK(f.alpha == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(f.beta == doctest::Approx(2.3).epsilon(1e-6));
  CHECK(f.decaying);
  CHECK(f.bound_holds);
  CHECK(f.samples == 200);

  const std::vector<double> flat(50, 2.0);
  std::vector<double> tf(50);
  for (int i = 0; i < 50; ++i) tf[i] = i;
  f = fit_exponential_envelope(tf, flat);
  CHECK_FALSE(f.decaying);

  CHECK(kind_of([] { fit_exponential_envelope({0, 1, 2}, {1.0, 0.0, 0.5}); }) ==
        ErrorKind::FitFailed);
  CHECK(kind_of([] { fit_exponential_envelope({0, 1}, {1.0, 0.5}); }) == ErrorKind::FitFailed);
  CHECK(kind_of([] { fit_exponential_envelope({0, 1, 2}, {1.0, 0.5}); }) == ErrorKind::FitFailed);
}

TEST_CASE("envelope bound holds on noisy decays") {
  oracle::Rng rng(63);
  std::vector<double> t, y;
  for (int i = 0; i < 300; ++i) {
    t.push_back(0.01 * i);
    y.push_back(0.8 * std::exp(-1.5 * t.back()) * (1.0 + 0.2 * rng.uniform(-1, 1)));
  }
  const EnvelopeFit f = fit_exponential_envelope(t, y);
  CHECK(f.bound_holds);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(y[i] <= std::min(2.0, f.alpha * std::exp(-f.beta * t[i])) * (1 + 1e-6));
  }
}

TEST_CASE("Lyapunov values on a perfect-tracking trace are zero") {
  const Mission m = build_case1();
  Trace trace(20);
  for (int i = 0; i < 20; ++i) trace[i].t = 0.1 * i;
  const SegmentReport r = lyapunov_series(m, 0, trace, {0.5, 1.0, 1e-9});
  for (double v : r.v2prime) CHECK(v == 0.0);
  for (double v : r.v) CHECK(v == 0.0);
  for (double v : r.psi) CHECK(v == 0.0);
  CHECK(r.violations.empty());
  CHECK(r.t_star == 0.0);
}

TEST_CASE("Lyapunov value formulas") {
  const QuadParams p = reference_params();
  const Gains g = reference_gains(p);
  TraceRecord r;
  r.psi = 0.3;
  r.e_Omega = Vec3(0.1, -0.2, 0.3);
  r.e_R = Vec3(0.2, 0.1, 0.0);
  r.e_x = Vec3(1, 0, 0);
  r.e_v = Vec3(0, 2, 0);
  const double v2p = 0.5 * r.e_Omega.dot(p.inertia * r.e_Omega) + g.k_R * 0.3;
  CHECK(lyapunov_v2prime(r, g, p) == doctest::Approx(v2p).epsilon(1e-15));
  const double v = 0.5 * g.k_x + 0.5 * p.mass * 4.0 + 0.0 + v2p + 0.05 * r.e_R.dot(r.e_Omega);
  CHECK(lyapunov_v(r, g, p, 0.7, 0.05) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("case1 monitor report") {
  const SimResult r = run(build_case1(), SimConfig{});
  REQUIRE(r.report.segments.size() == 1);
  const SegmentReport& s = r.report.segments[0];
  CHECK(s.roa.inside);
  CHECK(s.psi1 == 0.9);
  REQUIRE(s.t_star.has_value());
  CHECK(*s.t_star == doctest::Approx(1.32).epsilon(1e-9));
  REQUIRE(s.envelope.has_value());
  CHECK(s.envelope->beta > 0.0);
  CHECK(s.envelope->bound_holds);
  CHECK(s.psi.size() == r.trace.size());
  CHECK(s.v2prime.size() == r.trace.size());
  CHECK(s.v.size() == r.trace.size());
  CHECK_FALSE(has_violation(s, "k_R psi <= V2'"));
  CHECK_FALSE(has_violation(s, "V2' <= V2'(0)"));
  CHECK_FALSE(has_violation(s, "V2' (before t*) increased"));
}

TEST_CASE("case2 report has one entry per segment") {
  const SimResult r = run(build_case2(), SimConfig{});
  REQUIRE(r.report.segments.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r.report.segments[i].index == i);
  CHECK(r.report.segments[1].mode == FlightMode::Attitude);
  CHECK_FALSE(r.report.segments[1].t_star.has_value());
  CHECK(r.report.segments[4].certificate.has_value());
  for (const auto& s : r.report.segments) {
    if (s.envelope) CHECK(s.envelope->decaying);
  }
}

TEST_CASE("feasible certificate along a closed-loop run: V decreases and is sandwiched") {
  const Mission m = stiff_hover({0.3, -0.2, 0.1});
  SimConfig c;
  c.log_decimation = 1;
  const SimResult r = run_trace(m, c);
  REQUIRE_FALSE(r.aborted);
  const SegmentReport s = lyapunov_series(m, 0, r.trace, {0.01, 1.0, 1e-9});
  REQUIRE(s.certificate.has_value());
  CHECK(s.certificate->feasible);
  REQUIRE(s.t_star.has_value());
  CHECK(*s.t_star == 0.0);
  CHECK(s.coupled_roa_at_t_star == true);
  CHECK(s.violations.empty());
  CHECK(s.v.back() < 1e-3 * s.v.front());
}

TEST_CASE("violations are flagged with timestamps") {
  const Mission m = build_case1();
  Trace trace(5);
  for (int i = 0; i < 5; ++i) {
    trace[i].t = 0.1 * i;
    trace[i].psi = 0.5;
    trace[i].e_Omega = Vec3(0.1 * i, 0, 0);
  }
  const SegmentReport r = lyapunov_series(m, 0, trace, {0.9, 1.0, 1e-9});
  CHECK(has_violation(r, "V2' <= V2'(0)"));

  Mission att = build_case2();
  Trace rising(4);
  for (int i = 0; i < 4; ++i) {
    rising[i].t = 4.0 + 0.1 * i;
    rising[i].mode = FlightMode::Attitude;
    rising[i].segment = 1;
    rising[i].psi = 0.1 + 0.1 * i;
  }
  const SegmentReport a = lyapunov_series(att, 1, rising);
  REQUIRE(has_violation(a, "V2' increased"));
  CHECK(a.violations.front().t > 4.0);
}

TEST_CASE("psi2 is clamped to 2") {
  const Mission m = build_case2();
  Trace trace(3);
  for (int i = 0; i < 3; ++i) {
    trace[i].t = 4.0 + 0.1 * i;
    trace[i].psi = 1.5;
    trace[i].e_Omega = Vec3(20, 0, 0);
  }
  const SegmentReport r = lyapunov_series(m, 1, trace);
  CHECK(r.psi2 == 2.0);
  CHECK(r.psi2_clamped);
  CHECK_FALSE(r.roa.inside);
  CHECK(has_violation(r, "attitude region of attraction"));
}

TEST_CASE("analyze groups records by segment") {
  const Mission m = build_case2();
  Trace trace;
  for (std::size_t seg : {0, 0, 0, 2, 2, 2}) {
    TraceRecord r;
    r.segment = seg;
    r.t = m.segments[seg].t_start + 0.1 * static_cast<double>(trace.size());
    r.mode = m.segments[seg].mode();
    trace.push_back(r);
  }
  const MonitorReport rep = analyze(m, trace);
  REQUIRE(rep.segments.size() == 2);
  CHECK(rep.segments[0].index == 0);
  CHECK(rep.segments[1].index == 2);
  CHECK(rep.segments[1].time.size() == 3);
}

}  // TEST_SUITE
