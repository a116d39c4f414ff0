#include "geoquad/mission.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "geoquad/error.hpp"

namespace geoquad {

double Signal::derivative(double t, int order) const {
  double acc = 0.0;
  // Horner over the differentiated coefficients.
  for (int k = static_cast<int>(poly.size()) - 1; k >= order; --k) {
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
    acc = acc * t + poly[static_cast<std::size_t>(k)] * falling;
  }
  for (const Sinusoid& s : sines) {
    const double shift = order * std::numbers::pi / 2.0;
    acc += s.amplitude * std::pow(s.omega, order) * std::sin(s.omega * t + s.phase + shift);
  }
  return acc;
}

Trajectory3 Trajectory3::constant(const Vec3& c) {
  return {Signal::constant(c.x()), Signal::constant(c.y()), Signal::constant(c.z())};
}

Vec3 Trajectory3::derivative(double t, int order) const {
  return {x.derivative(t, order), y.derivative(t, order), z.derivative(t, order)};
}

std::string_view to_string(FlightMode mode) {
  switch (mode) {
    case FlightMode::Attitude: return "attitude";
    case FlightMode::Position: return "position";
    case FlightMode::Velocity: return "velocity";
  }
  return "unknown";
}

FlightMode FlightSegment::mode() const {
  return static_cast<FlightMode>(spec.index());
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

SegmentCommand command_at(const FlightSegment& seg, double t) {
  return std::visit(
      Overloaded{
          [t](const AttitudeSegment& a) -> SegmentCommand {
            const RotationProfile& prof = a.attitude;
            AttitudeModeCommand cmd;
            cmd.attitude.R_d = prof.R0 * exp_so3(prof.body_rate * (t - prof.t0));
            cmd.attitude.Omega_d = prof.body_rate;
            cmd.attitude.dOmega_d = Vec3::Zero();
            if (const auto* alt = std::get_if<AltitudeTracking>(&a.thrust)) {
              cmd.thrust = AltitudeTarget{alt->x3d.derivative(t, 0), alt->x3d.derivative(t, 1),
                                          alt->x3d.derivative(t, 2)};
            } else {
              cmd.thrust = std::get<PositionHold>(a.thrust);
            }
            return cmd;
          },
          [t](const PositionSegment& p) -> SegmentCommand {
            PositionCommand cmd;
            cmd.x_d = p.x_d.derivative(t, 0);
            cmd.dx_d = p.x_d.derivative(t, 1);
            cmd.d2x_d = p.x_d.derivative(t, 2);
            cmd.d3x_d = p.x_d.derivative(t, 3);
            cmd.d4x_d = p.x_d.derivative(t, 4);
            cmd.b1d = p.b1d;
            return cmd;
          },
          [t](const VelocitySegment& v) -> SegmentCommand {
            VelocityCommand cmd;
            cmd.v_d = v.v_d.derivative(t, 0);
            cmd.dv_d = v.v_d.derivative(t, 1);
            cmd.d2v_d = v.v_d.derivative(t, 2);
            cmd.d3v_d = v.v_d.derivative(t, 3);
            cmd.b1d = v.b1d;
            return cmd;
          },
      },
      seg.spec);
}

SegmentCommand evaluate_command(const FlightSegment& seg, double t) {
  if (!(t >= seg.t_start - kWindowTol && t <= seg.t_end + kWindowTol)) {
    std::ostringstream os;
    os << "t = " << t << " outside segment window [" << seg.t_start << ", " << seg.t_end << "]";
    throw Error(ErrorKind::OutOfWindow, os.str());
  }
  return command_at(seg, t);
}

std::size_t Mission::segment_index_at(double t) const {
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    if (t < segments[i].t_end) return i;
  }
  return segments.empty() ? 0 : segments.size() - 1;
}

void Mission::validate() const {
  params.validate();
  gains.validate();
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ValidationError, what); };
  double expected_start = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const FlightSegment& s = segments[i];
    const std::string tag = "segment " + std::to_string(i) + ": ";
    if (!(s.t_end > s.t_start)) fail(tag + "t_end must exceed t_start");
    if (s.t_start != expected_start) fail(tag + "segments must be contiguous starting at 0");
    expected_start = s.t_end;
    const Vec3* b1d = nullptr;
    if (const auto* p = std::get_if<PositionSegment>(&s.spec)) b1d = &p->b1d;
    if (const auto* v = std::get_if<VelocitySegment>(&s.spec)) b1d = &v->b1d;
    if (b1d && std::abs(b1d->norm() - 1.0) > 1e-9) fail(tag + "b1d must be a unit vector");
  }
  if (!initial_state.x.allFinite() || !initial_state.v.allFinite() ||
      !initial_state.omega.allFinite()) {
    fail("initial state must be finite");
  }
  // Re-run the rotation check on the stored attitude.
  try {
    Rotation check(initial_state.R.matrix());
  } catch (const Error& e) {
    fail(std::string("initial attitude: ") + e.what());
  }
}

QuadParams reference_params() {
  QuadParams p;
  p.mass = 4.34;
  p.inertia = Vec3(0.0820, 0.0845, 0.1377).asDiagonal();
  p.arm_length = 0.315;
  p.c_tau_f = 8.004e-3;
  p.gravity = kDefaultGravity;
  return p;
}

Gains reference_gains(const QuadParams& p) {
  return {16.0 * p.mass, 5.6 * p.mass, 8.81, 2.54};
}

Rotation reference_initial_attitude() {
  Mat3 r0;
  // clang-format off
  r0 << 1.0,     0.0,     0.0,
        0.0, -0.9995, -0.0314,
        0.0,  0.0314, -0.9995;
  // clang-format on
  return orthonormalize(r0);
}

Mission build_case1() {
  Mission m;
  m.name = "case1";
  m.params = reference_params();
  m.gains = reference_gains(m.params);
  m.initial_state.R = reference_initial_attitude();
  m.segments.push_back({0.0, 10.0, PositionSegment{Trajectory3::constant(Vec3::Zero()), kE1}});
  return m;
}

Mission build_case2() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Mission m;
  m.name = "case2";
  m.params = reference_params();
  m.gains = reference_gains(m.params);
  m.initial_state.R = reference_initial_attitude();

  // (a) v_d = [1 + 0.5 t, 0.2 sin(2 pi t), -0.1]
  Trajectory3 v_d{{{1.0, 0.5}, {}}, {{}, {{0.2, two_pi, 0.0}}}, Signal::constant(-0.1)};
  m.segments.push_back({0.0, 4.0, VelocitySegment{v_d, kE1}});

  // (b) two full turns about e2 while loitering near (8, 0, 0)
  m.segments.push_back(
      {4.0, 6.0, AttitudeSegment{{Rotation::identity(), two_pi * kE2, 4.0}, PositionHold{{8, 0, 0}}}});

  // (c) x_d = [14 - t, 0, 0]
  Trajectory3 x_c{{{14.0, -1.0}, {}}, Signal::constant(0.0), Signal::constant(0.0)};
  m.segments.push_back({6.0, 8.0, PositionSegment{x_c, kE1}});

  // (d) one full turn about e1 while loitering near (6, 0, 0)
  m.segments.push_back(
      {8.0, 9.0, AttitudeSegment{{Rotation::identity(), two_pi * kE1, 8.0}, PositionHold{{6, 0, 0}}}});

  // (e) x_d = [20 - 5t/3, 0, 0], heading e2
  Trajectory3 x_e{{{20.0, -5.0 / 3.0}, {}}, Signal::constant(0.0), Signal::constant(0.0)};
  m.segments.push_back({9.0, 12.0, PositionSegment{x_e, kE2}});
  return m;
}

}  // namespace geoquad
