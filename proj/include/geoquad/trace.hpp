#pragma once

#include <cstddef>
#include <vector>

#include "geoquad/dynamics.hpp"
#include "geoquad/mission.hpp"

namespace geoquad {

/// One logged sample of a simulation run. Tracking errors are taken against
/// the active segment's reference: R_d in attitude mode, R_c otherwise.
/// Quantities a mode does not track are zero (e_x in velocity mode).
struct TraceRecord {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
  double f = 0.0;
  Vec3 M = Vec3::Zero();
  RotorThrusts rotor_thrusts{};
  FlightMode mode = FlightMode::Position;
  double psi = 0.0;
  Vec3 e_R = Vec3::Zero();
  Vec3 e_Omega = Vec3::Zero();
  Vec3 e_x = Vec3::Zero();
  Vec3 e_v = Vec3::Zero();
  /// Not serialized; index into Mission::segments.
  std::size_t segment = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

}  // namespace geoquad
