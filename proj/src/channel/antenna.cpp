// SPDX-License-Identifier: Apache-2.0
#include "netsim/channel/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace netsim::channel {

namespace {
constexpr double kDeg = 180.0 / std::numbers::pi;
}

double normalize_angle_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

double bearing_deg(Point from, Point to) {
  return normalize_angle_deg(std::atan2(to.x - from.x, to.y - from.y) * kDeg);
}

AnglePair relative_angles(const Site& site, const BeamConfig& beam, Point3 antenna, Point3 user) {
  double horizontal = std::max(kMinLinkDistanceM, std::hypot(user.x - antenna.x, user.y - antenna.y));
  AnglePair a;
  a.azimuth_deg = normalize_angle_deg(bearing_deg({antenna.x, antenna.y}, {user.x, user.y}) -
                                      (site.mechanical_azimuth_deg + beam.azimuth_offset_deg));
  a.elevation_deg = std::atan2(user.z - antenna.z, horizontal) * kDeg + (site.mechanical_downtilt_deg + beam.tilt_deg);
  return a;
}

double antenna_gain_dbi(const BeamConfig& beam, AnglePair angles) {
  if (!beam.active) return kInactiveGainDb;
  double rh = angles.azimuth_deg / beam.h_beamwidth_deg;
  double rv = angles.elevation_deg / beam.v_beamwidth_deg;
  double a_h = -std::min(12.0 * rh * rh, kPatternFloorDb);
  double a_v = -std::min(12.0 * rv * rv, kPatternFloorDb);
  return beam.g_max_dbi - std::min(-(a_h + a_v), kPatternFloorDb);
}

}  // namespace netsim::channel
