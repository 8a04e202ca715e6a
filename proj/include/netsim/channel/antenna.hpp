// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "netsim/scenario/geo.hpp"
#include "netsim/scenario/scenario.hpp"

namespace netsim::channel {

// Gain reported for an inactive beam.
inline constexpr double kInactiveGainDb = -250.0;
inline constexpr double kPatternFloorDb = 30.0;
inline constexpr double kMinLinkDistanceM = 1.0;

struct AnglePair {
  double azimuth_deg = 0.0;    // relative to boresight, (-180, 180]
  double elevation_deg = 0.0;  // relative to boresight; negative is below it
};

// Wraps to (-180, 180].
double normalize_angle_deg(double deg);
// Compass bearing from `from` to `to`: north 0, east +90.
double bearing_deg(Point from, Point to);

// Angles of `user` seen from the antenna at `antenna` (absolute heights).
// Horizontal distances under 1 m are treated as 1 m.
AnglePair relative_angles(const Site& site, const BeamConfig& beam, Point3 antenna, Point3 user);

// Parabolic-in-dB sector pattern with 30 dB floors per plane and overall.
double antenna_gain_dbi(const BeamConfig& beam, AnglePair angles);

}  // namespace netsim::channel
