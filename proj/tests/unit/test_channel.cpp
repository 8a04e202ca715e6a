// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "netsim/channel/fading.hpp"
#include "netsim/channel/large_scale.hpp"
#include "netsim/error.hpp"
#include "netsim/random.hpp"

using namespace netsim;
using namespace netsim::channel;

namespace {

Site north_site(double height = 25.0) {
  Site s;
  s.site_id = 1;
  s.position = {500.0, 500.0};
  s.antenna_height_m = height;
  s.beams = {BeamConfig{}};
  return s;
}

Scenario flat_scenario() {
  Scenario sc;
  sc.grid = GeoGrid({0.0, 0.0}, 1000.0, 1000.0, 10.0);
  Site a = north_site();
  a.beams = {BeamConfig{0}, BeamConfig{1, 30.0, 6.0, 40.0, 4.0, true, 17.0}};
  Site b = north_site();
  b.site_id = 2;
  b.position = {200.0, 800.0};
  b.mechanical_azimuth_deg = 120.0;
  b.mechanical_downtilt_deg = 3.0;
  sc.sites = {a, b};
  return sc;
}

}  // namespace

TEST_CASE("relative angles follow the compass convention") {
  Site site = north_site(1.5);
  BeamConfig beam;
  Point3 antenna{500.0, 500.0, 1.5};
  auto a = relative_angles(site, beam, antenna, {500.0, 600.0, 1.5});
  CHECK(a.azimuth_deg == 0.0);
  CHECK(a.elevation_deg == 0.0);
  CHECK(relative_angles(site, beam, antenna, {600.0, 500.0, 1.5}).azimuth_deg == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(relative_angles(site, beam, antenna, {400.0, 500.0, 1.5}).azimuth_deg == doctest::Approx(-90.0).epsilon(1e-12));
  CHECK(relative_angles(site, beam, antenna, {500.0, 400.0, 1.5}).azimuth_deg == 180.0);

  auto e = relative_angles(site, beam, {0.0, 0.0, 30.0}, {0.0, 30.0, 0.0});
  CHECK(std::abs(e.elevation_deg + 45.0) < 1e-12);

  // Downtilt points the boresight below the horizon.
  site.mechanical_downtilt_deg = 5.0;
  beam.tilt_deg = 40.0;
  CHECK(std::abs(relative_angles(site, beam, {0.0, 0.0, 30.0}, {0.0, 30.0, 0.0}).elevation_deg) < 1e-12);

  // Coincident points are clamped to 1 m horizontal distance.
  auto c = relative_angles(north_site(), BeamConfig{}, {1.0, 1.0, 25.0}, {1.0, 1.0, 24.0});
  CHECK(std::abs(c.elevation_deg + 45.0) < 1e-12);

  CHECK(normalize_angle_deg(-180.0) == 180.0);
  CHECK(normalize_angle_deg(540.0) == 180.0);
  CHECK(normalize_angle_deg(-190.0) == 170.0);
}

TEST_CASE("antenna pattern peak, 3 dB point and floor") {
  BeamConfig beam;
  CHECK(antenna_gain_dbi(beam, {0.0, 0.0}) == 17.0);
  CHECK(antenna_gain_dbi(beam, {beam.h_beamwidth_deg / 2.0, 0.0}) == 14.0);
  CHECK(antenna_gain_dbi(beam, {0.0, beam.v_beamwidth_deg / 2.0}) == 14.0);
  CHECK(antenna_gain_dbi(beam, {170.0, 80.0}) == 17.0 - 30.0);
  beam.active = false;
  CHECK(antenna_gain_dbi(beam, {0.0, 0.0}) == kInactiveGainDb);
}

TEST_CASE("antenna pattern symmetry and bounds over random angles") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    BeamConfig beam;
    beam.h_beamwidth_deg = kHBeamwidthsDeg[rng.index(kHBeamwidthsDeg.size())];
    beam.v_beamwidth_deg = kVBeamwidthsDeg[rng.index(kVBeamwidthsDeg.size())];
    double az = rng.uniform(-180.0, 180.0);
    double el = rng.uniform(-90.0, 90.0);
    double g = antenna_gain_dbi(beam, {az, el});
    CHECK(std::abs(g - antenna_gain_dbi(beam, {-az, el})) <= 1e-9);
    CHECK(std::abs(g - antenna_gain_dbi(beam, {az, -el})) <= 1e-9);
    CHECK(g <= beam.g_max_dbi);
    CHECK(g >= beam.g_max_dbi - 30.0 - 1e-9);
  }
}

TEST_CASE("narrower horizontal beams attenuate more off axis") {
  for (double az : {3.0, 10.0, 20.0}) {
    double previous = 1e9;
    for (double bw : kHBeamwidthsDeg) {
      BeamConfig beam;
      beam.h_beamwidth_deg = bw;
      double g = antenna_gain_dbi(beam, {az, 0.0});
      // Wider beam, higher gain at the same offset.
      if (previous < 1e9) CHECK(g > previous);
      previous = g;
    }
  }
}

TEST_CASE("path loss reference values") {
  CHECK(path_loss_db(1.0, 1.0, true) == doctest::Approx(32.4).epsilon(1e-15));
  CHECK(std::abs(path_loss_db(100.0, 3.5, true) - 85.281) < 1e-3);
  // At 10 m the NLOS branch already exceeds LOS; at 1 m the LOS floor applies.
  CHECK(std::abs(path_loss_db(10.0, 3.5, false) - (22.4 + 35.3 + 21.3 * std::log10(3.5))) < 1e-12);
  CHECK(path_loss_db(10.0, 3.5, false) > path_loss_db(10.0, 3.5, true));
  CHECK(path_loss_db(1.0, 3.5, false) == path_loss_db(1.0, 3.5, true));
  CHECK(path_loss_db(0.2, 3.5, true) == path_loss_db(1.0, 3.5, true));
  // Far enough out the raw NLOS branch dominates.
  CHECK(path_loss_db(500.0, 3.5, false) == doctest::Approx(22.4 + 35.3 * std::log10(500.0) + 21.3 * std::log10(3.5)));
}

TEST_CASE("path loss increases in distance and frequency") {
  for (bool los : {true, false}) {
    double prev = 0.0;
    for (double d = 1.5; d < 5000.0; d *= 1.1) {
      double v = path_loss_db(d, 3.5, los);
      CHECK(v > prev);
      prev = v;
    }
    prev = 0.0;
    for (double f = 0.7; f < 6.0; f += 0.1) {
      double v = path_loss_db(200.0, f, los);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("learned path loss approximates the empirical model") {
  auto learned = LearnedPathLoss::train(3);
  CHECK(learned.loss_trace().back() < learned.loss_trace().front());
  double worst = 0.0;
  for (double d : {20.0, 80.0, 300.0, 1200.0}) {
    for (double f : {1.8, 3.5}) {
      for (bool los : {true, false}) worst = std::max(worst, std::abs(learned.loss_db(d, f, los) - path_loss_db(d, f, los)));
    }
  }
  CHECK(worst < 4.0);
  CHECK(make_path_loss(PathLossKind::Learned, 3) == make_path_loss(PathLossKind::Learned, 3));
  CHECK(make_path_loss(PathLossKind::Empirical, 3)->name() == "empirical");
}

TEST_CASE("shadow field statistics") {
  GeoGrid grid({0.0, 0.0}, 3200.0, 3200.0, 10.0);
  ShadowField zero(grid, 1, 5, 0.0, 0.0, 50.0);
  CHECK(zero.at(123, true) == 0.0);
  CHECK(zero.at(123, false) == 0.0);

  ShadowField field(grid, 1, 5, 6.0, 6.0, 50.0);
  std::size_t n = grid.cell_count();
  REQUIRE(n >= 100000);
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += field.at(static_cast<CellToken>(i), true) / n;
  for (std::size_t i = 0; i < n; ++i) {
    double d = field.at(static_cast<CellToken>(i), true) - mean;
    var += d * d / n;
  }
  CHECK(std::abs(var - 36.0) <= 3.6);

  // Autocorrelation along rows at a lag of one decorrelation distance.
  std::size_t lag = 5;
  double cov = 0.0;
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c + lag < grid.cols(); ++c) {
      auto a = field.at(static_cast<CellToken>(r * grid.cols() + c), true) - mean;
      auto b = field.at(static_cast<CellToken>(r * grid.cols() + c + lag), true) - mean;
      cov += a * b;
      ++pairs;
    }
  }
  double rho = cov / pairs / var;
  CHECK(rho >= std::exp(-1.0) * 0.7);
  CHECK(rho <= std::exp(-1.0) * 1.3);

  ShadowField other_site(grid, 2, 5, 6.0, 6.0, 50.0);
  CHECK(other_site.unit() != field.unit());
  ShadowField split(grid, 1, 5, 4.0, 8.0, 50.0);
  CHECK(split.at(77, false) == doctest::Approx(2.0 * split.at(77, true)));
}

TEST_CASE("large-scale composition") {
  Scenario sc;
  sc.grid = GeoGrid({0.0, 0.0}, 100.0, 100.0, 10.0);
  Site site = north_site(sc.sim.ue_height_m);
  site.position = {50.0, 50.0};
  ShadowField none(sc.grid, 1, 1, 0.0, 0.0, 50.0);
  EmpiricalPathLoss pl;
  auto ls = large_scale(sc.grid, site, site.beams[0], {50.0, 51.0}, sc.sim.ue_height_m, none, pl);
  CHECK(ls.los);
  CHECK(std::abs(ls.coupling_loss_db - (32.4 + 20.0 * std::log10(3.5) - 17.0)) < 1e-12);

  site.beams[0].active = false;
  CHECK(large_scale(sc.grid, site, site.beams[0], {50.0, 51.0}, 1.5, none, pl).coupling_loss_db >= 250.0);

  Site tall = north_site();
  tall.position = {50.0, 0.0};
  GeoGrid big({0.0, 0.0}, 100.0, 400.0, 10.0);
  ShadowField flat(big, 1, 1, 0.0, 0.0, 50.0);
  // Same angles: the user moves along the boresight ray from the antenna.
  Site level = tall;
  level.antenna_height_m = 1.5;
  auto near = large_scale(big, level, level.beams[0], {50.0, 100.0}, 1.5, flat, pl);
  auto far = large_scale(big, level, level.beams[0], {50.0, 200.0}, 1.5, flat, pl);
  CHECK(near.antenna_gain_dbi == far.antenna_gain_dbi);
  CHECK(far.coupling_loss_db > near.coupling_loss_db);

  CHECK_THROWS_AS(large_scale(big, level, level.beams[0], {500.0, 200.0}, 1.5, flat, pl), Error);
}

TEST_CASE("terrain blocks line of sight") {
  std::vector<double> terrain(10 * 10, 0.0);
  for (std::size_t r = 0; r < 10; ++r) terrain[r * 10 + 5] = 60.0;
  GeoGrid grid({0.0, 0.0}, 100.0, 100.0, 10.0, terrain);
  Site site = north_site();
  site.position = {15.0, 50.0};
  ShadowField none(grid, 1, 1, 0.0, 0.0, 50.0);
  EmpiricalPathLoss pl;
  auto ls = large_scale(grid, site, site.beams[0], {85.0, 50.0}, 1.5, none, pl);
  CHECK_FALSE(ls.los);
  CHECK(ls.path_loss_db == path_loss_nlos_db(std::hypot(70.0, 23.5), 3.5));
}

TEST_CASE("small-scale fading") {
  CHECK(small_scale(1, 0, 3, 10, 4, true, 300.0) == std::complex<double>(1.0, 0.0));
  CHECK(small_scale(1, 0, 3, 10, 4, false, 10.0) == small_scale(1, 0, 3, 10, 4, false, 10.0));
  CHECK(small_scale(1, 0, 3, 10, 4, false, 10.0) != small_scale(1, 0, 3, 11, 4, false, 10.0));

  double rayleigh_power = 0.0, rician_power = 0.0;
  constexpr int n = 100000;
  for (int t = 0; t < n; ++t) {
    rayleigh_power += std::norm(small_scale(1, 2, 9, t, 42, false, 10.0)) / n;
    rician_power += std::norm(small_scale(1, 2, 9, t, 42, true, 10.0)) / n;
  }
  CHECK(rayleigh_power >= 0.99);
  CHECK(rayleigh_power <= 1.01);
  CHECK(std::abs(rician_power - 1.0) < 0.01);
}

TEST_CASE("channel matrix shape and recomposition") {
  Scenario sc = flat_scenario();
  sc.sim.shadow_sigma_los_db = 4.0;
  auto empty = channel_matrix(sc, {}, 0, 1);
  CHECK(empty.users == 0);
  CHECK(empty.rows() == 3);
  CHECK(empty.h.empty());

  std::vector<ChannelUser> users{{10, {520.0, 700.0}}, {11, {100.0, 100.0}}, {12, {900.0, 505.0}}};
  auto m = channel_matrix(sc, users, 7, 99);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.users == 3);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t u = 0; u < m.users; ++u) {
      const auto& ls = m.link(r, u);
      const auto& ref = m.beams[r];
      auto fading = small_scale(ref.site_id, ref.beam_id, users[u].id, 7, 99, ls.los, sc.sim.rician_k_db);
      double db = 10.0 * std::log10(std::norm(m.at(r, u)));
      CHECK(std::abs(db - (-ls.coupling_loss_db + 10.0 * std::log10(std::norm(fading)))) < 1e-9);
      CHECK(ls.coupling_loss_db == ls.path_loss_db + ls.shadow_db - ls.antenna_gain_dbi);
    }
  }
  CHECK(channel_matrix(sc, users, 7, 99) == m);

  sc.sites.resize(1);
  sc.sites[0].beams[1].active = false;
  auto one = channel_matrix(sc, {{1, {500.0, 600.0}}}, 0, 1);
  CHECK(std::abs(one.at(1, 0)) < 1e-12);
  CHECK(std::abs(one.at(0, 0)) > 1e-12);
}
