#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"
#include "cfsim/rng.hpp"

using namespace cfsim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("torus distance wraps the short way") {
  CHECK(torus_distance({0, 0}, {499, 0}, 500) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(torus_distance({0, 0}, {250, 250}, 500) ==
        doctest::Approx(353.55339059327378).epsilon(1e-12));
  CHECK(torus_distance({123, 45}, {123, 45}, 500) == 0.0);

  RngStream s(11);
  bool symmetric = true, bounded = true;
  for (int i = 0; i < 500; ++i) {
    const Position p{s.uniform() * 500, s.uniform() * 500};
    const Position q{s.uniform() * 500, s.uniform() * 500};
    const double d = torus_distance(p, q, 500);
    symmetric = symmetric && d == torus_distance(q, p, 500);
    bounded = bounded && d <= 500 / std::numbers::sqrt2 + 1e-9;
  }
  CHECK(symmetric);
  CHECK(bounded);

  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(torus_distance({inf, 0}, {0, 0}, 500), std::invalid_argument);
  CHECK_THROWS_AS(torus_distance({0, 0}, {0, std::nan("")}, 500), std::invalid_argument);
}

TEST_CASE("torus direction follows the shortest wrap") {
  CHECK(torus_direction({0, 0}, {1, 0}, 500) == doctest::Approx(0.0));
  CHECK(torus_direction({0, 0}, {0, 1}, 500) == doctest::Approx(kPi / 2).epsilon(1e-12));
  // The short way to (499, 0) points in -x.
  CHECK(torus_direction({0, 0}, {499, 0}, 500) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(torus_direction({0, 0}, {0, 499}, 500) ==
        doctest::Approx(3 * kPi / 2).epsilon(1e-12));

  bool degenerate = false;
  CHECK(torus_direction({7, 9}, {7, 9}, 500, &degenerate) == 0.0);
  CHECK(degenerate);
  degenerate = true;
  torus_direction({0, 0}, {1, 0}, 500, &degenerate);
  CHECK_FALSE(degenerate);

  RngStream s(12);
  bool in_range = true;
  for (int i = 0; i < 500; ++i) {
    const double a = torus_direction({s.uniform() * 500, s.uniform() * 500},
                                     {s.uniform() * 500, s.uniform() * 500}, 500);
    in_range = in_range && a >= 0.0 && a < 2 * kPi;
  }
  CHECK(in_range);
}

TEST_CASE("pathloss and LSFC against frozen values") {
  CHECK(pathloss_db(1.0) == doctest::Approx(-30.5).epsilon(1e-14));
  CHECK(pathloss_db(100.0) == doctest::Approx(-103.9).epsilon(1e-14));

  // Below 10 m the distance is clamped before the fit is evaluated.
  CHECK(lsfc(1.0) == lsfc(10.0));
  CHECK(lsfc(9.999) == lsfc(10.0));
  CHECK(lsfc(10.0) == doctest::Approx(1.9054607179632443e-07).epsilon(1e-12));
  CHECK(lsfc(100.0) == doctest::Approx(4.0738027780411218e-11).epsilon(1e-12));
  CHECK(lsfc(353.5533905932738) == doctest::Approx(3.9552152733017757e-13).epsilon(1e-12));

  double prev = lsfc(0.1);
  bool monotone = true, positive = true;
  for (double d = 0.5; d < 1000; d += 0.5) {
    const double b = lsfc(d);
    monotone = monotone && b <= prev + 1e-30;
    positive = positive && b > 0.0 && std::isfinite(b);
    prev = b;
  }
  CHECK(monotone);
  CHECK(positive);
}

TEST_CASE("SNR calibration satisfies its defining identity") {
  SystemParams full;  // L=50, M=64, side=500
  const double snr_full = calibrate_snr(full);
  CHECK(snr_full == doctest::Approx(9440066561.2069607).epsilon(1e-12));
  const double d_l = 2.0 * std::sqrt(full.area_side * full.area_side / (kPi * full.num_rrh));
  CHECK(lsfc(3.0 * d_l) * full.antennas_per_rrh * snr_full ==
        doctest::Approx(1.0).epsilon(1e-12));

  SystemParams desk = full;
  desk.num_rrh = 20;
  desk.antennas_per_rrh = 32;
  CHECK(calibrate_snr(desk) == doctest::Approx(101443673611.42834).epsilon(1e-12));

  desk.snr = 7.5;
  CHECK(resolved_snr(desk) == 7.5);
  desk.snr = 0.0;
  CHECK(resolved_snr(desk) == calibrate_snr(desk));
}

TEST_CASE("layouts are uniform, deterministic and K-stable") {
  SystemParams p;
  p.num_rrh = 4;
  p.num_ue = 6;

  const Layout a = generate_layout(p, 99);
  const Layout b = generate_layout(p, 99);
  const Layout c = generate_layout(p, 100);
  REQUIRE(a.rrh_positions.size() == 4);
  REQUIRE(a.ue_positions.size() == 6);
  bool identical = true;
  for (int l = 0; l < 4; ++l) {
    identical = identical && a.rrh_positions[l].x == b.rrh_positions[l].x &&
                a.rrh_positions[l].y == b.rrh_positions[l].y;
  }
  CHECK(identical);
  CHECK(a.rrh_positions[0].x != c.rrh_positions[0].x);

  bool in_box = true;
  for (const Position& pos : a.ue_positions) {
    in_box = in_box && pos.x >= 0 && pos.x < p.area_side && pos.y >= 0 && pos.y < p.area_side;
  }
  CHECK(in_box);

  // Growing K extends the UE list without moving anyone.
  SystemParams grown = p;
  grown.num_ue = 9;
  const Layout g = generate_layout(grown, 99);
  bool prefix = true;
  for (int k = 0; k < 6; ++k) {
    prefix = prefix && g.ue_positions[k].x == a.ue_positions[k].x &&
             g.ue_positions[k].y == a.ue_positions[k].y;
  }
  CHECK(prefix);
  bool rrh_same = true;
  for (int l = 0; l < 4; ++l) {
    rrh_same = rrh_same && g.rrh_positions[l].x == a.rrh_positions[l].x;
  }
  CHECK(rrh_same);

  // Coordinates are uniform on [0, side): the empirical mean over 1e5
  // samples must sit within 1% of side/2.
  SystemParams big = p;
  big.num_rrh = 2;
  big.num_ue = 100000;
  const Layout u = generate_layout(big, 1);
  double mean_x = 0.0, mean_y = 0.0;
  for (const Position& pos : u.ue_positions) {
    mean_x += pos.x;
    mean_y += pos.y;
  }
  mean_x /= big.num_ue;
  mean_y /= big.num_ue;
  CHECK(mean_x == doctest::Approx(250.0).epsilon(0.01));
  CHECK(mean_y == doctest::Approx(250.0).epsilon(0.01));
}

TEST_CASE("LSFC matrix matches the pairwise definition") {
  SystemParams p;
  p.num_rrh = 5;
  p.num_ue = 7;
  const Layout layout = generate_layout(p, 3);
  const LsfcMatrix lsfc_mat = compute_lsfc_matrix(layout, p);
  REQUIRE(lsfc_mat.beta.rows() == 5);
  REQUIRE(lsfc_mat.beta.cols() == 7);
  bool match = true, positive = true;
  for (int l = 0; l < 5; ++l) {
    for (int k = 0; k < 7; ++k) {
      const double d = torus_distance(layout.rrh_positions[static_cast<std::size_t>(l)],
                                      layout.ue_positions[static_cast<std::size_t>(k)],
                                      p.area_side);
      match = match && lsfc_mat.beta(l, k) == lsfc(d);
      positive = positive && lsfc_mat.beta(l, k) > 0.0;
    }
  }
  CHECK(match);
  CHECK(positive);
}

TEST_CASE("parameter validation rejects bad scenarios") {
  SystemParams p;
  CHECK_NOTHROW(validate(p));
  SystemParams bad = p;
  bad.pilot_dim = bad.coherence_block + 1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.num_rrh = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.angular_spread = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.angular_spread = 2 * kPi + 1e-9;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.qos_threshold = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.snr = -2.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.area_side = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.shadowing = true;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
