#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "lpmsim/error.hpp"
#include "lpmsim/sensing.hpp"

using namespace lpmsim;
using std::numbers::pi;

namespace {

// Element (m, n), one-based, written out directly.
std::complex<double> steering_element(double phi, double theta, int M, int N, int m, int n) {
  const double arg = -pi * std::sin(theta) * ((m - 1) * std::cos(phi) + (n - 1) * std::sin(phi));
  return std::polar(1.0 / std::sqrt(static_cast<double>(M * N)), arg);
}

BuildingPrism box(double x0, double x1, double y0, double y1, double h) {
  return {{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)}, h};
}

}  // namespace

TEST_CASE("geometry observables") {
  SUBCASE("zenith") {
    const Observables o = geometry_observables(Vec3(0, 0, 0), UavState{Vec3(0, 0, 100), Vec3(0, 0, 10)});
    CHECK(o.d == 100.0);
    CHECK(o.theta == 0.0);
    CHECK(o.v_r == 10.0);
  }
  SUBCASE("horizon limit") {
    const Observables o = geometry_observables(Vec3(0, 0, 0), UavState{Vec3(100, 0, 1e-9), Vec3::Zero()});
    CHECK(o.theta == doctest::Approx(pi / 2));
    CHECK(o.phi == 0.0);
  }
  SUBCASE("level target") {
    const Observables o = geometry_observables(Vec3(0, 0, 25), UavState{Vec3(30, 40, 25), Vec3(3, 4, 0)});
    CHECK(o.d == doctest::Approx(50.0));
    CHECK(o.v_r == doctest::Approx(5.0));
    CHECK(o.phi == doctest::Approx(std::atan2(40.0, 30.0)));
  }
  SUBCASE("azimuth in the third quadrant") {
    const Observables o = geometry_observables(Vec3(0, 0, 0), UavState{Vec3(-10, -10, 10), Vec3::Zero()});
    CHECK(o.phi == doctest::Approx(-3 * pi / 4));
    CHECK(o.theta == doctest::Approx(std::acos(10 / std::sqrt(300.0))));
  }
  SUBCASE("stacked overload agrees") {
    Vec6 x;
    x << 12, -7, 40, 1, 2, 3;
    const Observables a = geometry_observables(Vec3(1, 2, 3), x);
    const Observables b = geometry_observables(Vec3(1, 2, 3), UavState::from_stacked(x));
    CHECK(a.vector() == b.vector());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(geometry_observables(Vec3(1, 1, 1), UavState{Vec3(1, 1, 1), Vec3::Zero()}), InvalidInput);
    CHECK_THROWS_AS(geometry_observables(Vec3(0, 0, 10), UavState{Vec3(5, 0, 9), Vec3::Zero()}), UnsupportedGeometry);
  }
}

TEST_CASE("Doppler shift") {
  const RadioConfig cfg;
  CHECK(cfg.doppler(5.0) == doctest::Approx(1000.0));
}

TEST_CASE("wrap_angle range") {
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(2 * pi * 1000 + 0.25) == doctest::Approx(0.25));
}

TEST_CASE("steering vectors") {
  SUBCASE("boresight is uniform") {
    const CVec a = steering_vector(0.7, 0.0, 8, 8);
    for (int i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - std::complex<double>(1.0 / 8.0, 0.0)) < 1e-15);
  }
  SUBCASE("single element") {
    const CVec a = steering_vector(1.1, 0.4, 1, 1);
    REQUIRE(a.size() == 1);
    CHECK(std::abs(a[0] - std::complex<double>(1, 0)) < 1e-15);
  }
  SUBCASE("element layout and unit norm") {
    for (int i = 0; i < 32; ++i) {
      const double phi = -pi + 2 * pi * i / 32, theta = (pi / 2) * i / 31;
      const CVec a = steering_vector(phi, theta, 4, 6);
      REQUIRE(std::abs(a.norm() - 1.0) < 1e-12);
      for (int m = 1; m <= 4; ++m) {
        for (int n = 1; n <= 6; ++n) {
          REQUIRE(std::abs(a[(m - 1) * 6 + (n - 1)] - steering_element(phi, theta, 4, 6, m, n)) < 1e-14);
        }
      }
    }
  }
  SUBCASE("cross correlation is bounded") {
    for (int i = 0; i < 24; ++i) {
      for (int j = 0; j < 24; ++j) {
        const CVec a = steering_vector(-pi + 0.26 * i, 0.065 * i, 8, 8);
        const CVec b = steering_vector(-pi + 0.26 * j, 0.065 * j, 8, 8);
        REQUIRE(std::abs(a.dot(b)) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("echo SNR") {
  const RadioConfig cfg;
  // 1 * 8^4 * 1 * 1 * (1e-2)^2 / (200^4 * 1e-9)
  CHECK(echo_snr(cfg, 200.0, 1.0, 1.0) == doctest::Approx(0.256));
  CHECK(echo_snr(cfg, 200.0, 0.0, 1.0) == 0.0);
  CHECK(echo_snr(cfg, 100.0, 0.3, 7.0) / echo_snr(cfg, 200.0, 0.3, 7.0) == doctest::Approx(16.0));
  CHECK(echo_snr(cfg, 100.0, 0.6, 7.0) / echo_snr(cfg, 100.0, 0.3, 7.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(echo_snr(cfg, 0.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("radio config validation") {
  RadioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.Mt = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("echo synthesis") {
  const RadioConfig cfg;
  const CityMap empty(Region(Vec3(-200, -200, 0), Vec3(200, 200, 200), Vec3(10, 10, 10)), {});
  const UavState uav{Vec3(60, -40, 90), Vec3(3, 1, -2)};
  const Vec3 bs(0, 0, 10);
  const Observables truth = geometry_observables(bs, uav);
  const CVec matched = steering_vector(truth.phi, truth.theta, cfg.Mt, cfg.Nt);

  SUBCASE("noiseless LoS echo equals the geometry") {
    const SensingScene scene{&empty, bs, {}, 100.0};
    Rng rng(5);
    const EchoMeasurement e = synthesize_measurement(scene, uav, matched, cfg, SensingNoise{0, 0, 0, 0}, rng);
    CHECK(e.origin == EchoOrigin::uav);
    CHECK(e.detected);
    CHECK(e.z.vector() == truth.vector());
    CHECK(e.echo_snr == doctest::Approx(echo_snr(cfg, truth.d, 1.0, 100.0)));
  }

  SUBCASE("blocked echo comes from the facade") {
    const CityMap city(empty.region(), {box(20, 40, -30, -10, 150)});
    const BlockerModel blocker{0.5, -1.5};
    const SensingScene scene{&city, bs, blocker, 100.0};
    Rng rng(5);
    const EchoMeasurement e = synthesize_measurement(scene, uav, matched, cfg, SensingNoise{0, 0, 0, 0}, rng);
    REQUIRE(e.origin == EchoOrigin::blocker);
    const auto sampled = oracle::sampled_first_block(city, bs, uav.q, 100000);
    REQUIRE(sampled.has_value());
    const double spacing = (uav.q - bs).norm() / 100001;
    CHECK(e.z.d <= (*sampled - bs).norm() + 1e-9);
    CHECK(e.z.d >= (*sampled - bs).norm() - spacing - 1e-9);
    CHECK(e.z.d == doctest::Approx((*city.segment_blocked(bs, uav.q).first_point - bs).norm()));
    CHECK(e.z.v_r == -1.5);
  }

  SUBCASE("range noise scales with the echo SNR") {
    const SensingScene scene{&empty, bs, {}, 1.0};
    const SensingNoise noise{10.0, 0.1, 5.0, 0.0};
    Rng rng(17);
    double sum = 0.0, sum2 = 0.0, snr = 0.0;
    constexpr int n = 10000;
    for (int i = 0; i < n; ++i) {
      const EchoMeasurement e = synthesize_measurement(scene, uav, matched, cfg, noise, rng);
      snr = e.echo_snr;
      const double err = e.z.d - truth.d;
      sum += err;
      sum2 += err * err;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(sd / (10.0 / std::sqrt(snr)) - 1.0) < 0.05);
  }

  SUBCASE("weak echoes are reported as missed") {
    const SensingScene scene{&empty, bs, {}, 1e-12};
    Rng rng(1);
    const EchoMeasurement e = synthesize_measurement(scene, uav, matched, cfg, SensingNoise{}, rng);
    CHECK_FALSE(e.detected);
  }
}
