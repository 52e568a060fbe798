#include "lpmsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lpmsim/error.hpp"

namespace lpmsim {

using std::numbers::pi;

void RadioConfig::validate() const {
  if (!(f_c > 0 && c > 0 && sigma_r2 > 0 && sigma_c2 > 0 && kappa_ref > 0 && p_n > 0))
    throw InvalidInput("RadioConfig: all physical parameters must be > 0");
  if (Mt < 1 || Nt < 1 || Mr < 1 || Nr < 1) throw InvalidInput("RadioConfig: array dimensions must be >= 1");
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  return a;
}

Observables geometry_observables(const Vec3& bs, const UavState& state) {
  const Vec3 delta = state.q - bs;
  const double d = delta.norm();
  if (!(d > 0.0)) throw InvalidInput("geometry_observables: target coincides with the array");
  if (delta.z() < 0.0) throw UnsupportedGeometry("geometry_observables: target below the array plane");
  Observables o;
  o.d = d;
  o.phi = std::atan2(delta.y(), delta.x());
  o.theta = std::clamp(std::acos(std::clamp(delta.z() / d, -1.0, 1.0)), 0.0, pi / 2);
  o.v_r = delta.dot(state.v) / d;
  return o;
}

Observables geometry_observables(const Vec3& bs, const Vec6& x) {
  return geometry_observables(bs, UavState::from_stacked(x));
}

CVec steering_vector(double phi, double theta, int M, int N) {
  if (M < 1 || N < 1) throw InvalidInput("steering_vector: dimensions must be >= 1");
  CVec a(M * N);
  const double s = std::sin(theta);
  const double norm = 1.0 / std::sqrt(static_cast<double>(M * N));
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const double phase = -pi * s * (m * std::cos(phi) + n * std::sin(phi));
      a[m * N + n] = std::polar(norm, phase);
    }
  }
  return a;
}

double echo_snr(const RadioConfig& cfg, double d, double beam_gain, double rcs_scale) {
  if (!(d > 0.0)) throw InvalidInput("echo_snr: distance must be > 0");
  const double arrays = static_cast<double>(cfg.Mt) * cfg.Nt * cfg.Mr * cfg.Nr;
  const double d2 = d * d;
  return cfg.p_n * arrays * beam_gain * rcs_scale * cfg.kappa_ref * cfg.kappa_ref / (d2 * d2 * cfg.sigma_r2);
}

Vec4 SensingNoise::stds_at(double snr) const {
  const double k = 1.0 / std::sqrt(snr);
  return {sigma_d0 * k, sigma_a0 * k, sigma_a0 * k, sigma_v0 * k};
}

EchoMeasurement synthesize_measurement(const SensingScene& scene, const UavState& state, const CVec& beam,
                                       const RadioConfig& cfg, const SensingNoise& noise, Rng& rng) {
  EchoMeasurement m;
  const Observables truth = geometry_observables(scene.bs, state);
  Observables reflector = truth;
  double rcs = scene.uav_rcs_scale;

  const Blockage blockage =
      scene.city ? scene.city->segment_blocked(scene.bs, state.q) : Blockage{};
  if (blockage.blocked) {
    m.origin = EchoOrigin::blocker;
    reflector = geometry_observables(scene.bs, UavState{*blockage.first_point, Vec3::Zero()});
    reflector.v_r = scene.blocker.v_r;
    rcs *= scene.blocker.alpha_scale;
  }

  const CVec a_t = steering_vector(reflector.phi, reflector.theta, cfg.Mt, cfg.Nt);
  const double gain = std::norm(a_t.dot(beam));
  m.echo_snr = echo_snr(cfg, reflector.d, gain, rcs);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec4 draws;
  for (int i = 0; i < 4; ++i) draws[i] = gauss(rng);

  if (!(m.echo_snr > 0.0) || m.echo_snr < noise.snr_floor) {
    m.detected = false;
    m.z = reflector;
    return m;
  }
  const Vec4 noisy = reflector.vector() + noise.stds_at(m.echo_snr).cwiseProduct(draws);
  m.z.d = std::max(noisy[0], 1e-6);
  m.z.phi = wrap_angle(noisy[1]);
  m.z.theta = std::clamp(noisy[2], 0.0, pi / 2);
  m.z.v_r = noisy[3];
  return m;
}

}  // namespace lpmsim
