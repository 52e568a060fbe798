#pragma once

#include <complex>

#include <Eigen/Core>

#include "lpmsim/citymap.hpp"
#include "lpmsim/kinematics.hpp"

namespace lpmsim {

using Vec4 = Eigen::Vector4d;
using CVec = Eigen::VectorXcd;

struct RadioConfig {
  double f_c = 30e9;
  double c = 3e8;
  int Mt = 8, Nt = 8;
  int Mr = 8, Nr = 8;
  double sigma_r2 = 1e-9;  ///< BS receiver noise power (echo)
  double sigma_c2 = 1e-9;  ///< UAV receiver noise power (downlink)
  double kappa_ref = 1e-2;  ///< path gain at 1 m
  double p_n = 1.0;

  void validate() const;
  double doppler(double v_r) const { return 2.0 * f_c * v_r / c; }
};

/// Range, azimuth, zenith angle from the array normal, and radial velocity.
struct Observables {
  double d = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double v_r = 0.0;

  Vec4 vector() const { return {d, phi, theta, v_r}; }
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

Observables geometry_observables(const Vec3& bs, const UavState& state);
Observables geometry_observables(const Vec3& bs, const Vec6& x);

/// UPA steering vector, element (m, n) at index m*N + n (zero-based).
CVec steering_vector(double phi, double theta, int M, int N);

/// Monostatic echo SNR with two-way d^4 spreading.
double echo_snr(const RadioConfig& cfg, double d, double beam_gain, double rcs_scale);

/// Estimator-facing parameter noise; stds are at unit SNR and scale as 1/sqrt(SNR).
struct SensingNoise {
  double sigma_d0 = 10.0;
  double sigma_a0 = 0.1;
  double sigma_v0 = 5.0;
  double snr_floor = 1e-3;

  Vec4 stds_at(double snr) const;
};

struct BlockerModel {
  double alpha_scale = 1.0;  ///< reflection strength relative to the UAV
  double v_r = 0.0;
};

enum class EchoOrigin { uav, blocker };

struct EchoMeasurement {
  Observables z;
  double echo_snr = 0.0;
  bool detected = true;
  EchoOrigin origin = EchoOrigin::uav;  ///< ground truth; estimators must not read it
};

struct SensingScene {
  const CityMap* city = nullptr;
  Vec3 bs = Vec3::Zero();
  BlockerModel blocker;
  double uav_rcs_scale = 1.0;
};

EchoMeasurement synthesize_measurement(const SensingScene& scene, const UavState& state, const CVec& beam,
                                       const RadioConfig& cfg, const SensingNoise& noise, Rng& rng);

}  // namespace lpmsim
