#pragma once

#include <Eigen/Core>

#include "lpmsim/kinematics.hpp"
#include "lpmsim/sensing.hpp"

namespace lpmsim {

using Mat4 = Eigen::Matrix4d;
using Mat46 = Eigen::Matrix<double, 4, 6>;

/// Gaussian belief over the stacked [q; v] state.
struct KalmanBelief {
  Vec6 mean = Vec6::Zero();
  Mat6 cov = Mat6::Identity();
};

/// Diagonal measurement covariance for (d, phi, theta, v_r).
struct MeasurementNoise {
  Vec4 variances = Vec4::Ones();

  Mat4 matrix() const { return variances.asDiagonal(); }
  /// Variances from the sensing noise model at the reported echo SNR.
  static MeasurementNoise at_snr(const SensingNoise& noise, double snr);
};

KalmanBelief predict(const KalmanBelief& belief, const MotionModel& model);

/// Same observables as the echo synthesizer, evaluated on a stacked state.
Vec4 measurement_fn(const Vec6& x, const Vec3& bs);

/// Analytic d h / d x. Throws SingularGeometry at zero range or at zenith.
Mat46 measurement_jacobian(const Vec6& x, const Vec3& bs);

/// Central-difference Jacobian with step 1e-4 * max(1, |x|).
Mat46 numerical_jacobian(const Vec6& x, const Vec3& bs);

struct Innovation {
  Vec4 nu = Vec4::Zero();  ///< azimuth residual wrapped to (-pi, pi]
  Mat4 S = Mat4::Identity();
  Mat46 H = Mat46::Zero();
  double nis = 0.0;
  bool numeric_jacobian = false;
};

/// Innovation of z against the belief; throws on unsupported geometry.
Innovation innovation(const KalmanBelief& belief, const Vec4& z, const MeasurementNoise& R, const Vec3& bs);

struct UpdateResult {
  KalmanBelief belief;
  Innovation innov;
  bool applied = false;  ///< false when S was numerically singular or geometry unsupported
  bool fallback = false;  ///< a numerical fallback path was taken
};

UpdateResult update(const KalmanBelief& belief, const Vec4& z, const MeasurementNoise& R, const Vec3& bs);

/// Back-projects a measurement to Cartesian with zero velocity and a weak covariance.
KalmanBelief init_from_measurement(const Observables& z, const Vec3& bs);

/// Normalized estimation error squared of `truth` under the belief.
double nees(const KalmanBelief& belief, const Vec6& truth);

void symmetrize(Mat6& cov);

}  // namespace lpmsim
