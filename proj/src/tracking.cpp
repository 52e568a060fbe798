#include "lpmsim/tracking.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "lpmsim/error.hpp"

namespace lpmsim {
namespace {

constexpr double kMaxConditionNumber = 1e12;
constexpr double kMinVariance = 1e-12;

}  // namespace

MeasurementNoise MeasurementNoise::at_snr(const SensingNoise& noise, double snr) {
  const Vec4 stds = noise.stds_at(snr);
  MeasurementNoise r;
  r.variances = stds.cwiseProduct(stds).cwiseMax(kMinVariance);
  return r;
}

void symmetrize(Mat6& cov) { cov = 0.5 * (cov + cov.transpose()).eval(); }

KalmanBelief predict(const KalmanBelief& belief, const MotionModel& model) {
  const Mat6& g = model.transition();
  KalmanBelief out;
  out.mean = g * belief.mean;
  out.cov = g * belief.cov * g.transpose() + model.process_cov();
  symmetrize(out.cov);
  return out;
}

Vec4 measurement_fn(const Vec6& x, const Vec3& bs) { return geometry_observables(bs, x).vector(); }

Mat46 measurement_jacobian(const Vec6& x, const Vec3& bs) {
  const Vec3 delta = x.head<3>() - bs;
  const Vec3 v = x.tail<3>();
  const double d = delta.norm();
  const double rho2 = delta.head<2>().squaredNorm();
  const double rho = std::sqrt(rho2);
  if (!(d > 1e-9)) throw SingularGeometry("measurement_jacobian: zero range");
  if (!(rho > 1e-9 * d)) throw SingularGeometry("measurement_jacobian: azimuth undefined at zenith");

  const double d2 = d * d;
  const double radial = delta.dot(v) / d;
  Mat46 h = Mat46::Zero();
  h.block<1, 3>(0, 0) = delta.transpose() / d;
  h(1, 0) = -delta.y() / rho2;
  h(1, 1) = delta.x() / rho2;
  h(2, 0) = delta.x() * delta.z() / (d2 * rho);
  h(2, 1) = delta.y() * delta.z() / (d2 * rho);
  h(2, 2) = -rho / d2;
  h.block<1, 3>(3, 0) = (v / d - radial * delta / d2).transpose();
  h.block<1, 3>(3, 3) = delta.transpose() / d;
  return h;
}

Mat46 numerical_jacobian(const Vec6& x, const Vec3& bs) {
  const double step = 1e-4 * std::max(1.0, x.norm());
  Mat46 h;
  for (int j = 0; j < 6; ++j) {
    Vec6 hi = x, lo = x;
    hi[j] += step;
    lo[j] -= step;
    Vec4 diff = measurement_fn(hi, bs) - measurement_fn(lo, bs);
    diff[1] = wrap_angle(diff[1]);
    h.col(j) = diff / (2.0 * step);
  }
  return h;
}

Innovation innovation(const KalmanBelief& belief, const Vec4& z, const MeasurementNoise& R, const Vec3& bs) {
  Innovation out;
  out.nu = z - measurement_fn(belief.mean, bs);
  out.nu[1] = wrap_angle(out.nu[1]);
  try {
    out.H = measurement_jacobian(belief.mean, bs);
  } catch (const SingularGeometry&) {
    out.H = numerical_jacobian(belief.mean, bs);
    out.numeric_jacobian = true;
  }
  out.S = out.H * belief.cov * out.H.transpose() + R.matrix();
  out.S = 0.5 * (out.S + out.S.transpose()).eval();
  out.nis = out.nu.dot(out.S.ldlt().solve(out.nu));
  return out;
}

UpdateResult update(const KalmanBelief& belief, const Vec4& z, const MeasurementNoise& R, const Vec3& bs) {
  UpdateResult result;
  result.belief = belief;
  try {
    result.innov = innovation(belief, z, R, bs);
  } catch (const UnsupportedGeometry&) {
    result.fallback = true;
    return result;
  }
  result.fallback = result.innov.numeric_jacobian;

  const Innovation& in = result.innov;
  const Eigen::SelfAdjointEigenSolver<Mat4> eig(in.S, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) {
    result.fallback = true;
    return result;
  }

  const Eigen::Matrix<double, 6, 4> gain = belief.cov * in.H.transpose() * in.S.inverse();
  const Mat6 ikh = Mat6::Identity() - gain * in.H;
  result.belief.mean = belief.mean + gain * in.nu;
  result.belief.cov = ikh * belief.cov * ikh.transpose() + gain * R.matrix() * gain.transpose();
  symmetrize(result.belief.cov);
  result.applied = true;
  return result;
}

KalmanBelief init_from_measurement(const Observables& z, const Vec3& bs) {
  KalmanBelief b;
  const double s = std::sin(z.theta);
  b.mean.head<3>() = bs + z.d * Vec3(s * std::cos(z.phi), s * std::sin(z.phi), std::cos(z.theta));
  b.mean.tail<3>().setZero();
  b.cov.setZero();
  b.cov.diagonal() << 100.0, 100.0, 100.0, 25.0, 25.0, 25.0;
  return b;
}

double nees(const KalmanBelief& belief, const Vec6& truth) {
  const Vec6 e = truth - belief.mean;
  return e.dot(belief.cov.ldlt().solve(e));
}

}  // namespace lpmsim
