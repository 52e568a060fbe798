#include "lpmsim/kinematics.hpp"

#include <cmath>

#include "lpmsim/error.hpp"

namespace lpmsim {

Mat6 evolution_matrix(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("evolution_matrix: dt must be > 0");
  Mat6 g = Mat6::Identity();
  g.topRightCorner<3, 3>() = dt * Eigen::Matrix3d::Identity();
  return g;
}

MotionModel::MotionModel(double dt, double sigma_d, double sigma_v)
    : dt_(dt), sigma_d_(sigma_d), sigma_v_(sigma_v), transition_(evolution_matrix(dt)), process_cov_(Mat6::Zero()) {
  if (!(sigma_d >= 0.0) || !(sigma_v >= 0.0)) throw InvalidInput("MotionModel: noise stds must be >= 0");
  process_cov_.diagonal() << Vec3::Constant(sigma_d * sigma_d), Vec3::Constant(sigma_v * sigma_v);
}

UavState step(const UavState& state, const MotionModel& model, const Region& bounds, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  UavState next;
  next.q = state.q + state.v * model.dt();
  next.v = state.v;
  for (int i = 0; i < 3; ++i) next.q[i] += model.sigma_d() * gauss(rng);
  for (int i = 0; i < 3; ++i) next.v[i] += model.sigma_v() * gauss(rng);

  const Vec3& lo = bounds.lower();
  const Vec3& hi = bounds.upper();
  for (int i = 0; i < 3; ++i) {
    // Repeated mirroring covers overshoots wider than the region span.
    while (next.q[i] > hi[i] || next.q[i] < lo[i]) {
      next.q[i] = next.q[i] > hi[i] ? 2.0 * hi[i] - next.q[i] : 2.0 * lo[i] - next.q[i];
      next.v[i] = -next.v[i];
    }
  }
  return next;
}

std::vector<UavState> generate_trajectory(const UavState& x0, const MotionModel& model, const Region& bounds,
                                          int steps, Rng& rng) {
  if (steps < 1) throw InvalidInput("generate_trajectory: steps must be >= 1");
  std::vector<UavState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(x0);
  for (int n = 0; n < steps; ++n) out.push_back(step(out.back(), model, bounds, rng));
  return out;
}

}  // namespace lpmsim
