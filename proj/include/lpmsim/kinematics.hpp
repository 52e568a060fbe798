#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "lpmsim/citymap.hpp"

namespace lpmsim {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Rng = std::mt19937_64;

/// Position and velocity of the UAV at one slot.
struct UavState {
  Vec3 q = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 x;
    x << q, v;
    return x;
  }
  static UavState from_stacked(const Vec6& x) { return {x.head<3>(), x.tail<3>()}; }
  friend bool operator==(const UavState&, const UavState&) = default;
};

/// Constant-velocity transition matrix [[I, dt I], [0, I]].
Mat6 evolution_matrix(double dt);

/// Constant-velocity motion with independent Gaussian position and velocity noise per slot.
class MotionModel {
 public:
  MotionModel(double dt = 0.02, double sigma_d = 0.1, double sigma_v = 0.1);

  double dt() const { return dt_; }
  double sigma_d() const { return sigma_d_; }
  double sigma_v() const { return sigma_v_; }
  const Mat6& transition() const { return transition_; }
  const Mat6& process_cov() const { return process_cov_; }

 private:
  double dt_;
  double sigma_d_;
  double sigma_v_;
  Mat6 transition_;
  Mat6 process_cov_;
};

/// Propagates one slot and reflects off the region faces, negating the
/// velocity component on every axis that was reflected.
UavState step(const UavState& state, const MotionModel& model, const Region& bounds, Rng& rng);

/// Returns slots 0..steps inclusive, starting from x0.
std::vector<UavState> generate_trajectory(const UavState& x0, const MotionModel& model, const Region& bounds,
                                          int steps, Rng& rng);

}  // namespace lpmsim
