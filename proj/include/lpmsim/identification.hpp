#pragma once

#include "lpmsim/lpm.hpp"
#include "lpmsim/sensing.hpp"
#include "lpmsim/tracking.hpp"

namespace lpmsim {

enum class LinkState { los, nlos };

struct IdentificationConfig {
  double threshold = 0.5;
  double v_max = 50.0;       ///< m/s, half-width of the radial-velocity span
  double d_max = 0.0;        ///< m; 0 selects the region diagonal
  double p_miss_los = 0.01;  ///< probability of a missed echo given LoS

  /// Measurement-space volume d_max * 2pi * pi/2 * 2 v_max of the diffuse NLoS model.
  double volume(const Region& region) const;
};

struct LinkStateDecision {
  LinkState state = LinkState::los;
  double posterior_los = 1.0;
  double prior_los = 1.0;
  double likelihood_ratio = 1.0;  ///< L_los / L_nlos
  bool prior_clamped = false;     ///< prediction fell outside the map and was clamped
};

/// Bayes rule on the LoS indicator given a likelihood ratio L_los / L_nlos.
LinkStateDecision fuse(double prior_los, double likelihood_ratio, double threshold);

/// Fuses the map prior at the predicted position with the innovation likelihood
/// of the echo under the predicted belief.
LinkStateDecision identify(const KalmanBelief& predicted, const EchoMeasurement& echo, const LosProbabilityMap& lpm,
                           const Vec3& bs, const SensingNoise& noise, const IdentificationConfig& cfg);

}  // namespace lpmsim
