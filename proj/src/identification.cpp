#include "lpmsim/identification.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "lpmsim/error.hpp"

namespace lpmsim {

using std::numbers::pi;

double IdentificationConfig::volume(const Region& region) const {
  const double range = d_max > 0.0 ? d_max : region.diagonal();
  return range * (2.0 * pi) * (pi / 2.0) * (2.0 * v_max);
}

LinkStateDecision fuse(double prior_los, double likelihood_ratio, double threshold) {
  LinkStateDecision out;
  out.prior_los = prior_los;
  out.likelihood_ratio = likelihood_ratio;
  if (prior_los >= 1.0) {
    out.posterior_los = 1.0;
  } else if (prior_los <= 0.0) {
    out.posterior_los = 0.0;
  } else if (std::isinf(likelihood_ratio)) {
    out.posterior_los = 1.0;
  } else {
    const double num = prior_los * likelihood_ratio;
    out.posterior_los = num / (num + (1.0 - prior_los));
  }
  out.state = out.posterior_los >= threshold ? LinkState::los : LinkState::nlos;
  return out;
}

LinkStateDecision identify(const KalmanBelief& predicted, const EchoMeasurement& echo, const LosProbabilityMap& lpm,
                           const Vec3& bs, const SensingNoise& noise, const IdentificationConfig& cfg) {
  const Region& region = lpm.region();
  const Vec3 q_pred = predicted.mean.head<3>();
  const Vec3 q_lookup = region.clamp(q_pred);
  const double prior = lpm.query(q_lookup).p_los;
  const bool clamped = q_lookup != q_pred;

  if (!echo.detected) {
    // Ratio P(miss | LoS) / P(miss | NLoS) with a certain miss under NLoS.
    LinkStateDecision d = fuse(prior, cfg.p_miss_los, cfg.threshold);
    d.prior_clamped = clamped;
    return d;
  }

  double log_lr = -std::numeric_limits<double>::infinity();
  try {
    const Innovation in =
        innovation(predicted, echo.z.vector(), MeasurementNoise::at_snr(noise, echo.echo_snr), bs);
    const double log_det = in.S.ldlt().vectorD().array().log().sum();
    const double log_l_los = -0.5 * in.nis - 0.5 * (4.0 * std::log(2.0 * pi) + log_det);
    log_lr = log_l_los + std::log(cfg.volume(region));
  } catch (const UnsupportedGeometry&) {
    // Predicted state below the array: no usable LoS likelihood.
  }
  LinkStateDecision d = fuse(prior, std::exp(log_lr), cfg.threshold);
  d.prior_clamped = clamped;
  return d;
}

}  // namespace lpmsim
