#include "lpmsim/beamforming.hpp"

#include <cmath>
#include <numbers>

#include "lpmsim/error.hpp"

namespace lpmsim {

using std::numbers::pi;

PredictedBeam predictive_beam(const KalmanBelief& predicted, const Vec3& bs, int Mt, int Nt) {
  PredictedBeam out;
  try {
    const Observables o = geometry_observables(bs, predicted.mean);
    out.phi = o.phi;
    out.theta = o.theta;
  } catch (const std::exception&) {
    out.fallback = true;
  }
  out.f = steering_vector(out.phi, out.theta, Mt, Nt);
  return out;
}

double beam_gain(const CVec& f, double phi, double theta, int Mt, int Nt) {
  if (f.size() != static_cast<Eigen::Index>(Mt) * Nt) throw InvalidInput("beam_gain: beam length mismatch");
  return std::norm(steering_vector(phi, theta, Mt, Nt).dot(f));
}

double comm_snr(const RadioConfig& cfg, double d, const CVec& f, double phi, double theta) {
  if (!(d > 0.0)) throw InvalidInput("comm_snr: distance must be > 0");
  const double path_gain = cfg.kappa_ref * cfg.kappa_ref / (d * d);
  return cfg.p_n * cfg.Mt * cfg.Nt * path_gain * beam_gain(f, phi, theta, cfg.Mt, cfg.Nt) / cfg.sigma_c2;
}

Codebook Codebook::uniform_grid(int n_phi, int n_theta, int Mt, int Nt) {
  if (n_phi < 1 || n_theta < 1) throw InvalidInput("Codebook: grid dimensions must be >= 1");
  Codebook cb;
  cb.n_phi = n_phi;
  cb.n_theta = n_theta;
  cb.Mt = Mt;
  cb.Nt = Nt;
  for (int i = 0; i < n_phi; ++i) {
    const double phi = -pi + (i + 0.5) * 2.0 * pi / n_phi;
    for (int j = 0; j < n_theta; ++j) {
      const double theta = (j + 0.5) * (pi / 2.0) / n_theta;
      cb.phi.push_back(phi);
      cb.theta.push_back(theta);
      cb.beams.push_back(steering_vector(phi, theta, Mt, Nt));
    }
  }
  return cb;
}

TrainingResult beam_training_baseline(const Codebook& codebook, double phi, double theta, int slots_per_beam) {
  if (codebook.beams.empty()) throw InvalidInput("beam_training_baseline: empty codebook");
  if (slots_per_beam < 0) throw InvalidInput("beam_training_baseline: slots_per_beam must be >= 0");
  const CVec probe = steering_vector(phi, theta, codebook.Mt, codebook.Nt);
  TrainingResult out;
  out.best_gain = -1.0;
  for (std::size_t i = 0; i < codebook.beams.size(); ++i) {
    const double g = std::norm(probe.dot(codebook.beams[i]));
    if (g > out.best_gain) {
      out.best_gain = g;
      out.best_beam = i;
    }
  }
  out.overhead_slots = static_cast<long>(codebook.beams.size()) * slots_per_beam;
  return out;
}

}  // namespace lpmsim
