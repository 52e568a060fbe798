#pragma once

#include <cstddef>
#include <vector>

#include "lpmsim/sensing.hpp"
#include "lpmsim/tracking.hpp"

namespace lpmsim {

struct PredictedBeam {
  CVec f;
  double phi = 0.0;
  double theta = 0.0;
  bool fallback = false;  ///< boresight used because the prediction had no valid geometry
};

/// Transmit beam matched to the direction of the predicted position.
PredictedBeam predictive_beam(const KalmanBelief& predicted, const Vec3& bs, int Mt, int Nt);

/// |a_t(phi, theta)^H f|^2.
double beam_gain(const CVec& f, double phi, double theta, int Mt, int Nt);

/// Downlink SNR with one-way 1/d path loss.
double comm_snr(const RadioConfig& cfg, double d, const CVec& f, double phi, double theta);

/// Steering vectors on a uniform azimuth x zenith grid; azimuth slowest.
struct Codebook {
  int n_phi = 0;
  int n_theta = 0;
  int Mt = 1, Nt = 1;
  std::vector<double> phi;
  std::vector<double> theta;
  std::vector<CVec> beams;

  static Codebook uniform_grid(int n_phi, int n_theta, int Mt, int Nt);
  std::size_t size() const { return beams.size(); }
};

struct TrainingResult {
  std::size_t best_beam = 0;
  double best_gain = 0.0;
  long overhead_slots = 0;
};

/// Exhaustive sweep; ties go to the lowest index.
TrainingResult beam_training_baseline(const Codebook& codebook, double phi, double theta, int slots_per_beam);

}  // namespace lpmsim
