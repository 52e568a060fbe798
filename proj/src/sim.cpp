#include "lpmsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "lpmsim/association.hpp"
#include "lpmsim/beamforming.hpp"
#include "lpmsim/error.hpp"
#include "lpmsim/sensing.hpp"
#include "lpmsim/tracking.hpp"

namespace lpmsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double to_db(double linear) { return 10.0 * std::log10(linear); }

Vec3 direction(double phi, double theta) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

struct SteeredBeam {
  CVec f;
  double phi = 0.0;
  double theta = 0.0;
};

std::size_t station_index(const SimContext& ctx, int id) {
  for (std::size_t i = 0; i < ctx.stations.size(); ++i) {
    if (ctx.stations[i].id == id) return i;
  }
  throw InvalidInput("unknown base station id");
}

}  // namespace

std::uint64_t split_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RunResult run(const Scenario& s, const SimContext& ctx, std::uint64_t seed) {
  if (ctx.stations.empty()) throw ConfigError("$.base_stations: no stations");
  const Region& region = ctx.city->region();
  const MotionModel model(s.dt, s.sigma_d, s.sigma_v);
  Rng truth_rng(split_seed(seed, 0));
  Rng sense_rng(split_seed(seed, 1));

  std::vector<UavState> truth;
  truth.reserve(static_cast<std::size_t>(s.slots));
  truth.push_back(s.initial);
  while (truth.size() < static_cast<std::size_t>(s.slots)) truth.push_back(step(truth.back(), model, region, truth_rng));

  std::vector<Codebook> codebooks;
  for (const auto& bs : ctx.stations)
    codebooks.push_back(Codebook::uniform_grid(s.beam.codebook_phi, s.beam.codebook_theta, bs.cfg.Mt, bs.cfg.Nt));

  Association assoc(ctx.stations, ctx.stations.front().id, s.rate);
  RunResult result;
  result.records.reserve(truth.size());

  std::optional<KalmanBelief> posterior;
  SteeredBeam held_beam;
  int held_beam_bs = -1;

  for (int n = 1; n <= s.slots; ++n) {
    const UavState& x = truth[static_cast<std::size_t>(n - 1)];
    const BaseStation& bs = assoc.serving();
    const std::size_t bs_idx = station_index(ctx, bs.id);
    const Codebook& codebook = codebooks[bs_idx];
    SlotRecord rec;
    rec.slot = n;
    rec.truth = x;
    rec.bs_id = bs.id;

    std::optional<Observables> true_obs;
    try {
      true_obs = geometry_observables(bs.position, x);
    } catch (const std::exception&) {
      ++result.fallbacks;
    }
    // Exhaustive pilot sweep against the true direction; stands in for a physical acquisition.
    auto acquire = [&]() -> SteeredBeam {
      if (!true_obs) return {steering_vector(0.0, 0.0, bs.cfg.Mt, bs.cfg.Nt), 0.0, 0.0};
      const std::size_t k = beam_training_baseline(codebook, true_obs->phi, true_obs->theta, 0).best_beam;
      return {codebook.beams[k], codebook.phi[k], codebook.theta[k]};
    };

    std::optional<KalmanBelief> predicted;
    if (posterior) {
      predicted = predict(*posterior, model);
    } else if (s.init == InitMode::exact) {
      predicted = init_from_measurement(Observables{}, bs.position);
      predicted->mean = x.stacked();
    }

    SteeredBeam beam;
    if (s.beam.mode == BeamMode::predictive) {
      if (predicted) {
        PredictedBeam pb = predictive_beam(*predicted, bs.position, bs.cfg.Mt, bs.cfg.Nt);
        if (pb.fallback) ++result.fallbacks;
        beam = {std::move(pb.f), pb.phi, pb.theta};
      } else {
        beam = acquire();
      }
    } else {
      const long sweep = static_cast<long>(codebook.size()) * s.beam.slots_per_beam;
      const long phase = (n - 1) % s.beam.training_period;
      rec.training = phase < sweep;
      if (held_beam_bs != bs.id) {
        held_beam = acquire();
        held_beam_bs = bs.id;
      } else if (sweep > 0 && phase == sweep - 1) {
        held_beam = acquire();
      }
      beam = held_beam;
    }

    EchoMeasurement echo;
    const SensingScene scene{ctx.city.get(), bs.position, s.blocker, s.uav_rcs_scale};
    try {
      echo = synthesize_measurement(scene, x, beam.f, bs.cfg, s.noise, sense_rng);
    } catch (const std::exception&) {
      ++result.fallbacks;
      echo.detected = false;
      echo.echo_snr = 0.0;
      echo.origin = ctx.city->segment_blocked(bs.position, x.q).blocked ? EchoOrigin::blocker : EchoOrigin::uav;
    }
    rec.detected = echo.detected;
    rec.echo_snr_db = to_db(echo.echo_snr);
    rec.link_true = echo.origin == EchoOrigin::uav ? LinkState::los : LinkState::nlos;
    rec.nis = kNaN;

    LinkStateDecision decision;
    if (!predicted) {
      const Vec3 q0 = echo.detected ? init_from_measurement(echo.z, bs.position).mean.head<3>().eval() : bs.position;
      decision = fuse(bs.lpm->query(region.clamp(q0)).p_los, 1.0, s.identification.threshold);
      if (echo.detected) posterior = init_from_measurement(echo.z, bs.position);
    } else {
      decision = identify(*predicted, echo, *bs.lpm, bs.position, s.noise, s.identification);
      if (decision.prior_clamped) ++result.fallbacks;
      posterior = predicted;
      if (decision.state == LinkState::los && echo.detected) {
        const UpdateResult upd =
            update(*predicted, echo.z.vector(), MeasurementNoise::at_snr(s.noise, echo.echo_snr), bs.position);
        if (upd.fallback) ++result.fallbacks;
        if (upd.applied) {
          posterior = upd.belief;
          rec.nis = upd.innov.nis;
        }
      }
    }
    rec.link_est = decision.state;
    rec.posterior_los = decision.posterior_los;
    rec.prior_los = decision.prior_los;

    if (posterior) {
      rec.estimate = UavState::from_stacked(posterior->mean);
      rec.nees = nees(*posterior, x.stacked());
    } else {
      rec.estimate = UavState{Vec3::Constant(kNaN), Vec3::Constant(kNaN)};
      rec.nees = kNaN;
    }

    // Downlink over the physical channel of this slot.
    double snr_effective = 0.0;
    if (true_obs) {
      rec.beam_gain = beam_gain(beam.f, true_obs->phi, true_obs->theta, bs.cfg.Mt, bs.cfg.Nt);
      const double snr_los = comm_snr(bs.cfg, true_obs->d, beam.f, true_obs->phi, true_obs->theta);
      const int into_handover = assoc.handover_slot();
      LinkCondition cond = rec.link_true == LinkState::los ? LinkCondition::los : LinkCondition::nlos_stay;
      snr_effective = rec.link_true == LinkState::los
                          ? snr_los
                          : snr_los * std::pow(10.0, -s.rate.penetration_loss_db / 10.0);
      if (into_handover >= 0) {
        rec.rate = achievable_rate(LinkCondition::handover, snr_effective, s.rate, into_handover);
      } else {
        rec.rate = achievable_rate(cond, snr_los, s.rate);
      }
      if (rec.training) rec.rate = 0.0;
      const double cos_err = direction(beam.phi, beam.theta).dot(direction(true_obs->phi, true_obs->theta));
      rec.pointing_error = std::acos(std::clamp(cos_err, -1.0, 1.0));
    }
    rec.snr_db = to_db(snr_effective);

    const Vec3 q_pred = predicted ? predicted->mean.head<3>().eval()
                                  : (posterior ? posterior->mean.head<3>().eval() : bs.position);
    rec.handover = assoc.on_decision(decision.state, q_pred);
    assoc.end_slot();
    result.records.push_back(rec);
  }
  return result;
}

std::vector<RunResult> run_batch(const Scenario& scenario, const SimContext& ctx, int runs, std::uint64_t root_seed,
                                 unsigned threads) {
  if (runs < 1) throw InvalidInput("run_batch: runs must be >= 1");
  std::vector<RunResult> results(static_cast<std::size_t>(runs));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++)
      results[static_cast<std::size_t>(i)] = run(scenario, ctx, split_seed(root_seed, static_cast<std::uint64_t>(i)));
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace lpmsim
