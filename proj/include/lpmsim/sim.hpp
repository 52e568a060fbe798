#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpmsim/identification.hpp"
#include "lpmsim/kinematics.hpp"
#include "lpmsim/scenario.hpp"

namespace lpmsim {

/// One row of the per-slot log.
struct SlotRecord {
  int slot = 0;
  UavState truth;
  UavState estimate;  ///< posterior mean after this slot; NaN before initialization
  LinkState link_true = LinkState::los;
  LinkState link_est = LinkState::los;
  double posterior_los = 1.0;
  int bs_id = 0;
  double beam_gain = 0.0;
  double snr_db = 0.0;
  double rate = 0.0;
  double nis = 0.0;  ///< NaN when no measurement update ran

  // Diagnostics kept in memory only.
  double prior_los = 1.0;
  double echo_snr_db = 0.0;
  bool detected = true;
  double nees = 0.0;
  double pointing_error = 0.0;  ///< rad between the transmit beam direction and the true direction
  bool handover = false;
  bool training = false;
};

struct RunResult {
  std::vector<SlotRecord> records;
  int fallbacks = 0;  ///< slots where a numerical or geometric fallback path ran
};

/// Mixes a run index into a root seed (splitmix64 finalizer).
std::uint64_t split_seed(std::uint64_t root, std::uint64_t index);

/// Runs one closed-loop simulation. Truth and sensing noise use separate
/// streams derived from `seed`, so variants of a scenario share trajectories.
RunResult run(const Scenario& scenario, const SimContext& ctx, std::uint64_t seed);
inline RunResult run(const Scenario& scenario, const SimContext& ctx) { return run(scenario, ctx, scenario.seed); }

/// Runs `runs` independent simulations with seeds split_seed(root_seed, i).
/// Results are indexed by run, independent of the thread count.
std::vector<RunResult> run_batch(const Scenario& scenario, const SimContext& ctx, int runs,
                                 std::uint64_t root_seed, unsigned threads = 0);

}  // namespace lpmsim
