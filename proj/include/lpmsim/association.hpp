#pragma once

#include <memory>
#include <span>
#include <vector>

#include "lpmsim/identification.hpp"
#include "lpmsim/lpm.hpp"
#include "lpmsim/sensing.hpp"

namespace lpmsim {

struct BaseStation {
  int id = 0;
  Vec3 position = Vec3::Zero();
  RadioConfig cfg;
  std::shared_ptr<const LosProbabilityMap> lpm;
};

struct RateConfig {
  double penetration_loss_db = 20.0;
  int handover_delay_slots = 1;
  bool handover_enabled = true;
  double revert_threshold = 0.9;
  int revert_hold_slots = 5;
};

enum class LinkCondition { los, nlos_stay, handover };

/// Picks the handover target: highest map LoS probability at q_pred among the
/// non-serving stations, then nearest, then lowest id.
int select_bs_on_nlos(std::span<const BaseStation> stations, const Vec3& q_pred, int serving_id);

/// Spectral efficiency in bits/s/Hz. For `handover`, `slots_into_handover`
/// counts slots since the switch; rate is zero during the configured delay.
double achievable_rate(LinkCondition condition, double snr_los, const RateConfig& cfg, int slots_into_handover = 0);

/// Serving-station bookkeeping for one run.
class Association {
 public:
  Association(std::span<const BaseStation> stations, int home_id, RateConfig cfg);

  int serving_id() const { return serving_; }
  int home_id() const { return home_; }
  const BaseStation& serving() const;
  int handover_count() const { return handovers_; }

  /// Slots since the last switch while still inside the handover delay, else -1.
  int handover_slot() const { return delay_left_ > 0 ? cfg_.handover_delay_slots - delay_left_ : -1; }

  /// Applies the slot's decision. Returns true when the serving station changed.
  bool on_decision(LinkState decision, const Vec3& q_pred);

  /// Call once at the end of every slot.
  void end_slot();

 private:
  void switch_to(int id);

  std::span<const BaseStation> stations_;
  RateConfig cfg_;
  int home_;
  int serving_;
  int delay_left_ = 0;
  int revert_hold_ = 0;
  int handovers_ = 0;
  bool switched_this_slot_ = false;
};

}  // namespace lpmsim
