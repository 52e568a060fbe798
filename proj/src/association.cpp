#include "lpmsim/association.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "lpmsim/error.hpp"

namespace lpmsim {
namespace {

const BaseStation& find_station(std::span<const BaseStation> stations, int id) {
  for (const auto& bs : stations) {
    if (bs.id == id) return bs;
  }
  throw InvalidInput("unknown base station id " + std::to_string(id));
}

double map_los(const BaseStation& bs, const Vec3& q) {
  return bs.lpm->query(bs.lpm->region().clamp(q)).p_los;
}

}  // namespace

int select_bs_on_nlos(std::span<const BaseStation> stations, const Vec3& q_pred, int serving_id) {
  if (stations.size() < 2) throw InvalidInput("select_bs_on_nlos: no handover candidate");
  const BaseStation* best = nullptr;
  std::tuple<double, double, int> best_key;
  for (const auto& bs : stations) {
    if (bs.id == serving_id) continue;
    // Lexicographic: larger p_los, then smaller distance, then smaller id.
    const std::tuple<double, double, int> key{-map_los(bs, q_pred), (bs.position - q_pred).norm(), bs.id};
    if (!best || key < best_key) {
      best = &bs;
      best_key = key;
    }
  }
  if (!best) throw InvalidInput("select_bs_on_nlos: no handover candidate");
  return best->id;
}

double achievable_rate(LinkCondition condition, double snr_los, const RateConfig& cfg, int slots_into_handover) {
  const double snr = std::max(snr_los, 0.0);
  switch (condition) {
    case LinkCondition::los:
      return std::log2(1.0 + snr);
    case LinkCondition::nlos_stay:
      return std::log2(1.0 + snr * std::pow(10.0, -cfg.penetration_loss_db / 10.0));
    case LinkCondition::handover:
      return slots_into_handover < cfg.handover_delay_slots ? 0.0 : std::log2(1.0 + snr);
  }
  return 0.0;
}

Association::Association(std::span<const BaseStation> stations, int home_id, RateConfig cfg)
    : stations_(stations), cfg_(cfg), home_(home_id), serving_(home_id) {
  if (stations_.empty()) throw InvalidInput("Association: no base stations");
  if (cfg_.handover_delay_slots < 0) throw InvalidInput("Association: handover_delay_slots must be >= 0");
  find_station(stations_, home_id);
}

const BaseStation& Association::serving() const { return find_station(stations_, serving_); }

void Association::switch_to(int id) {
  serving_ = id;
  delay_left_ = cfg_.handover_delay_slots;
  revert_hold_ = 0;
  ++handovers_;
  switched_this_slot_ = true;
}

bool Association::on_decision(LinkState decision, const Vec3& q_pred) {
  if (!cfg_.handover_enabled || stations_.size() < 2 || delay_left_ > 0) return false;
  if (decision == LinkState::nlos) {
    switch_to(select_bs_on_nlos(stations_, q_pred, serving_));
    return true;
  }
  if (serving_ != home_) {
    if (map_los(find_station(stations_, home_), q_pred) > cfg_.revert_threshold) {
      if (++revert_hold_ >= cfg_.revert_hold_slots) {
        switch_to(home_);
        return true;
      }
    } else {
      revert_hold_ = 0;
    }
  }
  return false;
}

void Association::end_slot() {
  // The delay starts on the slot after the switch.
  if (switched_this_slot_) {
    switched_this_slot_ = false;
    return;
  }
  if (delay_left_ > 0) --delay_left_;
}

}  // namespace lpmsim
