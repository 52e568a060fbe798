#include "lpmsim/scenario.hpp"

#include <set>

#include "json_util.hpp"
#include "lpmsim/error.hpp"
#include "lpmsim/lpm.hpp"

namespace lpmsim {
namespace {

using nlohmann::json;

const json kEmpty = json::object();

const json& section(const json& doc, const char* key, const std::string& path) {
  if (!doc.contains(key)) return kEmpty;
  const json& j = doc.at(key);
  if (!j.is_object()) throw ConfigError(path + "." + key + ": expected an object");
  return j;
}

bool boolean_or(const json& obj, const char* key, bool fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
  return obj.at(key).get<bool>();
}

std::string string_or(const json& obj, const char* key, const std::string& fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(path + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path + ": must be > 0");
}

void non_negative(double v, const std::string& path) {
  if (!(v >= 0.0)) throw ConfigError(path + ": must be >= 0");
}

RadioConfig radio_from_json(const json& j, const std::string& path) {
  RadioConfig r;
  r.f_c = number_or(j, "f_c", r.f_c, path);
  r.c = number_or(j, "c", r.c, path);
  r.Mt = integer_or(j, "Mt", r.Mt, path);
  r.Nt = integer_or(j, "Nt", r.Nt, path);
  r.Mr = integer_or(j, "Mr", r.Mr, path);
  r.Nr = integer_or(j, "Nr", r.Nr, path);
  r.sigma_r2 = number_or(j, "sigma_r2", r.sigma_r2, path);
  r.sigma_c2 = number_or(j, "sigma_c2", r.sigma_c2, path);
  r.kappa_ref = number_or(j, "kappa_ref", r.kappa_ref, path);
  r.p_n = number_or(j, "p_n", r.p_n, path);
  try {
    r.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return r;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ConfigError("$: expected an object");
  Scenario s;

  const json& map_ref = require(doc, "citymap", "$");
  if (!map_ref.is_string()) throw ConfigError("$.citymap: expected a file path");
  s.citymap = base_dir / map_ref.get<std::string>();
  if (!std::filesystem::exists(s.citymap)) throw ConfigError("$.citymap: file not found: " + s.citymap.string());

  const json& stations = require(doc, "base_stations", "$");
  if (!stations.is_array() || stations.empty()) throw ConfigError("$.base_stations: expected a non-empty array");
  const json& radio_defaults = section(doc, "radio", "$");
  std::set<int> ids;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const std::string path = "$.base_stations[" + std::to_string(i) + "]";
    const json& item = stations[i];
    StationSpec st;
    st.id = integer_or(item, "id", static_cast<int>(i) + 1, path);
    if (!ids.insert(st.id).second) throw ConfigError(path + ".id: duplicate id " + std::to_string(st.id));
    st.position = vec3(require(item, "position", path), path + ".position");
    json radio = radio_defaults;
    if (item.contains("radio")) radio.update(item.at("radio"));
    st.radio = radio_from_json(radio, path + ".radio");
    if (item.contains("lpm_file")) {
      const auto file = base_dir / string_or(item, "lpm_file", "", path);
      if (!std::filesystem::exists(file)) throw ConfigError(path + ".lpm_file: file not found: " + file.string());
      st.lpm_file = file;
    }
    s.stations.push_back(std::move(st));
  }

  const json& lpm = section(doc, "lpm", "$");
  s.height_sigma = number_or(lpm, "height_sigma", s.height_sigma, "$.lpm");
  s.prior_strength = number_or(lpm, "prior_strength", s.prior_strength, "$.lpm");
  non_negative(s.height_sigma, "$.lpm.height_sigma");
  positive(s.prior_strength, "$.lpm.prior_strength");

  const json& motion = section(doc, "motion", "$");
  s.dt = number_or(motion, "dt", s.dt, "$.motion");
  s.sigma_d = number_or(motion, "sigma_d", s.sigma_d, "$.motion");
  s.sigma_v = number_or(motion, "sigma_v", s.sigma_v, "$.motion");
  positive(s.dt, "$.motion.dt");
  non_negative(s.sigma_d, "$.motion.sigma_d");
  non_negative(s.sigma_v, "$.motion.sigma_v");

  const json& init = require(doc, "initial_state", "$");
  s.initial.q = vec3(require(init, "q", "$.initial_state"), "$.initial_state.q");
  s.initial.v = vec3(require(init, "v", "$.initial_state"), "$.initial_state.v");

  s.slots = integer_or(doc, "slots", s.slots, "$");
  if (s.slots < 1) throw ConfigError("$.slots: must be >= 1");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
      throw ConfigError("$.seed: expected an integer");
    s.seed = doc.at("seed").get<std::uint64_t>();
  }

  const json& sensing = section(doc, "sensing", "$");
  s.noise.sigma_d0 = number_or(sensing, "sigma_d0", s.noise.sigma_d0, "$.sensing");
  s.noise.sigma_a0 = number_or(sensing, "sigma_a0", s.noise.sigma_a0, "$.sensing");
  s.noise.sigma_v0 = number_or(sensing, "sigma_v0", s.noise.sigma_v0, "$.sensing");
  s.noise.snr_floor = number_or(sensing, "snr_floor", s.noise.snr_floor, "$.sensing");
  s.uav_rcs_scale = number_or(sensing, "uav_rcs_scale", s.uav_rcs_scale, "$.sensing");
  s.blocker.alpha_scale = number_or(sensing, "blocker_alpha_scale", s.blocker.alpha_scale, "$.sensing");
  s.blocker.v_r = number_or(sensing, "blocker_v_r", s.blocker.v_r, "$.sensing");
  non_negative(s.noise.sigma_d0, "$.sensing.sigma_d0");
  non_negative(s.noise.sigma_a0, "$.sensing.sigma_a0");
  non_negative(s.noise.sigma_v0, "$.sensing.sigma_v0");
  non_negative(s.noise.snr_floor, "$.sensing.snr_floor");
  positive(s.uav_rcs_scale, "$.sensing.uav_rcs_scale");
  positive(s.blocker.alpha_scale, "$.sensing.blocker_alpha_scale");

  const json& tracking = section(doc, "tracking", "$");
  const std::string init_mode = string_or(tracking, "init", "first_measurement", "$.tracking");
  if (init_mode == "first_measurement") {
    s.init = InitMode::first_measurement;
  } else if (init_mode == "exact") {
    s.init = InitMode::exact;
  } else {
    throw ConfigError("$.tracking.init: expected \"first_measurement\" or \"exact\"");
  }

  const json& ident = section(doc, "identification", "$");
  s.identification.threshold = number_or(ident, "threshold", s.identification.threshold, "$.identification");
  s.identification.v_max = number_or(ident, "v_max", s.identification.v_max, "$.identification");
  s.identification.d_max = number_or(ident, "d_max", s.identification.d_max, "$.identification");
  s.identification.p_miss_los = number_or(ident, "p_miss_los", s.identification.p_miss_los, "$.identification");
  if (!(s.identification.threshold >= 0.0 && s.identification.threshold <= 1.0))
    throw ConfigError("$.identification.threshold: must be in [0, 1]");
  positive(s.identification.v_max, "$.identification.v_max");
  non_negative(s.identification.d_max, "$.identification.d_max");
  if (!(s.identification.p_miss_los > 0.0 && s.identification.p_miss_los <= 1.0))
    throw ConfigError("$.identification.p_miss_los: must be in (0, 1]");

  const json& beam = section(doc, "beam", "$");
  const std::string mode = string_or(beam, "mode", "predictive", "$.beam");
  if (mode == "predictive") {
    s.beam.mode = BeamMode::predictive;
  } else if (mode == "training") {
    s.beam.mode = BeamMode::training;
  } else {
    throw ConfigError("$.beam.mode: expected \"predictive\" or \"training\"");
  }
  if (beam.contains("codebook")) {
    const json& cb = beam.at("codebook");
    if (!cb.is_array() || cb.size() != 2 || !cb[0].is_number_integer() || !cb[1].is_number_integer())
      throw ConfigError("$.beam.codebook: expected [n_phi, n_theta]");
    s.beam.codebook_phi = cb[0].get<int>();
    s.beam.codebook_theta = cb[1].get<int>();
  }
  if (s.beam.codebook_phi < 1 || s.beam.codebook_theta < 1)
    throw ConfigError("$.beam.codebook: dimensions must be >= 1");
  s.beam.slots_per_beam = integer_or(beam, "slots_per_beam", s.beam.slots_per_beam, "$.beam");
  s.beam.training_period = integer_or(beam, "training_period", s.beam.training_period, "$.beam");
  if (s.beam.slots_per_beam < 0) throw ConfigError("$.beam.slots_per_beam: must be >= 0");
  if (s.beam.training_period < 1) throw ConfigError("$.beam.training_period: must be >= 1");

  const json& rate = section(doc, "rate", "$");
  s.rate.penetration_loss_db = number_or(rate, "penetration_loss_db", s.rate.penetration_loss_db, "$.rate");
  s.rate.handover_delay_slots = integer_or(rate, "handover_delay_slots", s.rate.handover_delay_slots, "$.rate");
  s.rate.handover_enabled = boolean_or(rate, "handover", s.rate.handover_enabled, "$.rate");
  s.rate.revert_threshold = number_or(rate, "revert_threshold", s.rate.revert_threshold, "$.rate");
  s.rate.revert_hold_slots = integer_or(rate, "revert_hold_slots", s.rate.revert_hold_slots, "$.rate");
  s.outage_rate = number_or(rate, "outage_rate", s.outage_rate, "$.rate");
  non_negative(s.rate.penetration_loss_db, "$.rate.penetration_loss_db");
  if (s.rate.handover_delay_slots < 0) throw ConfigError("$.rate.handover_delay_slots: must be >= 0");
  if (s.rate.revert_hold_slots < 1) throw ConfigError("$.rate.revert_hold_slots: must be >= 1");

  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json_text(read_text_file(path), path.parent_path());
}

SimContext make_context(const Scenario& scenario) {
  SimContext ctx;
  ctx.city = std::make_shared<const CityMap>(CityMap::load(scenario.citymap));
  const Region& region = ctx.city->region();
  if (!region.contains(scenario.initial.q)) throw ConfigError("$.initial_state.q: outside region");
  for (std::size_t i = 0; i < scenario.stations.size(); ++i) {
    const StationSpec& spec = scenario.stations[i];
    const std::string path = "$.base_stations[" + std::to_string(i) + "]";
    if (!region.contains(spec.position)) throw ConfigError(path + ".position: outside region");
    BaseStation bs;
    bs.id = spec.id;
    bs.position = spec.position;
    bs.cfg = spec.radio;
    if (spec.lpm_file) {
      auto lpm = load_lpm(*spec.lpm_file);
      if (lpm.bs_position() != spec.position) throw ConfigError(path + ".lpm_file: map built for another position");
      if (!(lpm.region() == region)) throw ConfigError(path + ".lpm_file: map region differs from the city map");
      bs.lpm = std::make_shared<const LosProbabilityMap>(std::move(lpm));
    } else {
      bs.lpm = std::make_shared<const LosProbabilityMap>(
          build_prior(*ctx.city, spec.position, scenario.height_sigma, scenario.prior_strength));
    }
    ctx.stations.push_back(std::move(bs));
  }
  return ctx;
}

}  // namespace lpmsim
