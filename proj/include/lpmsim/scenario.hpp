#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpmsim/association.hpp"
#include "lpmsim/citymap.hpp"
#include "lpmsim/identification.hpp"
#include "lpmsim/kinematics.hpp"
#include "lpmsim/sensing.hpp"

namespace lpmsim {

struct StationSpec {
  int id = 0;
  Vec3 position = Vec3::Zero();
  RadioConfig radio;
  std::optional<std::filesystem::path> lpm_file;  ///< prebuilt map; built from the city map otherwise
};

enum class BeamMode { predictive, training };
enum class InitMode { first_measurement, exact };

struct BeamConfig {
  BeamMode mode = BeamMode::predictive;
  int codebook_phi = 16;
  int codebook_theta = 8;
  int slots_per_beam = 1;
  int training_period = 500;  ///< slots between sweeps in training mode
};

struct Scenario {
  std::filesystem::path citymap;
  std::vector<StationSpec> stations;  ///< the first entry is the default (home) station
  double height_sigma = 2.0;
  double prior_strength = 10.0;

  double dt = 0.02;
  double sigma_d = 0.1;
  double sigma_v = 0.1;
  UavState initial;
  int slots = 500;
  std::uint64_t seed = 1;

  SensingNoise noise;
  BlockerModel blocker;
  double uav_rcs_scale = 1.0;

  InitMode init = InitMode::first_measurement;
  IdentificationConfig identification;
  BeamConfig beam;
  RateConfig rate;
  double outage_rate = 0.1;  ///< bits/s/Hz
};

/// Parses and validates a scenario document; relative paths resolve against `base_dir`.
Scenario scenario_from_json_text(const std::string& text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Immutable per-scenario data shared by every run: the city and per-station maps.
struct SimContext {
  std::shared_ptr<const CityMap> city;
  std::vector<BaseStation> stations;
};

SimContext make_context(const Scenario& scenario);

}  // namespace lpmsim
