// Command-line front end: map construction, simulation, batch runs and metrics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpmsim/citymap.hpp"
#include "lpmsim/error.hpp"
#include "lpmsim/lpm.hpp"
#include "lpmsim/metrics.hpp"
#include "lpmsim/records_io.hpp"
#include "lpmsim/scenario.hpp"
#include "lpmsim/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFallback = 3;

using namespace lpmsim;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  return out;
}

struct BsSpec {
  Vec3 position;
  double height_sigma = 2.0;
  double prior_strength = 10.0;
};

BsSpec read_bs_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": malformed JSON", e.byte);
  }
  BsSpec spec;
  if (!j.is_object() || !j.contains("position") || !j["position"].is_array() || j["position"].size() != 3)
    throw ConfigError("$.position: expected [x, y, z]");
  for (int i = 0; i < 3; ++i) {
    if (!j["position"][i].is_number()) throw ConfigError("$.position: expected numbers");
    spec.position[i] = j["position"][i].get<double>();
  }
  if (j.contains("height_sigma")) spec.height_sigma = j["height_sigma"].get<double>();
  if (j.contains("prior_strength")) spec.prior_strength = j["prior_strength"].get<double>();
  return spec;
}

void print_metrics(const Metrics& m) {
  std::printf("pos_rmse,%.9g\n", m.pos_rmse);
  std::printf("vel_rmse,%.9g\n", m.vel_rmse);
  std::printf("ident_accuracy,%.9g\n", m.ident_accuracy);
  std::printf("detection_rate,%.9g%s\n", m.detection_rate, m.detection_defined ? "" : ",undefined");
  std::printf("false_alarm_rate,%.9g%s\n", m.false_alarm_rate, m.false_alarm_defined ? "" : ",undefined");
  std::printf("mean_rate,%.9g\n", m.mean_rate);
  std::printf("outage_fraction,%.9g\n", m.outage_fraction);
  std::printf("handover_count,%d\n", m.handover_count);
}

int report_fallbacks(int fallbacks) {
  if (fallbacks == 0) return kExitOk;
  std::cerr << "warning: " << fallbacks << " slot(s) used a fallback path\n";
  return kExitFallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoS-probability-map assisted UAV tracking and beamforming simulator"};
  app.require_subcommand(1);

  std::string map_path, bs_path, lpm_path, measurements_path, scenario_path, records_path, output;
  std::optional<std::uint64_t> seed;
  int runs = 200;
  unsigned threads = 0;
  double outage_rate = 0.1;
  std::string trajectory_path;

  auto* build = app.add_subcommand("build-lpm", "Build the prior LoS probability map for one base station");
  build->add_option("map", map_path, "City map JSON")->required();
  build->add_option("bs", bs_path, "Base station JSON {position, height_sigma, prior_strength}")->required();
  build->add_option("-o,--output", output, "Output LPM file")->required();

  auto* refine = app.add_subcommand("refine-lpm", "Refine an LPM with x,y,z,los measurements");
  refine->add_option("lpm", lpm_path, "LPM file")->required();
  refine->add_option("measurements", measurements_path, "Measurements CSV")->required();
  refine->add_option("-o,--output", output, "Output LPM file (default: overwrite input)");

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write per-slot records");
  simulate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("-o,--output", records_path, "records.csv")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--trajectory", trajectory_path, "Also write the truth trajectory CSV");

  auto* batch = app.add_subcommand("batch", "Run a Monte-Carlo batch and print metric means with 95% CIs");
  batch->add_option("scenario", scenario_path, "Scenario JSON")->required();
  batch->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
  batch->add_option("--seed", seed, "Root seed (default: scenario seed)");
  batch->add_option("--threads", threads, "Worker threads (0 = all cores)");
  batch->add_option("-o,--output", output, "Write the summary CSV here instead of stdout");

  auto* metrics = app.add_subcommand("metrics", "Compute metrics from records.csv");
  metrics->add_option("records", records_path, "records.csv")->required();
  metrics->add_option("--outage-rate", outage_rate, "Outage threshold in bits/s/Hz");

  auto* export_csv_cmd = app.add_subcommand("export-lpm-csv", "Export an LPM as ix,iy,iz,x,y,z,p_los");
  export_csv_cmd->add_option("lpm", lpm_path, "LPM file")->required();
  export_csv_cmd->add_option("-o,--output", output, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*build) {
      const CityMap city = CityMap::load(map_path);
      const BsSpec spec = read_bs_spec(bs_path);
      if (!city.region().contains(spec.position)) throw ConfigError("$.position: outside region");
      save(build_prior(city, spec.position, spec.height_sigma, spec.prior_strength), output);
      return kExitOk;
    }
    if (*refine) {
      const LosProbabilityMap lpm = load_lpm(lpm_path);
      const auto meas = read_measurements_csv(measurements_path);
      save(update_with_measurements(lpm, meas), output.empty() ? lpm_path : output);
      return kExitOk;
    }
    if (*simulate) {
      const Scenario scenario = load_scenario(scenario_path);
      const SimContext ctx = make_context(scenario);
      const RunResult result = run(scenario, ctx, seed.value_or(scenario.seed));
      auto out = open_output(records_path);
      write_records_csv(result.records, out);
      if (!trajectory_path.empty()) {
        auto traj = open_output(trajectory_path);
        write_trajectory_csv(result.records, traj);
      }
      return report_fallbacks(result.fallbacks);
    }
    if (*batch) {
      const Scenario scenario = load_scenario(scenario_path);
      const SimContext ctx = make_context(scenario);
      const auto results = run_batch(scenario, ctx, runs, seed.value_or(scenario.seed), threads);
      std::vector<Metrics> per_run;
      int fallbacks = 0;
      for (const auto& r : results) {
        per_run.push_back(compute_metrics(r.records, scenario.outage_rate));
        fallbacks += r.fallbacks;
      }
      std::string text = "metric,mean,ci_low,ci_high,runs\n";
      char line[256];
      for (const auto& s : summarize(per_run)) {
        std::snprintf(line, sizeof line, "%s,%.9g,%.9g,%.9g,%d\n", s.name.c_str(), s.mean, s.ci_low, s.ci_high,
                      s.samples);
        text += line;
      }
      if (output.empty()) {
        std::cout << text;
      } else {
        open_output(output) << text;
      }
      return report_fallbacks(fallbacks);
    }
    if (*metrics) {
      std::ifstream in(records_path);
      if (!in) throw ConfigError(records_path + ": cannot open file");
      print_metrics(compute_metrics(read_records_csv(in), outage_rate));
      return kExitOk;
    }
    if (*export_csv_cmd) {
      auto out = open_output(output);
      export_csv(load_lpm(lpm_path), out);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedVersion& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OutOfRegion& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
