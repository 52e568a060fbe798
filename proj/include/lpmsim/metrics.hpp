#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpmsim/sim.hpp"

namespace lpmsim {

/// Summary statistics of one run. Positive class for detection is NLoS.
struct Metrics {
  double pos_rmse = 0.0;
  double vel_rmse = 0.0;
  double ident_accuracy = 0.0;
  double detection_rate = 0.0;    ///< P(decide NLoS | NLoS); NaN when no NLoS slots
  double false_alarm_rate = 0.0;  ///< P(decide NLoS | LoS); NaN when no LoS slots
  bool detection_defined = true;
  bool false_alarm_defined = true;
  double mean_rate = 0.0;
  double outage_fraction = 0.0;
  int handover_count = 0;
};

/// Uses only the columns written to records.csv. Slots without an estimate are
/// excluded from the RMSE terms.
Metrics compute_metrics(std::span<const SlotRecord> records, double outage_rate = 0.1);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int samples = 0;  ///< runs where the metric was defined
};

/// Mean and percentile-bootstrap 95% interval of each metric over runs.
std::vector<MetricSummary> summarize(std::span<const Metrics> per_run, int resamples = 1000,
                                     std::uint64_t seed = 0x5eed);

}  // namespace lpmsim
