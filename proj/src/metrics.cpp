#include "lpmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "lpmsim/error.hpp"

namespace lpmsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio(long num, long den) { return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : kNaN; }

}  // namespace

Metrics compute_metrics(std::span<const SlotRecord> records, double outage_rate) {
  if (records.empty()) throw InvalidInput("compute_metrics: no records");
  Metrics m;
  double pos_sq = 0.0, vel_sq = 0.0, rate_sum = 0.0;
  long estimated = 0, correct = 0, nlos = 0, nlos_hit = 0, los = 0, los_false = 0, outage = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SlotRecord& r = records[i];
    if (r.estimate.q.allFinite() && r.estimate.v.allFinite()) {
      pos_sq += (r.estimate.q - r.truth.q).squaredNorm();
      vel_sq += (r.estimate.v - r.truth.v).squaredNorm();
      ++estimated;
    }
    if (r.link_est == r.link_true) ++correct;
    if (r.link_true == LinkState::nlos) {
      ++nlos;
      if (r.link_est == LinkState::nlos) ++nlos_hit;
    } else {
      ++los;
      if (r.link_est == LinkState::nlos) ++los_false;
    }
    rate_sum += r.rate;
    if (r.rate < outage_rate) ++outage;
    if (i > 0 && r.bs_id != records[i - 1].bs_id) ++m.handover_count;
  }
  const auto n = static_cast<long>(records.size());
  m.pos_rmse = estimated > 0 ? std::sqrt(pos_sq / static_cast<double>(estimated)) : kNaN;
  m.vel_rmse = estimated > 0 ? std::sqrt(vel_sq / static_cast<double>(estimated)) : kNaN;
  m.ident_accuracy = ratio(correct, n);
  m.detection_rate = ratio(nlos_hit, nlos);
  m.detection_defined = nlos > 0;
  m.false_alarm_rate = ratio(los_false, los);
  m.false_alarm_defined = los > 0;
  m.mean_rate = rate_sum / static_cast<double>(n);
  m.outage_fraction = ratio(outage, n);
  return m;
}

std::vector<MetricSummary> summarize(std::span<const Metrics> per_run, int resamples, std::uint64_t seed) {
  using Getter = std::function<double(const Metrics&)>;
  const std::vector<std::pair<std::string, Getter>> fields = {
      {"pos_rmse", [](const Metrics& m) { return m.pos_rmse; }},
      {"vel_rmse", [](const Metrics& m) { return m.vel_rmse; }},
      {"ident_accuracy", [](const Metrics& m) { return m.ident_accuracy; }},
      {"detection_rate", [](const Metrics& m) { return m.detection_rate; }},
      {"false_alarm_rate", [](const Metrics& m) { return m.false_alarm_rate; }},
      {"mean_rate", [](const Metrics& m) { return m.mean_rate; }},
      {"outage_fraction", [](const Metrics& m) { return m.outage_fraction; }},
      {"handover_count", [](const Metrics& m) { return static_cast<double>(m.handover_count); }},
  };
  std::vector<MetricSummary> out;
  for (const auto& [name, get] : fields) {
    std::vector<double> values;
    for (const auto& m : per_run) {
      const double v = get(m);
      if (std::isfinite(v)) values.push_back(v);
    }
    MetricSummary s;
    s.name = name;
    s.samples = static_cast<int>(values.size());
    if (values.empty()) {
      s.mean = s.ci_low = s.ci_high = kNaN;
      out.push_back(s);
      continue;
    }
    double total = 0.0;
    for (double v : values) total += v;
    s.mean = total / static_cast<double>(values.size());

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& bm : means) {
      double acc = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) acc += values[pick(rng)];
      bm = acc / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(means.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, means.size() - 1);
      return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
    };
    s.ci_low = quantile(0.025);
    s.ci_high = quantile(0.975);
    out.push_back(s);
  }
  return out;
}

}  // namespace lpmsim
