// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "../support/oracles.hpp"
#include "lpmsim/beamforming.hpp"
#include "lpmsim/citymap.hpp"
#include "lpmsim/lpm.hpp"
#include "lpmsim/metrics.hpp"
#include "lpmsim/scenario.hpp"
#include "lpmsim/sim.hpp"
#include "lpmsim/tracking.hpp"

using namespace lpmsim;
using std::numbers::pi;

namespace {

const std::filesystem::path kScenarios = LPMSIM_SCENARIO_DIR;
constexpr int kRuns = 200;
constexpr std::uint64_t kRootSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("criterion %d %s %s: %s; %.2f s%s\n", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs,
              budget_s > 0 ? fmt(" (budget %.0f s)", budget_s).c_str() : "");
  std::fflush(stdout);
}

// Sweep-based half-power offset at broadside, where the 8x8 beam is narrowest.
double half_power_offset() {
  const CVec f = steering_vector(0.0, 0.0, 8, 8);
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (beam_gain(f, 0.0, mid, 8, 8) >= 0.5 ? lo : hi) = mid;
  }
  return lo;
}

std::vector<Metrics> per_run_metrics(const std::vector<RunResult>& runs, double outage) {
  std::vector<Metrics> out;
  for (const auto& r : runs) out.push_back(compute_metrics(r.records, outage));
  return out;
}

Outcome steering_identities() {
  double worst_norm = 0.0, worst_gain = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      const double phi = -pi + 2 * pi * i / 64, theta = (pi / 2) * j / 63;
      const CVec a = steering_vector(phi, theta, 8, 8);
      worst_norm = std::max(worst_norm, std::abs(a.norm() - 1.0));
      worst_gain = std::max(worst_gain, std::abs(beam_gain(a, phi, theta, 8, 8) - 1.0));
    }
  }
  return {worst_norm <= 1e-12 && worst_gain <= 1e-12,
          fmt("max | |a|-1 | = %.2e, max |gain-1| = %.2e (tol 1e-12)", worst_norm, worst_gain)};
}

Outcome jacobian_correctness() {
  Rng rng(99);
  std::uniform_real_distribution<double> xy(-300, 300), z(5, 200), v(-30, 30);
  const Vec3 bs(0, 0, 10);
  const std::function<Vec4(const Vec6&)> h = [&](const Vec6& x) { return measurement_fn(x, bs); };
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vec6 x;
    x << xy(rng), xy(rng), bs.z() + z(rng), v(rng), v(rng), v(rng);
    const Mat46 H = measurement_jacobian(x, bs);
    const Mat46 F = oracle::central_difference<4, 6>(h, x, 1e-5);
    for (int i = 0; i < 4; ++i) {
      const double scale = F.row(i).cwiseAbs().maxCoeff();
      for (int j = 0; j < 6; ++j)
        worst = std::max(worst, std::abs(H(i, j) - F(i, j)) / std::max({std::abs(F(i, j)), scale, 1e-300}));
    }
  }
  return {worst < 1e-6, fmt("max relative error %.2e over 100 states (tol 1e-6)", worst)};
}

Outcome filter_consistency() {
  const Scenario s = load_scenario(kScenarios / "nominal_open_sky.json");
  const SimContext ctx = make_context(s);
  const auto runs = run_batch(s, ctx, kRuns, kRootSeed);
  double nees_sum = 0.0, nis_sum = 0.0, se = 0.0, min_snr_db = INFINITY;
  long n_se = 0;
  int nis_runs = 0;
  for (const auto& r : runs) {
    double run_nees = 0.0, run_nis = 0.0;
    int n_nees = 0, n_nis = 0;
    for (const auto& rec : r.records) {
      if (std::isfinite(rec.nees)) {
        run_nees += rec.nees;
        ++n_nees;
      }
      if (std::isfinite(rec.nis)) {
        run_nis += rec.nis;
        ++n_nis;
      }
      if (rec.echo_snr_db >= 20.0 && std::isfinite(rec.estimate.q.x())) {
        se += (rec.estimate.q - rec.truth.q).squaredNorm();
        ++n_se;
      }
      min_snr_db = std::min(min_snr_db, rec.echo_snr_db);
    }
    nees_sum += run_nees / n_nees;
    if (n_nis > 0) {
      nis_sum += run_nis / n_nis;
      ++nis_runs;
    }
  }
  const double nees = nees_sum / kRuns, nis = nis_sum / nis_runs;
  const boost::math::chi_squared chi6(6.0 * kRuns), chi4(4.0 * nis_runs);
  const double lo = boost::math::quantile(chi6, 0.025) / kRuns, hi = boost::math::quantile(chi6, 0.975) / kRuns;
  const double nis_lo = boost::math::quantile(chi4, 0.025) / nis_runs;
  const double nis_hi = boost::math::quantile(chi4, 0.975) / nis_runs;
  const double rmse = std::sqrt(se / static_cast<double>(n_se));
  return {nees >= lo && nees <= hi && rmse < 5.0 && n_se > 0,
          fmt("mean time-averaged NEES %.3f in [%.3f, %.3f]; position RMSE %.3f m (< 5) over %ld slots with echo SNR "
              ">= 20 dB (min echo SNR %.1f dB); NIS %.3f, interval [%.3f, %.3f]",
              nees, lo, hi, rmse, n_se, min_snr_db, nis, nis_lo, nis_hi)};
}

// 20 random rotated rectangles, clipped against an independent Cyrus-Beck oracle.
bool cyrus_beck_blocked(const BuildingPrism& b, const Vec3& a, const Vec3& c) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = c - a;
  auto clip = [&](double num, double den) {
    // Keep t where num + den * t > 0 (strictly inside the half-space).
    if (std::abs(den) < 1e-15) return num > 1e-9;
    const double t = -num / den;
    if (den > 0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
    return true;
  };
  if (!clip(a.z(), d.z()) || !clip(b.height - a.z(), -d.z())) return false;
  const auto& p = b.footprint;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e = p[(i + 1) % p.size()] - p[i];
    const Vec2 inward(-e.y(), e.x());  // counter-clockwise polygon
    const double num = inward.dot(a.head<2>() - p[i]) / inward.norm();
    const double den = inward.dot(d.head<2>()) / inward.norm();
    if (!clip(num, den)) return false;
  }
  return t1 - t0 > 1e-9;
}

Outcome lpm_fidelity() {
  const Region region(Vec3(0, 0, 0), Vec3(500, 500, 100), Vec3(10, 10, 10));
  Rng rng(4242);
  std::uniform_real_distribution<double> cx(60, 440), half(8, 30), ang(0, pi), h(15, 90);
  std::vector<BuildingPrism> buildings;
  for (int i = 0; i < 20; ++i) {
    const Vec2 c(cx(rng), cx(rng));
    const double w = half(rng), l = half(rng), a = ang(rng);
    const Vec2 u(std::cos(a), std::sin(a)), v(-std::sin(a), std::cos(a));
    buildings.push_back({{c - w * u - l * v, c + w * u - l * v, c + w * u + l * v, c - w * u + l * v}, h(rng)});
  }
  const CityMap city(region, buildings);
  const Vec3 bs(250, 250, 25);
  const LosProbabilityMap lpm = build_prior(city, bs, 0.0, 10.0);
  std::size_t agree = 0, blocked = 0;
  for (std::size_t i = 0; i < region.cell_count(); ++i) {
    const Vec3 q = region.cell_center(region.unflatten(i));
    bool oracle_blocked = false;
    for (const auto& b : buildings) oracle_blocked = oracle_blocked || cyrus_beck_blocked(b, bs, q);
    blocked += oracle_blocked;
    const double p = prior_los_probability(city, bs, q, 0.0);
    const bool map_blocked = lpm.cells()[i].mean() < 0.5;
    agree += (p == (oracle_blocked ? 0.0 : 1.0)) && map_blocked == oracle_blocked;
  }

  LosProbabilityMap flat(region, bs, LpmMeta{},
                         std::vector<CellBelief>(region.cell_count(), CellBelief{1.0, 1.0}));
  std::bernoulli_distribution coin(0.7);
  std::vector<RfMeasurement> meas;
  const Vec3 q(105, 205, 55);
  for (int i = 0; i < 10000; ++i) meas.push_back({q, coin(rng)});
  const double p = update_with_measurements(flat, meas).query(q).p_los;

  const double frac = static_cast<double>(agree) / region.cell_count();
  return {agree == region.cell_count() && std::abs(p - 0.7) <= 0.02,
          fmt("prior matches oracle on %zu/%zu cells (%.4f%%, %zu blocked); refined P_LoS %.4f vs 0.7 +- 0.02", agree,
              region.cell_count(), 100.0 * frac, blocked, p)};
}

struct IdentStats {
  long slots = 0, correct = 0, los = 0, false_alarm = 0, nlos = 0, detected = 0;
};

IdentStats ident_stats(const std::vector<RunResult>& runs) {
  IdentStats st;
  for (const auto& r : runs) {
    for (const auto& rec : r.records) {
      if (rec.echo_snr_db < 20.0) continue;
      ++st.slots;
      st.correct += rec.link_est == rec.link_true;
      if (rec.link_true == LinkState::los) {
        ++st.los;
        st.false_alarm += rec.link_est == LinkState::nlos;
      } else {
        ++st.nlos;
        st.detected += rec.link_est == LinkState::nlos;
      }
    }
  }
  return st;
}

Outcome identification_quality() {
  Scenario s = load_scenario(kScenarios / "canyon.json");
  const SimContext ctx = make_context(s);
  std::string detail;
  bool pass = true;
  for (bool handover : {true, false}) {
    s.rate.handover_enabled = handover;
    const IdentStats st = ident_stats(run_batch(s, ctx, kRuns, kRootSeed));
    const double acc = static_cast<double>(st.correct) / st.slots;
    const double fa = static_cast<double>(st.false_alarm) / st.los;
    pass = pass && st.slots > 0 && st.nlos > 0 && acc > 0.95 && fa < 0.05;
    detail += fmt("%shandover %s: accuracy %.5f (> 0.95), false alarm %.5f (< 0.05), detection %.4f over %ld NLoS of "
                  "%ld slots",
                  handover ? "" : "; ", handover ? "on" : "off", acc, fa,
                  st.nlos ? static_cast<double>(st.detected) / st.nlos : NAN, st.nlos, st.slots);
  }
  return {pass, detail};
}

Outcome predictive_benefit() {
  Scenario s = load_scenario(kScenarios / "nominal_open_sky.json");
  const SimContext ctx = make_context(s);
  const auto predictive = run_batch(s, ctx, kRuns, kRootSeed);
  s.beam.mode = BeamMode::training;
  const auto training = run_batch(s, ctx, kRuns, kRootSeed);

  long train_slots = 0, total = 0;
  double rate_train = 0.0, rate_pred = 0.0;
  for (const auto& r : training)
    for (const auto& rec : r.records) {
      train_slots += rec.training;
      rate_train += rec.rate;
      ++total;
    }
  long los_slots = 0, good = 0;
  const double hpbw = half_power_offset();
  for (const auto& r : predictive)
    for (const auto& rec : r.records) {
      rate_pred += rec.rate;
      if (rec.link_true == LinkState::los && rec.pointing_error < hpbw) {
        ++los_slots;
        good += rec.beam_gain >= 0.4;
      }
    }
  const double overhead = static_cast<double>(train_slots) / total;
  const double frac = static_cast<double>(good) / los_slots;
  rate_pred /= total;
  rate_train /= total;
  return {overhead >= 0.05 && rate_pred >= rate_train && los_slots > 0 && frac >= 0.9,
          fmt("training overhead %.1f%% (>= 5%%); mean rate predictive %.3f vs training %.3f bits/s/Hz; gain >= 0.4 "
              "on %.2f%% of %ld LoS slots with pointing error < %.4f rad",
              100 * overhead, rate_pred, rate_train, 100 * frac, los_slots, hpbw)};
}

Outcome handover_benefit() {
  Scenario s = load_scenario(kScenarios / "canyon.json");
  const SimContext ctx = make_context(s);

  // The second station must see the stretch that the first one loses.
  const auto probe = run(s, ctx, kRootSeed);
  long blocked = 0, covered = 0;
  for (const auto& rec : probe.records) {
    if (ctx.city->segment_blocked(ctx.stations[0].position, rec.truth.q).blocked) {
      ++blocked;
      covered += ctx.stations[1].lpm->query(rec.truth.q).p_los > 0.5;
    }
  }

  const auto with = run_batch(s, ctx, kRuns, kRootSeed);
  s.rate.handover_enabled = false;
  const auto without = run_batch(s, ctx, kRuns, kRootSeed);
  double sum_with = 0.0, sum_without = 0.0;
  for (const auto& r : with)
    for (const auto& rec : r.records) sum_with += rec.rate;
  for (const auto& r : without)
    for (const auto& rec : r.records) sum_without += rec.rate;

  const Scenario open = load_scenario(kScenarios / "nominal_open_sky.json");
  long open_handovers = 0;
  for (const auto& m : per_run_metrics(run_batch(open, make_context(open), kRuns, kRootSeed), open.outage_rate))
    open_handovers += m.handover_count;

  return {blocked > 0 && covered == blocked && sum_with > sum_without && open_handovers == 0,
          fmt("station 2 map LoS on %ld/%ld blocked slots; cumulative rate per run with handover %.1f vs without "
              "%.1f; open-sky handovers %ld",
              covered, blocked, sum_with / kRuns, sum_without / kRuns, open_handovers)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "lpmsim_acceptance";
  std::filesystem::create_directories(dir);
  const auto a = dir / "a.csv", b = dir / "b.csv";
  auto invoke = [&](const std::filesystem::path& out) {
    const std::string cmd = std::string("\"") + LPMSIM_CLI + "\" simulate \"" +
                            (kScenarios / "canyon.json").string() + "\" --seed 77 -o \"" + out.string() + "\"";
    return std::system(cmd.c_str());
  };
  const int ra = invoke(a), rb = invoke(b);
  const std::string ta = slurp(a), tb = slurp(b);
  return {ra == 0 && rb == 0 && !ta.empty() && ta == tb,
          fmt("exit codes %d/%d; %zu vs %zu bytes, %s", ra, rb, ta.size(), tb.size(),
              ta == tb ? "identical" : "different")};
}

}  // namespace

int main() {
  report(1, "steering identities", 1, steering_identities);
  report(2, "Jacobian correctness", 1, jacobian_correctness);
  report(3, "filter consistency", 60, filter_consistency);
  report(4, "LPM fidelity", 30, lpm_fidelity);
  report(5, "identification quality", 60, identification_quality);
  report(6, "predictive beamforming benefit", 60, predictive_benefit);
  report(7, "handover benefit", 60, handover_benefit);
  report(8, "end-to-end determinism", 0, cli_determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
