#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lpmsim/citymap.hpp"

namespace lpmsim {

/// Beta(a, b) belief over the LoS indicator of one cell.
struct CellBelief {
  double a = 1.0;  ///< LoS pseudo-count
  double b = 1.0;  ///< NLoS pseudo-count

  double mean() const { return a / (a + b); }
  friend bool operator==(const CellBelief&, const CellBelief&) = default;
};

struct LpmMeta {
  double height_sigma = 2.0;
  double prior_strength = 10.0;
  friend bool operator==(const LpmMeta&, const LpmMeta&) = default;
};

struct LinkProbability {
  double p_los = 1.0;
  double p_nlos = 0.0;
};

struct RfMeasurement {
  Vec3 position;
  bool los_observed = true;
};

/// LoS probability map for one base station over a gridded region.
class LosProbabilityMap {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;
  static constexpr double kMinPseudoCount = 1e-6;

  LosProbabilityMap(Region region, Vec3 bs_position, LpmMeta meta, std::vector<CellBelief> cells);

  const Region& region() const { return region_; }
  const Vec3& bs_position() const { return bs_position_; }
  const LpmMeta& meta() const { return meta_; }
  const std::vector<CellBelief>& cells() const { return cells_; }
  const CellBelief& cell(const CellIndex& index) const { return cells_[region_.linear_index(index)]; }

  /// Piecewise-constant lookup; throws OutOfRegion outside the region.
  LinkProbability query(const Vec3& q) const;

  friend bool operator==(const LosProbabilityMap&, const LosProbabilityMap&) = default;

 private:
  friend LosProbabilityMap update_with_measurements(const LosProbabilityMap&, std::span<const RfMeasurement>);

  Region region_;
  Vec3 bs_position_;
  LpmMeta meta_;
  std::vector<CellBelief> cells_;
};

/// Probability that the segment bs -> q is unobstructed when each building's
/// height is N(nominal, height_sigma^2), independently across buildings.
double prior_los_probability(const CityMap& map, const Vec3& bs, const Vec3& q, double height_sigma);

LosProbabilityMap build_prior(const CityMap& map, const Vec3& bs, double height_sigma = 2.0,
                              double prior_strength = 10.0);

/// Conjugate Beta-Bernoulli refinement, one count per measurement in its cell.
LosProbabilityMap update_with_measurements(const LosProbabilityMap& lpm, std::span<const RfMeasurement> measurements);

std::vector<std::uint8_t> serialize(const LosProbabilityMap& lpm);
LosProbabilityMap deserialize(std::span<const std::uint8_t> bytes);

void save(const LosProbabilityMap& lpm, const std::filesystem::path& path);
LosProbabilityMap load_lpm(const std::filesystem::path& path);

/// Writes `ix,iy,iz,x,y,z,p_los` rows, one per cell.
void export_csv(const LosProbabilityMap& lpm, std::ostream& out);

/// Reads `x,y,z,los` rows (header required; los is 0/1).
std::vector<RfMeasurement> read_measurements_csv(const std::filesystem::path& path);

}  // namespace lpmsim
