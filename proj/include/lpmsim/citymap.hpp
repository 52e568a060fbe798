#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lpmsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using CellIndex = std::array<int, 3>;

/// Axis-aligned box divided into a regular grid of cells.
class Region {
 public:
  Region(const Vec3& lower, const Vec3& upper, const Vec3& cell_size);

  const Vec3& lower() const { return lower_; }
  const Vec3& upper() const { return upper_; }
  const Vec3& cell_size() const { return cell_size_; }
  const std::array<int, 3>& counts() const { return counts_; }
  std::size_t cell_count() const;

  bool contains(const Vec3& q) const;
  Vec3 clamp(const Vec3& q) const;
  double diagonal() const { return (upper_ - lower_).norm(); }

  Vec3 cell_center(const CellIndex& index) const;
  /// Containing cell; points on an interior cell boundary belong to the lower-index cell.
  CellIndex cell_of(const Vec3& q) const;

  /// Row-major linear index, x slowest and z fastest.
  std::size_t linear_index(const CellIndex& index) const;
  CellIndex unflatten(std::size_t linear) const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  Vec3 lower_;
  Vec3 upper_;
  Vec3 cell_size_;
  std::array<int, 3> counts_;
};

/// Vertical extrusion of a simple polygon from the ground plane.
struct BuildingPrism {
  std::vector<Vec2> footprint;
  double height = 0.0;
};

/// Open parameter interval (t_in, t_out) on a segment.
using Interval = std::pair<double, double>;

/// Parameter intervals in (0,1) where the horizontal projection of a + t(b-a)
/// lies strictly inside the footprint. Grazing contact produces no interval.
std::vector<Interval> footprint_crossings(const BuildingPrism& building, const Vec3& a, const Vec3& b);

struct Blockage {
  bool blocked = false;
  std::optional<Vec3> first_point;
};

class CityMap {
 public:
  CityMap(Region region, std::vector<BuildingPrism> buildings);

  const Region& region() const { return region_; }
  const std::vector<BuildingPrism>& buildings() const { return buildings_; }

  /// Whether the open segment (a,b) enters the interior of any building.
  Blockage segment_blocked(const Vec3& a, const Vec3& b) const;

  static CityMap from_json_text(std::string_view text);
  static CityMap load(const std::filesystem::path& path);

 private:
  Region region_;
  std::vector<BuildingPrism> buildings_;
};

}  // namespace lpmsim
