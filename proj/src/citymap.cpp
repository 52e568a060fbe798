#include "lpmsim/citymap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lpmsim/error.hpp"
#include "json_util.hpp"

namespace lpmsim {
namespace {

// Boundary tolerance for the strict-interior test, in meters.
constexpr double kBoundaryEps = 1e-9;

double cross(const Vec2& u, const Vec2& w) { return u.x() * w.y() - u.y() * w.x(); }

double distance_to_edge(const Vec2& p, const Vec2& u, const Vec2& w) {
  const Vec2 e = w - u;
  const double len2 = e.squaredNorm();
  double t = len2 > 0.0 ? (p - u).dot(e) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (u + t * e)).norm();
}

bool strictly_inside(const std::vector<Vec2>& poly, const Vec2& p) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& u = poly[i];
    const Vec2& w = poly[j];
    if (distance_to_edge(p, u, w) <= kBoundaryEps) return false;
    if ((u.y() > p.y()) != (w.y() > p.y())) {
      const double x = u.x() + (p.y() - u.y()) * (w.x() - u.x()) / (w.y() - u.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= c.y() &&
           c.y() <= std::max(a.y(), b.y());
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

bool is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[(i + 1) % n] - poly[i]).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace

Region::Region(const Vec3& lower, const Vec3& upper, const Vec3& cell_size)
    : lower_(lower), upper_(upper), cell_size_(cell_size) {
  for (int i = 0; i < 3; ++i) {
    if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i]))
      throw InvalidInput("region: lower must be < upper on every axis");
    if (!(std::isfinite(cell_size[i]) && cell_size[i] > 0.0)) throw InvalidInput("region: cell_size must be > 0");
    counts_[i] = static_cast<int>(std::ceil((upper[i] - lower[i]) / cell_size[i]));
  }
}

std::size_t Region::cell_count() const {
  return static_cast<std::size_t>(counts_[0]) * static_cast<std::size_t>(counts_[1]) *
         static_cast<std::size_t>(counts_[2]);
}

bool Region::contains(const Vec3& q) const {
  return (q.array() >= lower_.array()).all() && (q.array() <= upper_.array()).all();
}

Vec3 Region::clamp(const Vec3& q) const { return q.cwiseMax(lower_).cwiseMin(upper_); }

Vec3 Region::cell_center(const CellIndex& index) const {
  for (int i = 0; i < 3; ++i) {
    if (index[i] < 0 || index[i] >= counts_[i]) throw OutOfRegion("cell index out of range");
  }
  const Vec3 idx(index[0], index[1], index[2]);
  return lower_ + ((idx.array() + 0.5) * cell_size_.array()).matrix();
}

CellIndex Region::cell_of(const Vec3& q) const {
  if (!contains(q)) throw OutOfRegion("position outside region");
  CellIndex out{};
  for (int i = 0; i < 3; ++i) {
    const double r = (q[i] - lower_[i]) / cell_size_[i];
    int k = static_cast<int>(std::ceil(r)) - 1;
    out[i] = std::clamp(k, 0, counts_[i] - 1);
  }
  return out;
}

std::size_t Region::linear_index(const CellIndex& index) const {
  return (static_cast<std::size_t>(index[0]) * counts_[1] + index[1]) * counts_[2] + index[2];
}

CellIndex Region::unflatten(std::size_t linear) const {
  CellIndex out{};
  out[2] = static_cast<int>(linear % counts_[2]);
  linear /= counts_[2];
  out[1] = static_cast<int>(linear % counts_[1]);
  out[0] = static_cast<int>(linear / counts_[1]);
  return out;
}

std::vector<Interval> footprint_crossings(const BuildingPrism& building, const Vec3& a, const Vec3& b) {
  const auto& poly = building.footprint;
  const Vec2 p0 = a.head<2>();
  const Vec2 dir = b.head<2>() - p0;
  std::vector<Interval> out;

  if (dir.norm() < 1e-12) {
    if (strictly_inside(poly, p0)) out.emplace_back(0.0, 1.0);
    return out;
  }

  std::vector<double> ts{0.0, 1.0};
  const double dir_len = dir.norm();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& u = poly[i];
    const Vec2 e = poly[(i + 1) % n] - u;
    const double denom = cross(dir, e);
    if (std::abs(denom) > 1e-15 * dir_len * e.norm()) {
      const double t = cross(u - p0, e) / denom;
      const double s = cross(u - p0, dir) / denom;
      if (s >= -1e-12 && s <= 1.0 + 1e-12 && t > 0.0 && t < 1.0) ts.push_back(t);
    }
    // Vertices on the line bound collinear runs along an edge.
    if (std::abs(cross(dir, u - p0)) / dir_len <= kBoundaryEps) {
      const double t = (u - p0).dot(dir) / (dir_len * dir_len);
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());

  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t0 = ts[i];
    const double t1 = ts[i + 1];
    if (t1 - t0 <= 0.0) continue;
    const Vec2 mid = p0 + 0.5 * (t0 + t1) * dir;
    if (!strictly_inside(poly, mid)) continue;
    if (!out.empty() && out.back().second == t0) {
      out.back().second = t1;
    } else {
      out.emplace_back(t0, t1);
    }
  }
  return out;
}

CityMap::CityMap(Region region, std::vector<BuildingPrism> buildings)
    : region_(std::move(region)), buildings_(std::move(buildings)) {
  for (std::size_t i = 0; i < buildings_.size(); ++i) {
    const auto& b = buildings_[i];
    const std::string where = "buildings[" + std::to_string(i) + "]";
    if (b.footprint.size() < 3) throw InvalidInput(where + ".footprint: needs at least 3 vertices");
    if (!(std::isfinite(b.height) && b.height > 0.0)) throw InvalidInput(where + ".height: must be > 0");
    for (const auto& v : b.footprint) {
      if (v.x() < region_.lower().x() || v.x() > region_.upper().x() || v.y() < region_.lower().y() ||
          v.y() > region_.upper().y())
        throw InvalidInput(where + ".footprint: vertex outside region");
    }
    if (!is_simple(b.footprint)) throw InvalidInput(where + ".footprint: polygon is not simple");
  }
}

Blockage CityMap::segment_blocked(const Vec3& a, const Vec3& b) const {
  if (a == b) throw InvalidInput("segment_blocked: degenerate segment");
  Blockage result;
  double best_t = 2.0;
  for (const auto& building : buildings_) {
    const double h = building.height;
    for (const auto& [t0, t1] : footprint_crossings(building, a, b)) {
      const double z0 = a.z() + t0 * (b.z() - a.z());
      const double z1 = a.z() + t1 * (b.z() - a.z());
      if (std::min(z0, z1) >= h) continue;
      // Entry through a facade, or through the roof when descending.
      const double t = z0 < h ? t0 : t0 + (z0 - h) / (z0 - z1) * (t1 - t0);
      if (t < best_t) best_t = t;
    }
  }
  if (best_t <= 1.0) {
    result.blocked = true;
    result.first_point = a + best_t * (b - a);
  }
  return result;
}

CityMap CityMap::from_json_text(std::string_view text) {
  const nlohmann::json doc = parse_json(text);
  Region region = region_from_json(require(doc, "region", "$"), "$.region");
  std::vector<BuildingPrism> buildings;
  if (doc.contains("buildings")) {
    const auto& list = doc.at("buildings");
    if (!list.is_array()) throw ConfigError("$.buildings: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "$.buildings[" + std::to_string(i) + "]";
      const auto& item = list[i];
      BuildingPrism b;
      const auto& fp = require(item, "footprint", path);
      if (!fp.is_array()) throw ConfigError(path + ".footprint: expected an array");
      for (std::size_t k = 0; k < fp.size(); ++k) {
        const std::string vpath = path + ".footprint[" + std::to_string(k) + "]";
        if (!fp[k].is_array() || fp[k].size() != 2) throw ConfigError(vpath + ": expected [x, y]");
        b.footprint.emplace_back(number(fp[k][0], vpath), number(fp[k][1], vpath));
      }
      b.height = number(require(item, "height", path), path + ".height");
      buildings.push_back(std::move(b));
    }
  }
  try {
    return CityMap(std::move(region), std::move(buildings));
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("$.") + e.what());
  }
}

CityMap CityMap::load(const std::filesystem::path& path) { return from_json_text(read_text_file(path)); }

}  // namespace lpmsim
