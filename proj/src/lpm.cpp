#include "lpmsim/lpm.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <optional>
#include <sstream>

#include "lpmsim/error.hpp"

namespace lpmsim {
namespace {

static_assert(std::endian::native == std::endian::little, "LPM binary format is little-endian");

constexpr char kMagic[4] = {'L', 'P', 'M', 'B'};

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put(const Vec3& v) {
    for (int i = 0; i < 3; ++i) put(v[i]);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ParseError("unexpected end of LPM data", bytes_.size());
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  Vec3 get_vec3() {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = get<double>();
    return v;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

LosProbabilityMap::LosProbabilityMap(Region region, Vec3 bs_position, LpmMeta meta, std::vector<CellBelief> cells)
    : region_(std::move(region)), bs_position_(std::move(bs_position)), meta_(meta), cells_(std::move(cells)) {
  if (cells_.size() != region_.cell_count()) throw InvalidInput("LPM cell count does not match region");
  for (const auto& c : cells_) {
    if (!(std::isfinite(c.a) && std::isfinite(c.b) && c.a > 0.0 && c.b > 0.0))
      throw InvalidInput("LPM pseudo-counts must be finite and > 0");
  }
}

LinkProbability LosProbabilityMap::query(const Vec3& q) const {
  const double p = cells_[region_.linear_index(region_.cell_of(q))].mean();
  return {p, 1.0 - p};
}

double prior_los_probability(const CityMap& map, const Vec3& bs, const Vec3& q, double height_sigma) {
  if (bs == q) return 1.0;
  double p = 1.0;
  for (const auto& building : map.buildings()) {
    const auto crossings = footprint_crossings(building, bs, q);
    if (crossings.empty()) continue;
    double z_min = std::numeric_limits<double>::infinity();
    for (const auto& [t0, t1] : crossings) {
      z_min = std::min({z_min, bs.z() + t0 * (q.z() - bs.z()), bs.z() + t1 * (q.z() - bs.z())});
    }
    if (height_sigma == 0.0) {
      if (z_min < building.height) return 0.0;
    } else {
      p *= standard_normal_cdf((z_min - building.height) / height_sigma);
    }
  }
  return p;
}

LosProbabilityMap build_prior(const CityMap& map, const Vec3& bs, double height_sigma, double prior_strength) {
  const Region& region = map.region();
  if (!region.contains(bs)) throw InvalidInput("build_prior: base station outside region");
  if (!(height_sigma >= 0.0)) throw InvalidInput("build_prior: height_sigma must be >= 0");
  if (!(prior_strength > 0.0)) throw InvalidInput("build_prior: prior_strength must be > 0");

  std::vector<CellBelief> cells(region.cell_count());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Vec3 center = region.cell_center(region.unflatten(i));
    const double p = prior_los_probability(map, bs, center, height_sigma);
    cells[i].a = std::max(prior_strength * p, LosProbabilityMap::kMinPseudoCount);
    cells[i].b = std::max(prior_strength * (1.0 - p), LosProbabilityMap::kMinPseudoCount);
  }
  return LosProbabilityMap(region, bs, LpmMeta{height_sigma, prior_strength}, std::move(cells));
}

LosProbabilityMap update_with_measurements(const LosProbabilityMap& lpm,
                                           std::span<const RfMeasurement> measurements) {
  const Region& region = lpm.region();
  std::vector<std::size_t> targets;
  targets.reserve(measurements.size());
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    if (!region.contains(measurements[i].position))
      throw OutOfRegion("measurement[" + std::to_string(i) + "] outside region");
    targets.push_back(region.linear_index(region.cell_of(measurements[i].position)));
  }
  // Integer tallies keep the result independent of measurement order.
  std::vector<std::uint64_t> los(region.cell_count(), 0), nlos(region.cell_count(), 0);
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    ++(measurements[i].los_observed ? los : nlos)[targets[i]];
  }
  LosProbabilityMap out = lpm;
  for (std::size_t c = 0; c < out.cells_.size(); ++c) {
    out.cells_[c].a += static_cast<double>(los[c]);
    out.cells_[c].b += static_cast<double>(nlos[c]);
  }
  return out;
}

std::vector<std::uint8_t> serialize(const LosProbabilityMap& lpm) {
  Writer w;
  for (char c : kMagic) w.put(c);
  w.put(LosProbabilityMap::kFormatVersion);
  const Region& r = lpm.region();
  w.put(r.lower());
  w.put(r.upper());
  w.put(r.cell_size());
  for (int n : r.counts()) w.put(static_cast<std::int32_t>(n));
  w.put(lpm.bs_position());
  w.put(lpm.meta().height_sigma);
  w.put(lpm.meta().prior_strength);
  w.put(static_cast<std::uint64_t>(lpm.cells().size()));
  for (const auto& c : lpm.cells()) {
    w.put(c.a);
    w.put(c.b);
  }
  return w.take();
}

LosProbabilityMap deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    const std::size_t at = r.pos();
    if (r.get<char>() != c) throw ParseError("bad LPM magic", at);
  }
  const auto version = r.get<std::uint32_t>();
  if (version != LosProbabilityMap::kFormatVersion)
    throw UnsupportedVersion("unsupported LPM format version " + std::to_string(version));

  std::size_t at = r.pos();
  const Vec3 lower = r.get_vec3();
  const Vec3 upper = r.get_vec3();
  const Vec3 cell_size = r.get_vec3();
  std::array<std::int32_t, 3> counts{};
  for (auto& n : counts) n = r.get<std::int32_t>();
  std::optional<Region> region;
  try {
    region.emplace(lower, upper, cell_size);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid region: ") + e.what(), at);
  }
  for (int i = 0; i < 3; ++i) {
    if (counts[i] != region->counts()[i]) throw ParseError("cell counts disagree with region", at);
  }
  const Vec3 bs = r.get_vec3();
  LpmMeta meta;
  meta.height_sigma = r.get<double>();
  meta.prior_strength = r.get<double>();
  at = r.pos();
  const auto n_cells = r.get<std::uint64_t>();
  if (n_cells != region->cell_count()) throw ParseError("cell count disagrees with region", at);

  std::vector<CellBelief> cells(n_cells);
  for (auto& c : cells) {
    at = r.pos();
    c.a = r.get<double>();
    c.b = r.get<double>();
    if (!(std::isfinite(c.a) && std::isfinite(c.b) && c.a > 0.0 && c.b > 0.0))
      throw ParseError("non-positive pseudo-count", at);
  }
  if (!r.done()) throw ParseError("trailing bytes after LPM data", r.pos());
  return LosProbabilityMap(*region, bs, meta, std::move(cells));
}

void save(const LosProbabilityMap& lpm, const std::filesystem::path& path) {
  const auto bytes = serialize(lpm);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

LosProbabilityMap load_lpm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

void export_csv(const LosProbabilityMap& lpm, std::ostream& out) {
  const Region& r = lpm.region();
  out << "ix,iy,iz,x,y,z,p_los\n";
  char line[256];
  for (std::size_t i = 0; i < lpm.cells().size(); ++i) {
    const CellIndex idx = r.unflatten(i);
    const Vec3 c = r.cell_center(idx);
    std::snprintf(line, sizeof line, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", idx[0], idx[1], idx[2], c.x(), c.y(),
                  c.z(), lpm.cells()[i].mean());
    out << line;
  }
}

std::vector<RfMeasurement> read_measurements_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line)) throw ParseError("empty measurements file", 0);
  offset += line.size() + 1;
  std::vector<RfMeasurement> out;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    std::istringstream ss(line);
    RfMeasurement m;
    char c1 = 0, c2 = 0, c3 = 0;
    int los = -1;
    if (!(ss >> m.position.x() >> c1 >> m.position.y() >> c2 >> m.position.z() >> c3 >> los) || c1 != ',' ||
        c2 != ',' || c3 != ',' || (los != 0 && los != 1))
      throw ParseError("malformed measurement row", line_start);
    m.los_observed = los == 1;
    out.push_back(m);
  }
  return out;
}

}  // namespace lpmsim
