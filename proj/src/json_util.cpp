#include "json_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lpmsim/error.hpp"

namespace lpmsim {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed JSON", e.byte);
  }
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "." + key + ": missing required field");
  return *it;
}

double number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
  return v;
}

double number_or(const nlohmann::json& obj, const char* key, double fallback, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return number(obj.at(key), path + "." + key);
}

int integer_or(const nlohmann::json& obj, const char* key, int fallback, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const auto& j = obj.at(key);
  if (!j.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return j.get<int>();
}

Vec3 vec3(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path + ": expected [x, y, z]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]")};
}

Region region_from_json(const nlohmann::json& j, const std::string& path) {
  const Vec3 lower = vec3(require(j, "lower", path), path + ".lower");
  const Vec3 upper = vec3(require(j, "upper", path), path + ".upper");
  const Vec3 cell = vec3(require(j, "cell_size", path), path + ".cell_size");
  for (int i = 0; i < 3; ++i) {
    if (!(lower[i] < upper[i])) throw ConfigError(path + ": lower must be < upper on every axis");
    if (!(cell[i] > 0.0)) throw ConfigError(path + ".cell_size: must be > 0");
  }
  return Region(lower, upper, cell);
}

}  // namespace lpmsim
