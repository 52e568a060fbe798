#pragma once

// Helpers shared by the JSON loaders. Every error names the JSON path it refers to.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lpmsim/citymap.hpp"

namespace lpmsim {

std::string read_text_file(const std::filesystem::path& path);

/// Parses JSON text, converting syntax errors to ParseError with the byte offset.
nlohmann::json parse_json(std::string_view text);

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path);
double number(const nlohmann::json& j, const std::string& path);
double number_or(const nlohmann::json& obj, const char* key, double fallback, const std::string& path);
int integer_or(const nlohmann::json& obj, const char* key, int fallback, const std::string& path);
Vec3 vec3(const nlohmann::json& j, const std::string& path);
Region region_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace lpmsim
