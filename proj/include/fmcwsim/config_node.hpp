#pragma once

// Strict reader over a parsed JSON configuration object. Every key that is
// present must be consumed before finish(); leftovers are reported as unknown
// keys. Errors carry the dotted key path, e.g. "targets[1].geometry.radius".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fmcwsim/scene.hpp"

namespace fmcwsim {

class ConfigNode {
 public:
  ConfigNode(const nlohmann::json& value, std::string path);

  const std::string& path() const noexcept { return path_; }
  std::string key_path(const std::string& key) const;

  bool has(const std::string& key) const;

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::optional<double> optional_number(const std::string& key);
  std::uint32_t count(const std::string& key, std::uint32_t fallback, std::uint32_t min_value = 0);
  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  Vec3 vec3(const std::string& key);
  Vec3 vec3(const std::string& key, const Vec3& fallback);

  ConfigNode child(const std::string& key);
  std::vector<ConfigNode> children(const std::string& key);
  const nlohmann::json& raw(const std::string& key);

  /// Throws ConfigError naming the first key never read.
  void finish() const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const nlohmann::json& require(const std::string& key);

  const nlohmann::json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

/// Parses JSON text, turning syntax errors into ConfigError with line and
/// column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source_name);
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Builds a Scene from a scene document: either an explicit
/// {sensor, targets, frame_rate, frame_count} description or
/// {"preset": "walker", "walker": {...}}. Angles in the document are degrees.
Scene parse_scene(const nlohmann::json& document, const std::string& path = "");
Scene load_scene(const std::filesystem::path& path);

}  // namespace fmcwsim
