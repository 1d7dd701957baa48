#pragma once

#include "nvodmr/electrometry.hpp"
#include "nvodmr/scene.hpp"
#include "nvodmr/sensing.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nvodmr {

/// Error in a configuration file; `key()` names the offending key.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : InvalidInput(key.empty() ? message : key + ": " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  SceneSpec scene;
  SensitivityOptions sensitivity;

  std::optional<double> scan_frequency;  // MHz; absent: full map
  Vec3 scan_normal = Vec3::UnitZ();      // lab frame

  bool reconstruct_self_test = true;
  std::string reconstruct_input;  // scan-map CSV for input mode
  VectorElectrometryOptions electrometry;

  // Key/value pairs in file order, for the CSV provenance block.
  std::vector<std::pair<std::string, std::string>> entries;
};

/// Parses `key = value` lines ('#' starts a comment). Angles in degrees.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

}  // namespace nvodmr
