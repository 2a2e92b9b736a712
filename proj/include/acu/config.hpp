#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "acu/anatomy.hpp"
#include "acu/evaluate.hpp"
#include "acu/manipulation.hpp"
#include "acu/projection.hpp"
#include "acu/scoring.hpp"

namespace acu {

// Global configuration file:
// {"acupoint_table": path, "scoring": {...}, "thresholds": {...},
//  "intrinsics": {...}, "output_dir": path, "min_joint_confidence": 0.5}
// Relative paths are resolved against the config file's directory.
struct GlobalConfig {
  std::optional<std::string> acupoint_table_path;
  ScoringConfig scoring;
  Thresholds thresholds;
  bool contact_radius_explicit = false;
  std::optional<CameraIntrinsics> intrinsics;
  std::string output_dir;
  double min_joint_confidence = kDefaultMinConfidence;
  AcupointTable table = AcupointTable::builtin();

  // Parses and validates; throws Error(InvalidConfig).
  static GlobalConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static GlobalConfig load(const std::string& path);

  EvaluationContext context() const;
};

Thresholds thresholds_from_json(const nlohmann::json& j, bool* contact_radius_set = nullptr);
nlohmann::json thresholds_to_json(const Thresholds& t);

}  // namespace acu
