#pragma once

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "acu/anatomy.hpp"

namespace acu::oracle {

using nlohmann::json;

inline json raw_table() {
  std::ifstream in(std::string(ACU_DATA_DIR) + "/acupoints_default.json");
  return json::parse(in);
}

// Independent expansion of a reference-point recipe into joint weights,
// read straight from the table JSON.
inline std::map<std::string, double> weights(const json& spec) {
  if (spec.contains("joint")) return {{spec.at("joint").get<std::string>(), 1.0}};
  const double r = spec.at("ratio").get<double>();
  std::map<std::string, double> out;
  for (const auto& [k, w] : weights(spec.at("between")[0])) out[k] += (1.0 - r) * w;
  for (const auto& [k, w] : weights(spec.at("between")[1])) out[k] += r * w;
  return out;
}

inline Vec3 expand(const json& entry, const SkeletonFrame& f) {
  const double lambda = entry.at("lambda").get<double>();
  Vec3 p = Vec3::Zero();
  for (const auto& [k, w] : weights(entry.at("p1"))) p += (1.0 - lambda) * w * f.joints.at(k);
  for (const auto& [k, w] : weights(entry.at("p2"))) p += lambda * w * f.joints.at(k);
  return p;
}

}  // namespace acu::oracle
