#pragma once

#include <string>

#include <json.hpp>

#include "acu/error.hpp"
#include "acu/geometry.hpp"

namespace acu::detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, ErrorCode code, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw Error(code, what + ": expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw Error(code, what + ": non-numeric coordinate");
    v[i] = j[i].get<double>();
  }
  if (!v.allFinite()) throw Error(code, what + ": non-finite coordinate");
  return v;
}

inline nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

// Reads an optional numeric field into `out`.
inline void read_number(const nlohmann::json& j, const char* key, double& out, ErrorCode code) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) throw Error(code, std::string("'") + key + "' must be a number");
  out = j.at(key).get<double>();
}

inline void read_int(const nlohmann::json& j, const char* key, int& out, ErrorCode code) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw Error(code, std::string("'") + key + "' must be an integer");
  out = j.at(key).get<int>();
}

}  // namespace acu::detail
