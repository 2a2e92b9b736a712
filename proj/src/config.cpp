#include "acu/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "json_util.hpp"

namespace acu {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr auto kCfg = ErrorCode::InvalidConfig;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (known.count(key) == 0) throw Error(kCfg, where + ": unknown key '" + key + "'");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  const fs::path p(path);
  return p.is_absolute() ? p.string() : (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

Thresholds thresholds_from_json(const json& j, bool* contact_radius_set) {
  if (!j.is_object()) throw Error(kCfg, "thresholds must be an object");
  reject_unknown(j,
                 {"stationary_band", "whirl_angle_deg", "whirl_speed", "whirl_frame_count", "twist_deadband",
                  "contact_radius", "smoothing_window", "speed_margin", "cycle_prominence"},
                 "thresholds");
  Thresholds t;
  detail::read_number(j, "stationary_band", t.stationary_band, kCfg);
  detail::read_number(j, "whirl_angle_deg", t.whirl_angle_deg, kCfg);
  detail::read_number(j, "whirl_speed", t.whirl_speed, kCfg);
  detail::read_int(j, "whirl_frame_count", t.whirl_frame_count, kCfg);
  detail::read_number(j, "twist_deadband", t.twist_deadband, kCfg);
  detail::read_number(j, "contact_radius", t.contact_radius, kCfg);
  detail::read_int(j, "smoothing_window", t.smoothing_window, kCfg);
  detail::read_number(j, "speed_margin", t.speed_margin, kCfg);
  detail::read_number(j, "cycle_prominence", t.cycle_prominence, kCfg);
  if (contact_radius_set) *contact_radius_set = j.contains("contact_radius");
  t.validate();
  return t;
}

json thresholds_to_json(const Thresholds& t) {
  return {{"stationary_band", t.stationary_band},   {"whirl_angle_deg", t.whirl_angle_deg},
          {"whirl_speed", t.whirl_speed},           {"whirl_frame_count", t.whirl_frame_count},
          {"twist_deadband", t.twist_deadband},     {"contact_radius", t.contact_radius},
          {"smoothing_window", t.smoothing_window}, {"speed_margin", t.speed_margin},
          {"cycle_prominence", t.cycle_prominence}};
}

GlobalConfig GlobalConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(kCfg, "config must be a JSON object");
  reject_unknown(j, {"acupoint_table", "scoring", "thresholds", "intrinsics", "output_dir", "min_joint_confidence"},
                 "config");
  GlobalConfig c;
  try {
    if (j.contains("acupoint_table")) {
      if (!j.at("acupoint_table").is_string()) throw Error(kCfg, "'acupoint_table' must be a path");
      c.acupoint_table_path = resolve(j.at("acupoint_table").get<std::string>(), base_dir);
      c.table = AcupointTable::load(*c.acupoint_table_path);
    }
    if (j.contains("scoring")) c.scoring = ScoringConfig::from_json(j.at("scoring"));
    c.scoring.validate();
    if (j.contains("thresholds")) c.thresholds = thresholds_from_json(j.at("thresholds"), &c.contact_radius_explicit);
    if (j.contains("intrinsics")) c.intrinsics = CameraIntrinsics::from_json(j.at("intrinsics"));
    if (j.contains("output_dir")) {
      if (!j.at("output_dir").is_string()) throw Error(kCfg, "'output_dir' must be a path");
      c.output_dir = resolve(j.at("output_dir").get<std::string>(), base_dir);
    }
    detail::read_number(j, "min_joint_confidence", c.min_joint_confidence, kCfg);
    if (!(c.min_joint_confidence >= 0.0 && c.min_joint_confidence <= 1.0))
      throw Error(kCfg, "min_joint_confidence must be in [0, 1]");
  } catch (const Error& e) {
    if (e.code() == kCfg) throw;
    throw Error(kCfg, e.what());
  } catch (const json::exception& e) {
    throw Error(kCfg, e.what());
  }
  return c;
}

GlobalConfig GlobalConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(kCfg, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(kCfg, path + ": " + e.what());
  }
  const auto dir = fs::path(path).parent_path();
  return from_json(j, dir.empty() ? "." : dir.string());
}

EvaluationContext GlobalConfig::context() const {
  EvaluationContext ctx;
  ctx.scoring = scoring;
  ctx.thresholds = thresholds;
  ctx.contact_radius_from_region = !contact_radius_explicit;
  ctx.table = &table;
  return ctx;
}

}  // namespace acu
