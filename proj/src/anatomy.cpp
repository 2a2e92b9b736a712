#include "acu/anatomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "acupoints_default_data.hpp"
#include "json_util.hpp"

namespace acu {

using nlohmann::json;

const std::vector<std::string>& known_joint_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {
        "nose", "left_eye_inner", "left_eye", "left_eye_outer", "right_eye_inner", "right_eye",
        "right_eye_outer", "left_ear", "right_ear", "mouth_left", "mouth_right", "left_shoulder",
        "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist", "left_pinky",
        "right_pinky", "left_index", "right_index", "left_thumb", "right_thumb", "left_hip",
        "right_hip", "left_knee", "right_knee", "left_ankle", "right_ankle", "left_heel",
        "right_heel", "left_foot_index", "right_foot_index",
    };
    const char* hand[] = {
        "wrist", "thumb_cmc", "thumb_mcp", "thumb_ip", "thumb_tip",
        "index_finger_mcp", "index_finger_pip", "index_finger_dip", "index_finger_tip",
        "middle_finger_mcp", "middle_finger_pip", "middle_finger_dip", "middle_finger_tip",
        "ring_finger_mcp", "ring_finger_pip", "ring_finger_dip", "ring_finger_tip",
        "pinky_mcp", "pinky_pip", "pinky_dip", "pinky_tip",
    };
    for (const char* side : {"left_hand_", "right_hand_"})
      for (const char* h : hand) v.push_back(std::string(side) + h);
    return v;
  }();
  return names;
}

bool is_known_joint(std::string_view name) {
  const auto& names = known_joint_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

// ---- SkeletonFrame ---------------------------------------------------------

const Vec3* SkeletonFrame::find(std::string_view id) const {
  const auto it = joints.find(std::string(id));
  return it == joints.end() ? nullptr : &it->second;
}

const Vec3& SkeletonFrame::at(std::string_view id) const {
  if (const Vec3* p = find(id)) return *p;
  throw Error(ErrorCode::MissingJoint, std::string(id));
}

SkeletonFrame SkeletonFrame::without_low_confidence(double threshold) const {
  SkeletonFrame out;
  out.timestamp = timestamp;
  for (const auto& [id, pos] : joints) {
    const auto c = confidence.find(id);
    if (c != confidence.end() && c->second < threshold) continue;
    out.joints.emplace(id, pos);
    if (c != confidence.end()) out.confidence.emplace(id, c->second);
  }
  return out;
}

SkeletonFrame SkeletonFrame::from_json(const json& j, double min_confidence) {
  if (!j.is_object() || !j.contains("joints") || !j.at("joints").is_object())
    throw Error(ErrorCode::InvalidInput, "skeleton frame needs a 'joints' object");
  SkeletonFrame f;
  detail::read_number(j, "timestamp", f.timestamp, ErrorCode::InvalidInput);
  for (const auto& [id, v] : j.at("joints").items()) {
    if (v.is_array()) {
      f.joints.emplace(id, detail::vec3_from_json(v, ErrorCode::InvalidInput, "joint " + id));
      continue;
    }
    if (!v.is_object() || !v.contains("position"))
      throw Error(ErrorCode::InvalidInput, "joint " + id + ": expected [x,y,z] or {position, confidence}");
    f.joints.emplace(id, detail::vec3_from_json(v.at("position"), ErrorCode::InvalidInput, "joint " + id));
    if (v.contains("confidence")) {
      const double c = v.at("confidence").get<double>();
      if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidInput, "joint " + id + ": confidence outside [0,1]");
      f.confidence.emplace(id, c);
    }
  }
  return f.without_low_confidence(min_confidence);
}

// ---- ReferencePointSpec ----------------------------------------------------

ReferencePointSpec ReferencePointSpec::joint(JointId id) {
  ReferencePointSpec s;
  s.node_ = std::move(id);
  return s;
}

ReferencePointSpec ReferencePointSpec::between(ReferencePointSpec a, ReferencePointSpec b, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error(ErrorCode::InvalidConfig, "interpolation ratio outside [0,1]");
  ReferencePointSpec s;
  s.node_ = std::make_shared<const Between>(Between{std::move(a), std::move(b), ratio});
  return s;
}

int ReferencePointSpec::depth() const {
  if (is_joint()) return 0;
  const auto& b = interpolation();
  return 1 + std::max(b.a.depth(), b.b.depth());
}

void ReferencePointSpec::collect_joints(std::vector<JointId>& out) const {
  if (is_joint()) {
    out.push_back(joint_id());
    return;
  }
  interpolation().a.collect_joints(out);
  interpolation().b.collect_joints(out);
}

ReferencePointSpec ReferencePointSpec::from_json(const json& j) {
  if (j.is_object() && j.contains("joint")) {
    if (!j.at("joint").is_string() || j.at("joint").get<std::string>().empty())
      throw Error(ErrorCode::InvalidConfig, "'joint' must be a non-empty string");
    return joint(j.at("joint").get<std::string>());
  }
  if (j.is_object() && j.contains("between")) {
    const auto& pair = j.at("between");
    if (!pair.is_array() || pair.size() != 2) throw Error(ErrorCode::InvalidConfig, "'between' needs two specs");
    if (!j.contains("ratio") || !j.at("ratio").is_number())
      throw Error(ErrorCode::InvalidConfig, "'between' needs a numeric 'ratio'");
    return between(from_json(pair[0]), from_json(pair[1]), j.at("ratio").get<double>());
  }
  throw Error(ErrorCode::InvalidConfig, "reference point must be {joint} or {between, ratio}");
}

json ReferencePointSpec::to_json() const {
  if (is_joint()) return json{{"joint", joint_id()}};
  const auto& b = interpolation();
  return json{{"between", json::array({b.a.to_json(), b.b.to_json()})}, {"ratio", b.ratio}};
}

// ---- regions ---------------------------------------------------------------

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Hand: return "hand";
    case Region::Limb: return "limb";
    case Region::Torso: return "torso";
  }
  return "hand";
}

std::optional<Region> parse_region(std::string_view s) {
  if (s == "hand" || s == "Hand") return Region::Hand;
  if (s == "limb" || s == "Limb" || s == "limbs") return Region::Limb;
  if (s == "torso" || s == "Torso") return Region::Torso;
  return std::nullopt;
}

RegionCriteria criteria_for(Region r) {
  switch (r) {
    case Region::Hand: return {0.56, 1.13};
    case Region::Limb: return {0.94, 1.90};
    case Region::Torso: return {1.16, 2.14};
  }
  return {0.56, 1.13};
}

std::pair<AcupointId, AcupointId> default_norm_pair(Region r) {
  if (r == Region::Hand) return {"EX-UE10", "EX-UE11"};
  return {"LU5", "PC7"};
}

// ---- AcupointTable ---------------------------------------------------------

namespace {

DepthBounds depth_from_cun(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidConfig, what + ": expected 4 values in cun");
  DepthBounds b{j[0].get<double>() * kCmPerCun, j[1].get<double>() * kCmPerCun, j[2].get<double>() * kCmPerCun,
                j[3].get<double>() * kCmPerCun};
  if (!(b.lower < b.min && b.min < b.max && b.max < b.upper))
    throw Error(ErrorCode::InvalidConfig, what + ": bounds must be strictly increasing");
  return b;
}

AcupointDef def_from_json(const json& j) {
  AcupointDef d;
  if (!j.contains("id") || !j.at("id").is_string()) throw Error(ErrorCode::InvalidConfig, "acupoint without id");
  d.id = j.at("id").get<std::string>();
  d.name = j.value("name", d.id);
  const auto region = parse_region(j.value("region", std::string("hand")));
  if (!region) throw Error(ErrorCode::InvalidConfig, d.id + ": unknown region");
  d.region = *region;
  if (!j.contains("p1") || !j.contains("p2")) throw Error(ErrorCode::InvalidConfig, d.id + ": needs p1 and p2");
  d.p1 = ReferencePointSpec::from_json(j.at("p1"));
  d.p2 = ReferencePointSpec::from_json(j.at("p2"));
  if (!j.contains("lambda") || !j.at("lambda").is_number())
    throw Error(ErrorCode::InvalidConfig, d.id + ": needs numeric lambda");
  d.lambda = j.at("lambda").get<double>();
  if (j.contains("meta")) {
    for (const auto& [k, v] : j.at("meta").items()) d.meta.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
  }
  if (j.contains("needling")) {
    const auto& n = j.at("needling");
    NeedlingSpec spec;
    if (n.contains("insertion")) {
      const auto c = parse_insertion_class(n.at("insertion").get<std::string>());
      if (!c) throw Error(ErrorCode::InvalidConfig, d.id + ": unknown insertion class");
      spec.insertion = *c;
    }
    if (n.contains("deep_cun")) spec.deep = depth_from_cun(n.at("deep_cun"), d.id + " deep_cun");
    if (n.contains("shallow_cun")) spec.shallow = depth_from_cun(n.at("shallow_cun"), d.id + " shallow_cun");
    d.needling = spec;
  }
  return d;
}

}  // namespace

AcupointTable::AcupointTable(std::string version, std::vector<AcupointDef> defs)
    : version_(std::move(version)), defs_(std::move(defs)) {
  for (std::size_t i = 0; i < defs_.size(); ++i) {
    const auto& d = defs_[i];
    if (d.id.empty()) throw Error(ErrorCode::InvalidConfig, "acupoint with empty id");
    if (!(d.lambda >= 0.0 && d.lambda <= 1.0)) throw Error(ErrorCode::InvalidConfig, d.id + ": lambda outside [0,1]");
    if (d.p1.depth() > ReferencePointSpec::kMaxDepth || d.p2.depth() > ReferencePointSpec::kMaxDepth)
      throw Error(ErrorCode::InvalidConfig, d.id + ": reference point nesting too deep");
    if (!index_.emplace(d.id, i).second) throw Error(ErrorCode::InvalidConfig, "duplicate acupoint id " + d.id);
  }
}

const AcupointDef* AcupointTable::find(std::string_view id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &defs_[it->second];
}

AcupointTable AcupointTable::from_json(const json& j) {
  if (!j.is_object() || !j.contains("acupoints") || !j.at("acupoints").is_array())
    throw Error(ErrorCode::InvalidConfig, "acupoint table needs an 'acupoints' array");
  std::vector<AcupointDef> defs;
  for (const auto& a : j.at("acupoints")) defs.push_back(def_from_json(a));
  return AcupointTable(j.value("version", std::string("unversioned")), std::move(defs));
}

AcupointTable AcupointTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open acupoint table " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
  return from_json(j);
}

const AcupointTable& AcupointTable::builtin() {
  static const AcupointTable table = from_json(json::parse(detail::kDefaultAcupointTable));
  return table;
}

// ---- localization ----------------------------------------------------------

namespace {

// `level` counts the interpolation nodes above `spec`; the top-level
// reference point of an acupoint sits at level 1.
Vec3 resolve_at(const ReferencePointSpec& spec, const SkeletonFrame& frame, int level) {
  if (spec.is_joint()) return frame.at(spec.joint_id());
  if (level > ReferencePointSpec::kMaxDepth)
    throw Error(ErrorCode::RecursionLimitExceeded, "reference point nested deeper than " +
                                                       std::to_string(ReferencePointSpec::kMaxDepth));
  const auto& b = spec.interpolation();
  const Vec3 a = resolve_at(b.a, frame, level + 1);
  const Vec3 c = resolve_at(b.b, frame, level + 1);
  return (1.0 - b.ratio) * a + b.ratio * c;
}

}  // namespace

Vec3 resolve_reference_point(const ReferencePointSpec& spec, const SkeletonFrame& frame) {
  return resolve_at(spec, frame, 1);
}

Vec3 locate_acupoint(const AcupointDef& def, const SkeletonFrame& frame) {
  const Vec3 p1 = resolve_reference_point(def.p1, frame);
  const Vec3 p2 = resolve_reference_point(def.p2, frame);
  return (1.0 - def.lambda) * p1 + def.lambda * p2;
}

const Vec3* LocateResult::find(std::string_view id) const {
  for (const auto& [aid, pos] : positions)
    if (aid == id) return &pos;
  return nullptr;
}

LocateResult locate_all(const AcupointTable& table, const SkeletonFrame& frame) {
  LocateResult r;
  r.positions.reserve(table.size());
  for (const auto& def : table.defs()) {
    try {
      r.positions.emplace_back(def.id, locate_acupoint(def, frame));
    } catch (const Error& e) {
      r.failures.push_back({def.id, e.code(), e.what()});
    }
  }
  return r;
}

}  // namespace acu
