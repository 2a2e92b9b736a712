#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "acu/error.hpp"
#include "acu/geometry.hpp"
#include "acu/methods.hpp"

namespace acu {

using JointId = std::string;
using AcupointId = std::string;

// Joint names follow the 33-landmark body convention ("left_shoulder", ...)
// plus 21 landmarks per hand prefixed with the side ("right_hand_thumb_cmc").
const std::vector<std::string>& known_joint_names();
bool is_known_joint(std::string_view name);

inline constexpr double kDefaultMinConfidence = 0.5;

struct SkeletonFrame {
  double timestamp = 0.0;
  std::map<JointId, Vec3> joints;
  std::map<JointId, double> confidence;

  const Vec3* find(std::string_view id) const;
  const Vec3& at(std::string_view id) const;  // throws MissingJoint

  // Copy with every joint whose confidence is below `threshold` removed.
  SkeletonFrame without_low_confidence(double threshold) const;

  // World-space frame: {"timestamp": t, "joints": {"<id>": [x,y,z] |
  // {"position": [x,y,z], "confidence": c}}}. Low-confidence joints are dropped.
  static SkeletonFrame from_json(const nlohmann::json& j, double min_confidence = kDefaultMinConfidence);
};

// A reference point is a physical joint or a virtual point interpolated
// between two other reference points. Children are immutable and shared, so
// copies are cheap.
class ReferencePointSpec {
 public:
  static constexpr int kMaxDepth = 4;

  struct Between;

  static ReferencePointSpec joint(JointId id);
  static ReferencePointSpec between(ReferencePointSpec a, ReferencePointSpec b, double ratio);

  bool is_joint() const { return std::holds_alternative<JointId>(node_); }
  const JointId& joint_id() const { return std::get<JointId>(node_); }
  const Between& interpolation() const { return *std::get<std::shared_ptr<const Between>>(node_); }

  // 0 for a joint, 1 + max(child depth) for a virtual point.
  int depth() const;
  void collect_joints(std::vector<JointId>& out) const;

  // {"joint": "<id>"} or {"between": [a, b], "ratio": r}
  static ReferencePointSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::variant<JointId, std::shared_ptr<const Between>> node_;
};

struct ReferencePointSpec::Between {
  ReferencePointSpec a;
  ReferencePointSpec b;
  double ratio;
};

enum class Region { Hand, Limb, Torso };
std::string_view to_string(Region r);
std::optional<Region> parse_region(std::string_view s);

// Localization tolerance radii (cm) from expert marking distributions:
// precise = 63% interval, general = 95% interval.
struct RegionCriteria {
  double precise;
  double general;
};
RegionCriteria criteria_for(Region r);

// Depth quadruple in cm: lower < min < max < upper.
struct DepthBounds {
  double lower, min, max, upper;
};

inline constexpr double kCmPerCun = 3.33;

// Optional per-acupoint needling prescription. Stored in cun in the table and
// converted to cm on load.
struct NeedlingSpec {
  InsertionClass insertion = InsertionClass::Perpendicular;
  std::optional<DepthBounds> deep;
  std::optional<DepthBounds> shallow;
};

struct AcupointDef {
  AcupointId id;
  std::string name;
  Region region = Region::Hand;
  ReferencePointSpec p1 = ReferencePointSpec::joint("");
  ReferencePointSpec p2 = ReferencePointSpec::joint("");
  double lambda = 0.0;
  std::map<std::string, std::string> meta;
  std::optional<NeedlingSpec> needling;
};

class AcupointTable {
 public:
  AcupointTable() = default;
  AcupointTable(std::string version, std::vector<AcupointDef> defs);

  const std::string& version() const { return version_; }
  const std::vector<AcupointDef>& defs() const { return defs_; }
  std::size_t size() const { return defs_.size(); }
  bool empty() const { return defs_.empty(); }
  const AcupointDef* find(std::string_view id) const;

  static AcupointTable from_json(const nlohmann::json& j);
  static AcupointTable load(const std::string& path);
  // The 24 representative acupoints shipped in data/acupoints_default.json.
  static const AcupointTable& builtin();

 private:
  std::string version_;
  std::vector<AcupointDef> defs_;
  std::map<AcupointId, std::size_t, std::less<>> index_;
};

Vec3 resolve_reference_point(const ReferencePointSpec& spec, const SkeletonFrame& frame);

// (1 - lambda) * P1 + lambda * P2
Vec3 locate_acupoint(const AcupointDef& def, const SkeletonFrame& frame);

struct LocateFailure {
  AcupointId id;
  ErrorCode code;
  std::string message;
};

struct LocateResult {
  std::vector<std::pair<AcupointId, Vec3>> positions;  // table order
  std::vector<LocateFailure> failures;

  const Vec3* find(std::string_view id) const;
};

// Failures of individual acupoints are collected; the batch never aborts.
LocateResult locate_all(const AcupointTable& table, const SkeletonFrame& frame);

struct LocalizationError {
  double delta_p = 0.0;
  double re = 0.0;
  double ae = 0.0;
  std::pair<AcupointId, AcupointId> norm_pair;
  double l = 0.0;
};

// Pair whose image distance normalizes relative error for a region.
std::pair<AcupointId, AcupointId> default_norm_pair(Region r);

// re = |pred - marked| / d_norm, ae = re * l_phys. Works for pixel or cm
// inputs as long as pred, marked and d_norm share a unit.
template <typename Point>
LocalizationError localization_error(const Point& pred, const Point& marked, double d_norm, double l_phys,
                                     std::pair<AcupointId, AcupointId> norm_pair = {}) {
  if (!(d_norm > 0.0)) throw Error(ErrorCode::ZeroNormalization, "normalization distance must be positive");
  if (!(l_phys > 0.0)) throw Error(ErrorCode::InvalidInput, "physical length must be positive");
  LocalizationError e;
  e.delta_p = (pred - marked).norm();
  e.re = e.delta_p / d_norm;
  e.ae = e.re * l_phys;
  e.norm_pair = std::move(norm_pair);
  e.l = l_phys;
  return e;
}

}  // namespace acu
