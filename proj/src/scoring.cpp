#include "acu/scoring.hpp"

#include <cmath>
#include <set>

#include "json_util.hpp"

namespace acu {

using nlohmann::json;

namespace {

void require_increasing(const DepthBounds& b, const char* what) {
  if (!(b.lower >= 0.0 && b.lower < b.min && b.min < b.max && b.max < b.upper))
    throw Error(ErrorCode::InvalidConfig, std::string(what) + ": need 0 <= lower < min < max < upper");
}

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be a non-negative number");
}

double sq(double x) { return x * x; }

DepthBounds depth_from_json(const json& j, DepthBounds b) {
  detail::read_number(j, "d_lower", b.lower, ErrorCode::InvalidConfig);
  detail::read_number(j, "d_min", b.min, ErrorCode::InvalidConfig);
  detail::read_number(j, "d_max", b.max, ErrorCode::InvalidConfig);
  detail::read_number(j, "d_upper", b.upper, ErrorCode::InvalidConfig);
  return b;
}

json depth_to_json(const DepthBounds& b) {
  return json{{"d_lower", b.lower}, {"d_min", b.min}, {"d_max", b.max}, {"d_upper", b.upper}};
}

}  // namespace

// ---- config ----------------------------------------------------------------

void ScoringConfig::validate() const {
  if (!(full_score > 0.0 && std::isfinite(full_score))) throw Error(ErrorCode::InvalidConfig, "C must be positive");
  for (const Region r : {Region::Hand, Region::Limb, Region::Torso}) {
    const auto& b = radii(r);
    if (!(b.r_min >= 0.0 && b.r_min < b.r_max))
      throw Error(ErrorCode::InvalidConfig, std::string("acupressure radii for ") + std::string(to_string(r)) +
                                                ": need 0 <= r_min < r_max");
  }
  if (!(insertion.theta_min >= 0.0 && insertion.theta_min < insertion.theta_max))
    throw Error(ErrorCode::InvalidConfig, "insertion: need 0 <= theta_min < theta_max");
  if (class_specific_theta_max && !(insertion.theta_min < insertion_theta_max(InsertionClass::Transverse, 15.0)))
    throw Error(ErrorCode::InvalidConfig, "insertion: theta_min must be below every class-specific theta_max");
  require_increasing(deep, "deep");
  require_increasing(shallow, "shallow");
  require_increasing(moxi, "moxi");
  if (shallow.upper != deep.max) throw Error(ErrorCode::InvalidConfig, "shallow.d_upper must equal deep.d_max");
  if (deep.lower != shallow.min) throw Error(ErrorCode::InvalidConfig, "deep.d_lower must equal shallow.d_min");
  if (!(mismatch_weight > 0.0 && mismatch_weight < 1.0))
    throw Error(ErrorCode::InvalidConfig, "mismatch_weight must be in (0, 1)");
}

const RadiusBounds& ScoringConfig::radii(Region r) const {
  const auto it = acupressure.find(r);
  if (it == acupressure.end())
    throw Error(ErrorCode::InvalidConfig, std::string("no acupressure radii for ") + std::string(to_string(r)));
  return it->second;
}

ScoringConfig ScoringConfig::with_needling(const NeedlingSpec& needling) const {
  ScoringConfig out = *this;
  if (needling.deep) out.deep = *needling.deep;
  if (needling.shallow) out.shallow = *needling.shallow;
  out.validate();
  return out;
}

ScoringConfig ScoringConfig::from_json(const json& j) {
  ScoringConfig c;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "scoring config must be an object");
  static const std::set<std::string> known{"C", "acupressure", "insertion", "deep", "shallow", "moxi", "mismatch_weight"};
  for (const auto& [key, value] : j.items())
    if (known.count(key) == 0) throw Error(ErrorCode::InvalidConfig, "unknown scoring field '" + key + "'");
  detail::read_number(j, "C", c.full_score, ErrorCode::InvalidConfig);
  if (j.contains("acupressure")) {
    for (const auto& [name, v] : j.at("acupressure").items()) {
      const auto region = parse_region(name);
      if (!region) throw Error(ErrorCode::InvalidConfig, "acupressure: unknown region " + name);
      auto& b = c.acupressure[*region];
      detail::read_number(v, "r_min", b.r_min, ErrorCode::InvalidConfig);
      detail::read_number(v, "r_max", b.r_max, ErrorCode::InvalidConfig);
    }
  }
  if (j.contains("insertion")) {
    const auto& v = j.at("insertion");
    detail::read_number(v, "theta_min", c.insertion.theta_min, ErrorCode::InvalidConfig);
    detail::read_number(v, "theta_max", c.insertion.theta_max, ErrorCode::InvalidConfig);
    if (v.contains("class_specific")) {
      if (!v.at("class_specific").is_boolean())
        throw Error(ErrorCode::InvalidConfig, "insertion.class_specific must be a boolean");
      c.class_specific_theta_max = v.at("class_specific").get<bool>();
    }
  }
  if (j.contains("deep")) c.deep = depth_from_json(j.at("deep"), c.deep);
  if (j.contains("shallow")) c.shallow = depth_from_json(j.at("shallow"), c.shallow);
  if (j.contains("moxi")) c.moxi = depth_from_json(j.at("moxi"), c.moxi);
  detail::read_number(j, "mismatch_weight", c.mismatch_weight, ErrorCode::InvalidConfig);
  c.validate();
  return c;
}

json ScoringConfig::to_json() const {
  json press = json::object();
  for (const auto& [r, b] : acupressure) press[std::string(acu::to_string(r))] = {{"r_min", b.r_min}, {"r_max", b.r_max}};
  return json{{"C", full_score},
              {"acupressure", press},
              {"insertion",
               {{"theta_min", insertion.theta_min},
                {"theta_max", insertion.theta_max},
                {"class_specific", class_specific_theta_max}}},
              {"deep", depth_to_json(deep)},
              {"shallow", depth_to_json(shallow)},
              {"moxi", depth_to_json(moxi)},
              {"mismatch_weight", mismatch_weight}};
}

// ---- piecewise scorers -----------------------------------------------------

double score_acupressure(double d_dev, const RadiusBounds& r, double full_score) {
  if (!(r.r_min < r.r_max)) throw Error(ErrorCode::InvalidConfig, "acupressure: r_min must be below r_max");
  require_nonnegative(d_dev, "d_dev");
  if (d_dev < r.r_min) return full_score;
  if (d_dev < r.r_max) return full_score * sq(d_dev - r.r_max) / sq(r.r_min - r.r_max);
  return 0.0;
}

double score_acupressure(double d_dev, const ScoringConfig& cfg, Region region) {
  return score_acupressure(d_dev, cfg.radii(region), cfg.full_score);
}

double score_insertion_angle(double theta_dev, const AngleBounds& a, double full_score) {
  if (!(a.theta_min < a.theta_max)) throw Error(ErrorCode::InvalidConfig, "insertion: theta_min must be below theta_max");
  require_nonnegative(theta_dev, "theta_dev");
  if (theta_dev < a.theta_min) return full_score;
  if (theta_dev < a.theta_max) return full_score * sq(theta_dev - a.theta_max) / sq(a.theta_min - a.theta_max);
  return 0.0;
}

double score_insertion_angle(double theta_dev, const ScoringConfig& cfg) {
  return score_insertion_angle(theta_dev, cfg.insertion, cfg.full_score);
}

double insertion_theta_max(InsertionClass target, double actual_angle_deg) {
  constexpr double kPerpendicularOblique = (90.0 + 45.0) / 2.0;
  constexpr double kObliqueTransverse = (45.0 + 15.0) / 2.0;
  switch (target) {
    case InsertionClass::Perpendicular: return 90.0 - kPerpendicularOblique;
    case InsertionClass::Oblique:
      return actual_angle_deg >= 45.0 ? kPerpendicularOblique - 45.0 : 45.0 - kObliqueTransverse;
    case InsertionClass::Transverse: return kObliqueTransverse - 15.0;
  }
  return 90.0 - kPerpendicularOblique;
}

double score_deep(double d_deep, const DepthBounds& b, double full_score) {
  require_increasing(b, "deep");
  require_nonnegative(d_deep, "d_deep");
  if (d_deep < b.lower) return 0.0;
  if (d_deep < b.min) return full_score * (d_deep - b.lower) / (b.min - b.lower);
  if (d_deep < b.max) return full_score;
  if (d_deep < b.upper) return full_score * sq(d_deep - b.upper) / sq(b.max - b.upper);
  return 0.0;
}

double score_deep(double d_deep, const ScoringConfig& cfg) { return score_deep(d_deep, cfg.deep, cfg.full_score); }

double score_shallow(double d_shallow, const DepthBounds& b, double full_score) {
  require_increasing(b, "shallow");
  require_nonnegative(d_shallow, "d_shallow");
  // The rising branch is undefined below d_lower; score it as zero.
  if (d_shallow < b.lower) return 0.0;
  if (d_shallow < b.min) return full_score * d_shallow / b.min;
  if (d_shallow < b.max) return full_score;
  if (d_shallow < b.upper) return full_score * (d_shallow - b.upper) / (b.max - b.upper);
  return 0.0;
}

double score_shallow(double d_shallow, const ScoringConfig& cfg) {
  return score_shallow(d_shallow, cfg.shallow, cfg.full_score);
}

double score_moxi_distance(double d_moxi, const DepthBounds& b, double full_score) {
  require_increasing(b, "moxi");
  require_nonnegative(d_moxi, "d_moxi");
  if (d_moxi < b.lower) return 0.0;
  if (d_moxi < b.min) return full_score * sq(d_moxi - b.lower) / sq(b.min - b.lower);
  if (d_moxi < b.max) return full_score;
  if (d_moxi < b.upper) return full_score * (d_moxi - b.upper) / (b.max - b.upper);
  return 0.0;
}

double score_moxi_distance(double d_moxi, const ScoringConfig& cfg) {
  return score_moxi_distance(d_moxi, cfg.moxi, cfg.full_score);
}

double method_weight(LiftThrustMethod actual, Method target, double mismatch_weight) {
  const bool match = (actual == LiftThrustMethod::Reinforce && target == Method::Reinforce) ||
                     (actual == LiftThrustMethod::Reduce && target == Method::Reduce);
  return match ? 1.0 : mismatch_weight;
}

double method_weight(Method actual, Method target, double mismatch_weight) {
  return actual == target ? 1.0 : mismatch_weight;
}

double method_weight(MoxaType actual, MoxaType target, double mismatch_weight) {
  return actual == target ? 1.0 : mismatch_weight;
}

// ---- technique totals ------------------------------------------------------

TechniqueScore score_acupressure_technique(double d_dev, Region region, const ScoringConfig& cfg) {
  TechniqueScore s;
  s.name = "acupressure";
  s.raw = score_acupressure(d_dev, cfg, region);
  s.weight = 1.0;
  s.total = s.raw;
  s.breakdown = {{"d_dev", d_dev}, {"AL", s.raw}, {"r_min", cfg.radii(region).r_min}, {"r_max", cfg.radii(region).r_max}};
  return s;
}

TechniqueScore score_insertion(double angle_deg, InsertionClass target, const ScoringConfig& cfg) {
  AngleBounds bounds = cfg.insertion;
  if (cfg.class_specific_theta_max) bounds.theta_max = insertion_theta_max(target, angle_deg);
  const double dev = std::abs(angle_deg - nominal_angle_deg(target));
  TechniqueScore s;
  s.name = "insertion";
  s.raw = score_insertion_angle(dev, bounds, cfg.full_score);
  s.weight = 1.0;
  s.total = s.raw;
  s.breakdown = {{"angle_deg", angle_deg},
                 {"theta_dev", dev},
                 {"theta_min", bounds.theta_min},
                 {"theta_max", bounds.theta_max},
                 {"IA", s.raw}};
  return s;
}

TechniqueScore score_lift_thrust(double d_deep, double d_shallow, LiftThrustMethod actual, Method target,
                                 const ScoringConfig& cfg) {
  TechniqueScore s;
  s.name = "lift_thrust";
  const double dn = score_deep(d_deep, cfg);
  const double sn = score_shallow(d_shallow, cfg);
  s.raw = (dn + sn) / 2.0;
  s.weight = method_weight(actual, target, cfg.mismatch_weight);
  s.total = s.raw * s.weight;
  s.breakdown = {{"d_deep", d_deep}, {"d_shallow", d_shallow}, {"DN", dn}, {"SN", sn}, {"LT_RR", s.weight}};
  return s;
}

TechniqueScore score_twist(int n_total, Method actual, Method target, const ScoringConfig& cfg) {
  TechniqueScore s;
  s.name = "twist";
  s.raw = n_total == 0 ? cfg.full_score : 0.0;
  s.weight = method_weight(actual, target, cfg.mismatch_weight);
  s.total = s.raw * s.weight;
  s.breakdown = {{"n_total", static_cast<double>(n_total)}, {"TN", s.raw}, {"T_RR", s.weight}};
  return s;
}

TechniqueScore score_moxibustion(double d_moxi, MoxaType actual, MoxaType target, const ScoringConfig& cfg) {
  TechniqueScore s;
  s.name = "moxibustion";
  s.raw = score_moxi_distance(d_moxi, cfg);
  s.weight = method_weight(actual, target, cfg.mismatch_weight);
  s.total = s.raw * s.weight;
  s.breakdown = {{"d_moxi", d_moxi}, {"MD", s.raw}, {"MT", s.weight}};
  return s;
}

}  // namespace acu
