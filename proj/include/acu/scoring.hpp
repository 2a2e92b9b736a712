#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "acu/anatomy.hpp"
#include "acu/methods.hpp"

namespace acu {

struct RadiusBounds {
  double r_min;  // full-score radius
  double r_max;  // zero-score radius
};

struct AngleBounds {
  double theta_min;  // degrees of deviation that still earn full score
  double theta_max;  // zero-score deviation
};

struct ScoringConfig {
  double full_score = 100.0;
  std::map<Region, RadiusBounds> acupressure = {
      {Region::Hand, {0.56, 1.13}},
      {Region::Limb, {0.94, 1.90}},
      {Region::Torso, {1.16, 2.14}},
  };
  AngleBounds insertion{5.0, 22.5};
  // Zero-score deviation taken from the midpoint to the adjacent insertion
  // class instead of insertion.theta_max.
  bool class_specific_theta_max = true;
  // Coupled: shallow.upper == deep.max and deep.lower == shallow.min.
  DepthBounds deep{0.5, 1.5, 2.5, 3.5};
  DepthBounds shallow{0.0, 0.5, 1.2, 2.5};
  DepthBounds moxi{2.0, 2.5, 4.0, 5.0};
  double mismatch_weight = 0.60;

  // Throws InvalidConfig on any violated invariant.
  void validate() const;
  const RadiusBounds& radii(Region r) const;

  // Copy with the acupoint's depth prescription applied, when it has one.
  ScoringConfig with_needling(const NeedlingSpec& needling) const;

  static ScoringConfig from_json(const nlohmann::json& j);  // missing keys keep defaults
  nlohmann::json to_json() const;
};

// Piecewise scorers. Each takes its bounds explicitly; the ScoringConfig
// overloads pick the configured bounds.
double score_acupressure(double d_dev, const RadiusBounds& r, double full_score);
double score_acupressure(double d_dev, const ScoringConfig& cfg, Region region = Region::Hand);

double score_insertion_angle(double theta_dev, const AngleBounds& a, double full_score);
double score_insertion_angle(double theta_dev, const ScoringConfig& cfg);

// Zero-score deviation for a target insertion class: the distance to the
// midpoint with the adjacent class on the side of the actual angle.
double insertion_theta_max(InsertionClass target, double actual_angle_deg);

double score_deep(double d_deep, const DepthBounds& b, double full_score);
double score_deep(double d_deep, const ScoringConfig& cfg);

double score_shallow(double d_shallow, const DepthBounds& b, double full_score);
double score_shallow(double d_shallow, const ScoringConfig& cfg);

double score_moxi_distance(double d_moxi, const DepthBounds& b, double full_score);
double score_moxi_distance(double d_moxi, const ScoringConfig& cfg);

double method_weight(LiftThrustMethod actual, Method target, double mismatch_weight = 0.60);
double method_weight(Method actual, Method target, double mismatch_weight = 0.60);
double method_weight(MoxaType actual, MoxaType target, double mismatch_weight = 0.60);

struct TechniqueScore {
  std::string name;
  double raw = 0.0;
  double weight = 1.0;
  double total = 0.0;  // raw * weight
  std::map<std::string, double> breakdown;
};

TechniqueScore score_acupressure_technique(double d_dev, Region region, const ScoringConfig& cfg);
TechniqueScore score_insertion(double angle_deg, InsertionClass target, const ScoringConfig& cfg);
TechniqueScore score_lift_thrust(double d_deep, double d_shallow, LiftThrustMethod actual, Method target,
                                 const ScoringConfig& cfg);
TechniqueScore score_twist(int n_total, Method actual, Method target, const ScoringConfig& cfg);
TechniqueScore score_moxibustion(double d_moxi, MoxaType actual, MoxaType target, const ScoringConfig& cfg);

}  // namespace acu
