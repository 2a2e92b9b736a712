#include "acu/methods.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace acu {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

double nominal_angle_deg(InsertionClass c) {
  switch (c) {
    case InsertionClass::Perpendicular: return 90.0;
    case InsertionClass::Oblique: return 45.0;
    case InsertionClass::Transverse: return 15.0;
  }
  return 90.0;
}

std::string_view to_string(InsertionClass c) {
  switch (c) {
    case InsertionClass::Perpendicular: return "perpendicular";
    case InsertionClass::Oblique: return "oblique";
    case InsertionClass::Transverse: return "transverse";
  }
  return "perpendicular";
}

std::string_view to_string(LiftThrustMethod m) {
  switch (m) {
    case LiftThrustMethod::Reinforce: return "reinforce";
    case LiftThrustMethod::Reduce: return "reduce";
    case LiftThrustMethod::Ineffective: return "ineffective";
  }
  return "ineffective";
}

std::string_view to_string(Method m) { return m == Method::Reinforce ? "reinforce" : "reduce"; }

std::string_view to_string(TwistDirection d) { return d == TwistDirection::CW ? "cw" : "ccw"; }

std::string_view to_string(MoxaType t) {
  switch (t) {
    case MoxaType::Mild: return "mild";
    case MoxaType::SparrowPecking: return "sparrow";
    case MoxaType::Whirling: return "whirling";
  }
  return "mild";
}

std::string_view to_string(Technique t) {
  switch (t) {
    case Technique::Acupressure: return "acupressure";
    case Technique::Acupuncture: return "acupuncture";
    case Technique::Moxibustion: return "moxibustion";
  }
  return "acupuncture";
}

std::optional<InsertionClass> parse_insertion_class(std::string_view s) {
  const auto v = lower(s);
  if (v == "perpendicular") return InsertionClass::Perpendicular;
  if (v == "oblique") return InsertionClass::Oblique;
  if (v == "transverse") return InsertionClass::Transverse;
  return std::nullopt;
}

std::optional<LiftThrustMethod> parse_lift_thrust_method(std::string_view s) {
  const auto v = lower(s);
  if (v == "reinforce" || v == "reinforcing") return LiftThrustMethod::Reinforce;
  if (v == "reduce" || v == "reducing") return LiftThrustMethod::Reduce;
  if (v == "ineffective") return LiftThrustMethod::Ineffective;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) {
  const auto v = lower(s);
  if (v == "reinforce" || v == "reinforcing") return Method::Reinforce;
  if (v == "reduce" || v == "reducing") return Method::Reduce;
  return std::nullopt;
}

std::optional<MoxaType> parse_moxa_type(std::string_view s) {
  const auto v = lower(s);
  if (v == "mild") return MoxaType::Mild;
  if (v == "sparrow" || v == "sparrow_pecking" || v == "sparrowpecking") return MoxaType::SparrowPecking;
  if (v == "whirling") return MoxaType::Whirling;
  return std::nullopt;
}

std::optional<Technique> parse_technique(std::string_view s) {
  const auto v = lower(s);
  if (v == "acupressure") return Technique::Acupressure;
  if (v == "acupuncture") return Technique::Acupuncture;
  if (v == "moxibustion") return Technique::Moxibustion;
  return std::nullopt;
}

}  // namespace acu
