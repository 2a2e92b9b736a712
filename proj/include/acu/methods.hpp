#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace acu {

enum class InsertionClass { Perpendicular, Oblique, Transverse };
enum class LiftThrustMethod { Reinforce, Reduce, Ineffective };
// Target method for lift-thrust and twisting; also the twist classifier output.
enum class Method { Reinforce, Reduce };
enum class TwistDirection { CW, CCW };
enum class MoxaType { Mild, SparrowPecking, Whirling };
enum class Technique { Acupressure, Acupuncture, Moxibustion };

// Nominal insertion angle measured from the skin surface.
double nominal_angle_deg(InsertionClass c);

std::string_view to_string(InsertionClass c);
std::string_view to_string(LiftThrustMethod m);
std::string_view to_string(Method m);
std::string_view to_string(TwistDirection d);
std::string_view to_string(MoxaType t);
std::string_view to_string(Technique t);

// Case-insensitive; also accepts the short CLI spellings ("sparrow").
std::optional<InsertionClass> parse_insertion_class(std::string_view s);
std::optional<LiftThrustMethod> parse_lift_thrust_method(std::string_view s);
std::optional<Method> parse_method(std::string_view s);
std::optional<MoxaType> parse_moxa_type(std::string_view s);
std::optional<Technique> parse_technique(std::string_view s);

}  // namespace acu
