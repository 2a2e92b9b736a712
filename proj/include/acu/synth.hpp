#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "acu/trace_io.hpp"

namespace acu {

enum class SynthKind { LiftThrust, Twist, Moxibustion };

std::string_view to_string(SynthKind k);

struct SynthSpec {
  SynthKind kind = SynthKind::LiftThrust;
  std::string label = "reinforce";  // reinforce | reduce | mild | sparrow | whirling
  std::string session_id = "synth";
  AcupointId target = "LU10";
  Vec3 skin_point = Vec3::Zero();
  Vec3 skin_normal = Vec3::UnitZ();

  // Needle kinematics. Depths and speeds are vertical (along the skin normal).
  double insertion_angle_deg = 90.0;
  std::vector<double> depths{2.0, 0.8};  // peak depth per cycle, cm
  double thrust_speed = 3.0;             // cm/s
  double lift_speed = 1.0;               // cm/s
  double base_depth = 0.2;               // depth the needle is lifted back to between cycles
  double approach_distance = 2.0;        // cm travelled before contact and after withdrawal
  double approach_speed = 2.0;           // cm/s

  // Twisting: +1 clockwise, -1 counter-clockwise; signs must alternate.
  std::vector<int> turns{+1, -1, +1, -1};
  double cw_duration = 0.4;   // s per clockwise rotation
  double ccw_duration = 0.8;  // s per counter-clockwise rotation
  double hold_depth = 1.0;    // cm, depth held while twisting
  double twist_pause = 0.2;   // s held at each rotation extreme

  // Moxibustion.
  double moxa_height = 3.0;      // cm above the acupoint
  double moxa_amplitude = 1.0;   // sparrow-pecking half stroke, cm
  double moxa_frequency = 1.0;   // sparrow-pecking strokes per second
  double moxa_radius = 1.5;      // whirling orbit radius, cm
  double moxa_speed = 5.0;       // whirling tangential speed, cm/s
  double moxa_duration = 10.0;   // s

  double sample_rate = 90.0;  // Hz
  double noise_sigma = 0.0;   // cm, isotropic Gaussian on every position
  std::uint64_t seed = 1;

  // Throws InvalidSpec.
  void validate() const;

  // Defaults for a label: the reduce/sparrow/... variants mirror the
  // reinforce/mild defaults with the defining kinematics swapped.
  static SynthSpec defaults(SynthKind kind, const std::string& label);
  // {"technique": "lift_thrust" | "twist" | "moxibustion", "label": ..., <overrides>}
  static SynthSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

Session generate(const SynthSpec& spec);

// The seven labelled configurations: lift-thrust and twist for both methods,
// plus the three moxibustion types.
std::vector<SynthSpec> label_grid();

}  // namespace acu
