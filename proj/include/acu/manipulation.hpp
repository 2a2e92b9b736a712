#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acu/anatomy.hpp"
#include "acu/geometry.hpp"
#include "acu/methods.hpp"

namespace acu {

// Hand joint keys carried by needle samples.
inline constexpr const char* kThumbTip = "Thumb_tip";
inline constexpr const char* kIndexTip = "Index_tip";
inline constexpr const char* kThumbProximal = "Thumb_proximal";
inline constexpr const char* kIndexProximal = "Index_proximal";

using HandJoints = std::map<std::string, Vec3>;

struct NeedleSample {
  double t = 0.0;
  Vec3 tip = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit needle axis, pointing tip-ward
  HandJoints hand;                 // empty when no hand tracking
};

enum class NeedleManipulation { LiftThrust, Twist };

struct NeedleSession {
  std::string session_id;
  std::vector<NeedleSample> samples;
  AcupointId target;
  Vec3 skin_point = Vec3::Zero();
  Vec3 skin_normal = Vec3::UnitZ();  // points out of the body
  NeedleManipulation manipulation = NeedleManipulation::LiftThrust;
  // Optional targets carried by the trace header.
  std::optional<Method> target_method;
  std::optional<InsertionClass> target_insertion;

  // >= 2 samples, strictly increasing t, unit directions and normal, finite positions.
  void validate() const;
};

struct MoxaSample {
  double t = 0.0;
  Vec3 head = Vec3::Zero();
};

struct MoxaSession {
  std::string session_id;
  std::vector<MoxaSample> samples;
  AcupointId target;
  Vec3 target_pos = Vec3::Zero();
  Vec3 skin_normal = Vec3::UnitZ();
  std::optional<MoxaType> target_type;

  void validate() const;
};

// Acupressure: index fingertip pressing positions; the final sample is the press.
struct PressSample {
  double t = 0.0;
  Vec3 press = Vec3::Zero();
};

struct PressSession {
  std::string session_id;
  std::vector<PressSample> samples;
  AcupointId target;
  Vec3 target_pos = Vec3::Zero();
  std::optional<Region> region;

  void validate() const;
};

struct Thresholds {
  double stationary_band = 0.5;    // cm, mild moxibustion distance spread
  double whirl_angle_deg = 20.0;   // head displacement vs skin normal
  double whirl_speed = 2.0;        // cm/s
  int whirl_frame_count = 15;
  double twist_deadband = 0.2;     // cm, hysteresis on delta-d
  double contact_radius = 0.56;    // cm, acupoint sphere radius
  int smoothing_window = 5;        // samples, centered moving average
  double speed_margin = 0.10;      // relative margin for "faster"
  double cycle_prominence = 0.2;   // cm, depth drop that separates cycles

  void validate() const;
};

// ---- insertion -------------------------------------------------------------

struct InsertionEvent {
  double t_start = 0.0;
  double t_max_depth = 0.0;
  double t_end = 0.0;
  double angle_deg = 0.0;
  InsertionClass insertion_class = InsertionClass::Perpendicular;
  double max_penetration = 0.0;
  double vertical_depth = 0.0;
  std::size_t start_index = 0;
  Vec3 axis = Vec3::UnitZ();  // needle direction at contact
};

// Angle between the needle axis and the skin surface, in [0, 90] degrees.
double insertion_angle_deg(const Vec3& direction, const Vec3& skin_normal);

// Nearest nominal angle; boundaries at 67.5 and 30 degrees.
InsertionClass classify_insertion_angle(double angle_deg);

InsertionEvent detect_insertion(const NeedleSession& session, const Thresholds& thresholds);

// ---- lifting-thrusting -----------------------------------------------------

// Vertical depth below the skin from the moment of contact onwards. `depth` is
// the raw signal (penetration along the contact axis times sin(angle)),
// `smoothed` is its centered moving average.
struct PenetrationSignal {
  std::vector<double> t;
  std::vector<double> depth;
  std::vector<double> smoothed;
};

PenetrationSignal penetration_signal(const NeedleSession& session, const InsertionEvent& event,
                                     const Thresholds& thresholds);

struct LiftThrustCycle {
  double depth = 0.0;         // peak vertical depth, cm
  double thrust_speed = 0.0;  // cm/s, downward phase
  double lift_speed = 0.0;    // cm/s, upward phase
  double t_peak = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

std::vector<LiftThrustCycle> segment_lift_thrust(const PenetrationSignal& signal, const Thresholds& thresholds);
std::vector<LiftThrustCycle> segment_lift_thrust(const NeedleSession& session, const InsertionEvent& event,
                                                 const Thresholds& thresholds);

struct LiftThrustClassification {
  LiftThrustMethod method = LiftThrustMethod::Ineffective;
  bool deep_then_shallow = false;
  bool shallow_then_deep = false;
  bool fast_then_slow = false;  // thrust faster than lift in both cycles
  bool slow_then_fast = false;  // lift faster than thrust in both cycles
};

LiftThrustClassification classify_lift_thrust(std::span<const LiftThrustCycle> cycles, double speed_margin = 0.10);

// ---- twisting --------------------------------------------------------------

// |P_mid - thumb tip| - |P_mid - index tip|, P_mid the midpoint of the finger roots.
double twist_delta(const HandJoints& hand);

enum class TwistState { One, Two };  // One: delta-d > 0, Two: delta-d < 0

struct StateTransition {
  TwistState from;
  TwistState to;
  std::size_t flip_index;  // first sample in the new state
  std::size_t from_index;  // last sample of the extremum plateau in the state being left
  std::size_t to_index;    // first sample of the extremum plateau in the state being entered
};

// Hysteresis state machine over a delta-d signal: a state is entered when the
// signal crosses +deadband (One) or -deadband (Two).
std::vector<StateTransition> detect_state_transitions(std::span<const double> delta_d, double deadband);

struct TwistRotation {
  TwistDirection direction = TwistDirection::CW;
  int turns = 1;  // +1 clockwise, -1 counter-clockwise
  double t_start = 0.0;
  double t_end = 0.0;
  double mean_speed = 0.0;  // thumb tip speed, cm/s
  std::size_t start_index = 0;
  std::size_t end_index = 0;
};

struct TwistSequence {
  std::vector<TwistRotation> rotations;
  int n_total = 0;

  // Number of completed CW/CCW (or CCW/CW) pairs.
  int full_cycles() const { return static_cast<int>(rotations.size()) / 2; }
  static TwistSequence from_rotations(std::vector<TwistRotation> rotations);
};

// Each state flip is one rotation. Its handedness is the sense in which the
// thumb-to-index vector sweeps around the needle axis, viewed looking down the
// axis towards the tip.
TwistSequence segment_twists(const NeedleSession& session, const Thresholds& thresholds);
TwistSequence segment_twists(const NeedleSession& session, const Thresholds& thresholds, std::size_t start_index);

// Reinforce when the first rotation is clockwise.
Method classify_twist(const TwistSequence& seq);

// ---- moxibustion -----------------------------------------------------------

struct MoxaClassification {
  MoxaType type = MoxaType::Mild;
  double d_moxi = 0.0;            // time-weighted mean height above the skin, cm
  double distance_spread = 0.0;   // max - min head-to-acupoint distance, cm
  int whirl_frames = 0;
  std::vector<double> speed;      // per sample, cm/s (smoothed positions)
  std::vector<bool> whirl_flags;  // frames counted towards whirling
};

// Whirling when at least whirl_frame_count frames are both off-axis and fast;
// otherwise Mild when the head-to-acupoint distance spread stays within
// stationary_band; otherwise SparrowPecking.
MoxaClassification classify_moxibustion(const MoxaSession& session, const Thresholds& thresholds);

// ---- acupressure -----------------------------------------------------------

// Distance from the final pressing point to the target acupoint.
double pressing_deviation(const PressSession& session);

}  // namespace acu
