#include "acu/synth.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "acu/rng.hpp"
#include "json_util.hpp"

namespace acu {

using nlohmann::json;

namespace {

constexpr auto kSpec = ErrorCode::InvalidSpec;

// Hand model around the needle: grip point 3 cm behind the tip, finger roots
// further back, fingertips rolling the needle by sliding along e1.
constexpr double kGripOffset = 3.0;
constexpr double kRootBack = 3.0;
constexpr double kRootSpread = 1.0;
constexpr double kTipGap = 0.3;
constexpr double kRollExtent = 1.0;

struct Knot {
  double t;
  double value;
};

// Piecewise-linear interpolation; clamps outside the knot range.
double interpolate(const std::vector<Knot>& knots, double t) {
  if (t <= knots.front().t) return knots.front().value;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].t) {
      const auto& a = knots[i - 1];
      const auto& b = knots[i];
      if (b.t == a.t) return b.value;
      return a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t);
    }
  }
  return knots.back().value;
}

void push(std::vector<Knot>& knots, double dt, double value) { knots.push_back({knots.back().t + dt, value}); }

std::vector<double> sample_times(double duration, double rate) {
  const auto n = static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = static_cast<double>(k) / rate;
  return t;
}

bool is_needle(SynthKind k) { return k != SynthKind::Moxibustion; }

std::set<std::string> labels_for(SynthKind k) {
  if (is_needle(k)) return {"reinforce", "reduce"};
  return {"mild", "sparrow", "whirling"};
}

SynthKind parse_kind(const std::string& s) {
  if (s == "lift_thrust") return SynthKind::LiftThrust;
  if (s == "twist") return SynthKind::Twist;
  if (s == "moxibustion") return SynthKind::Moxibustion;
  throw Error(kSpec, "unknown technique '" + s + "'");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(kSpec, what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

Vec3 needle_direction(const SynthSpec& spec) {
  const Vec3 n = spec.skin_normal.normalized();
  const double a = spec.insertion_angle_deg * std::numbers::pi / 180.0;
  return (-std::sin(a) * n + std::cos(a) * any_orthogonal(n)).normalized();
}

// Penetration along the needle axis over time, in cm (negative above the skin).
std::vector<Knot> penetration_knots(const SynthSpec& spec, double* twist_start) {
  const double sin_a = std::sin(spec.insertion_angle_deg * std::numbers::pi / 180.0);
  const auto axial = [sin_a](double vertical) { return vertical / sin_a; };
  std::vector<Knot> k{{0.0, -spec.approach_distance}};
  push(k, spec.approach_distance / spec.approach_speed, 0.0);
  if (spec.kind == SynthKind::LiftThrust) {
    push(k, spec.base_depth / spec.approach_speed, axial(spec.base_depth));
    for (double depth : spec.depths) {
      push(k, (depth - spec.base_depth) / spec.thrust_speed, axial(depth));
      push(k, (depth - spec.base_depth) / spec.lift_speed, axial(spec.base_depth));
    }
    push(k, spec.base_depth / spec.approach_speed, 0.0);
  } else {
    push(k, spec.hold_depth / spec.approach_speed, axial(spec.hold_depth));
    if (twist_start) *twist_start = k.back().t;
    double hold = spec.twist_pause;
    for (int turn : spec.turns) hold += (turn > 0 ? spec.cw_duration : spec.ccw_duration) + spec.twist_pause;
    push(k, hold, axial(spec.hold_depth));
    push(k, spec.hold_depth / spec.approach_speed, 0.0);
  }
  push(k, spec.approach_distance / spec.approach_speed, -spec.approach_distance);
  return k;
}

// Fingertip roll position: +X is the state before a clockwise rotation.
std::vector<Knot> roll_knots(const SynthSpec& spec, double start) {
  double x = spec.turns.front() > 0 ? kRollExtent : -kRollExtent;
  std::vector<Knot> k{{start, x}};
  push(k, spec.twist_pause, x);
  for (int turn : spec.turns) {
    x = -x;
    push(k, turn > 0 ? spec.cw_duration : spec.ccw_duration, x);
    push(k, spec.twist_pause, x);
  }
  return k;
}

HandJoints hand_pose(const Vec3& tip, const Vec3& d, double x) {
  const Vec3 e1 = any_orthogonal(d);
  const Vec3 e2 = d.cross(e1);
  const Vec3 g = tip - kGripOffset * d;
  return {
      {kThumbProximal, g - kRootBack * e1 + kRootSpread * e2},
      {kIndexProximal, g - kRootBack * e1 - kRootSpread * e2},
      {kThumbTip, g + kTipGap * e2 + x * e1},
      {kIndexTip, g - kTipGap * e2 - x * e1},
  };
}

struct Noise {
  Xoshiro256 rng;
  double sigma;
  void apply(Vec3& v) {
    if (sigma == 0.0) return;
    for (int i = 0; i < 3; ++i) v[i] += sigma * rng.normal();
  }
};

NeedleSession generate_needle(const SynthSpec& spec) {
  NeedleSession s;
  s.session_id = spec.session_id;
  s.target = spec.target;
  s.skin_point = spec.skin_point;
  s.skin_normal = spec.skin_normal.normalized();
  s.manipulation = spec.kind == SynthKind::Twist ? NeedleManipulation::Twist : NeedleManipulation::LiftThrust;
  s.target_method = parse_method(spec.label);
  s.target_insertion = classify_insertion_angle(spec.insertion_angle_deg);

  double twist_start = 0.0;
  const auto pen = penetration_knots(spec, &twist_start);
  std::vector<Knot> roll;
  if (spec.kind == SynthKind::Twist) roll = roll_knots(spec, twist_start);

  const Vec3 d = needle_direction(spec);
  Noise noise{Xoshiro256(spec.seed), spec.noise_sigma};
  for (double t : sample_times(pen.back().t, spec.sample_rate)) {
    NeedleSample smp;
    smp.t = t;
    smp.direction = d;
    const Vec3 tip = spec.skin_point + interpolate(pen, t) * d;
    if (!roll.empty()) smp.hand = hand_pose(tip, d, interpolate(roll, t));
    smp.tip = tip;
    noise.apply(smp.tip);
    for (auto& [name, p] : smp.hand) noise.apply(p);
    s.samples.push_back(std::move(smp));
  }
  return s;
}

MoxaSession generate_moxa(const SynthSpec& spec) {
  MoxaSession s;
  s.session_id = spec.session_id;
  s.target = spec.target;
  s.target_pos = spec.skin_point;
  s.skin_normal = spec.skin_normal.normalized();
  s.target_type = parse_moxa_type(spec.label);

  const Vec3 n = s.skin_normal;
  const Vec3 e1 = any_orthogonal(n);
  const Vec3 e2 = n.cross(e1);
  const double omega = spec.moxa_speed / spec.moxa_radius;
  Noise noise{Xoshiro256(spec.seed), spec.noise_sigma};
  for (double t : sample_times(spec.moxa_duration, spec.sample_rate)) {
    Vec3 head = s.target_pos + spec.moxa_height * n;
    if (spec.label == "sparrow") {
      head += spec.moxa_amplitude * std::sin(2.0 * std::numbers::pi * spec.moxa_frequency * t) * n;
    } else if (spec.label == "whirling") {
      head += spec.moxa_radius * (std::cos(omega * t) * e1 + std::sin(omega * t) * e2);
    }
    noise.apply(head);
    s.samples.push_back({t, head});
  }
  return s;
}

}  // namespace

std::string_view to_string(SynthKind k) {
  switch (k) {
    case SynthKind::LiftThrust: return "lift_thrust";
    case SynthKind::Twist: return "twist";
    case SynthKind::Moxibustion: return "moxibustion";
  }
  return "lift_thrust";
}

void SynthSpec::validate() const {
  require(labels_for(kind).count(label) == 1, "label '" + label + "' does not apply to " + std::string(to_string(kind)));
  require(positive(sample_rate), "sample_rate must be > 0");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(skin_point.allFinite(), "skin_point must be finite");
  require(skin_normal.allFinite() && skin_normal.norm() > 1e-12, "skin_normal must be non-zero");

  if (is_needle(kind)) {
    require(positive(insertion_angle_deg) && insertion_angle_deg <= 90.0, "insertion_angle_deg must be in (0, 90]");
    require(positive(approach_distance) && positive(approach_speed), "approach must be positive");
  }
  if (kind == SynthKind::LiftThrust) {
    require(!depths.empty(), "depths must not be empty");
    require(std::isfinite(base_depth) && base_depth >= 0.0, "base_depth must be >= 0");
    for (double d : depths) require(std::isfinite(d) && d > base_depth, "every depth must exceed base_depth");
    require(positive(thrust_speed) && positive(lift_speed), "phase speeds must be > 0");
  } else if (kind == SynthKind::Twist) {
    require(!turns.empty(), "turns must not be empty");
    for (std::size_t i = 0; i < turns.size(); ++i) {
      require(turns[i] == 1 || turns[i] == -1, "turns must be +1 or -1");
      if (i > 0) require(turns[i] != turns[i - 1], "turn directions must alternate");
    }
    require(positive(cw_duration) && positive(ccw_duration), "rotation durations must be > 0");
    require(positive(hold_depth), "hold_depth must be > 0");
    require(std::isfinite(twist_pause) && twist_pause >= 0.0, "twist_pause must be >= 0");
  } else {
    require(positive(moxa_height), "moxa_height must be > 0");
    require(std::isfinite(moxa_amplitude) && moxa_amplitude >= 0.0 && moxa_amplitude < moxa_height,
            "moxa_amplitude must be in [0, moxa_height)");
    require(positive(moxa_frequency) && positive(moxa_radius) && positive(moxa_speed), "moxa motion must be > 0");
    require(positive(moxa_duration), "moxa_duration must be > 0");
  }
}

SynthSpec SynthSpec::defaults(SynthKind kind, const std::string& label) {
  SynthSpec s;
  s.kind = kind;
  s.label = label;
  s.session_id = std::string(to_string(kind)) + "-" + label;
  if (kind == SynthKind::Moxibustion) {
    s.target = "ST36";
  } else if (label == "reduce") {
    s.depths = {0.8, 2.0};
    s.thrust_speed = 1.0;
    s.lift_speed = 3.0;
    s.turns = {-1, +1, -1, +1};
    s.cw_duration = 0.8;
    s.ccw_duration = 0.4;
  }
  s.validate();
  return s;
}

SynthSpec SynthSpec::from_json(const json& j) {
  if (!j.is_object()) throw Error(kSpec, "synth spec must be a JSON object");
  if (!j.contains("technique") || !j.at("technique").is_string()) throw Error(kSpec, "missing 'technique'");
  const auto kind = parse_kind(j.at("technique").get<std::string>());
  std::string label = kind == SynthKind::Moxibustion ? "mild" : "reinforce";
  if (j.contains("label")) {
    if (!j.at("label").is_string()) throw Error(kSpec, "'label' must be a string");
    label = j.at("label").get<std::string>();
  }
  if (labels_for(kind).count(label) == 0) throw Error(kSpec, "unknown label '" + label + "'");
  SynthSpec s = defaults(kind, label);

  static const std::set<std::string> known = {
      "technique", "label", "session_id", "target", "skin_point", "skin_normal", "insertion_angle_deg", "depths",
      "thrust_speed", "lift_speed", "base_depth", "approach_distance", "approach_speed", "turns", "cw_duration",
      "ccw_duration", "hold_depth", "twist_pause", "moxa_height", "moxa_amplitude", "moxa_frequency", "moxa_radius",
      "moxa_speed", "moxa_duration", "sample_rate", "noise_sigma", "seed"};
  for (const auto& [key, value] : j.items())
    if (known.count(key) == 0) throw Error(kSpec, "unknown synth field '" + key + "'");

  auto text = [&j](const char* key, std::string& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) throw Error(kSpec, std::string("'") + key + "' must be a string");
    out = j.at(key).get<std::string>();
  };
  text("session_id", s.session_id);
  text("target", s.target);
  if (j.contains("skin_point")) s.skin_point = detail::vec3_from_json(j.at("skin_point"), kSpec, "skin_point");
  if (j.contains("skin_normal")) s.skin_normal = detail::vec3_from_json(j.at("skin_normal"), kSpec, "skin_normal");
  for (auto [key, field] : std::initializer_list<std::pair<const char*, double*>>{
           {"insertion_angle_deg", &s.insertion_angle_deg},
           {"thrust_speed", &s.thrust_speed},
           {"lift_speed", &s.lift_speed},
           {"base_depth", &s.base_depth},
           {"approach_distance", &s.approach_distance},
           {"approach_speed", &s.approach_speed},
           {"cw_duration", &s.cw_duration},
           {"ccw_duration", &s.ccw_duration},
           {"hold_depth", &s.hold_depth},
           {"twist_pause", &s.twist_pause},
           {"moxa_height", &s.moxa_height},
           {"moxa_amplitude", &s.moxa_amplitude},
           {"moxa_frequency", &s.moxa_frequency},
           {"moxa_radius", &s.moxa_radius},
           {"moxa_speed", &s.moxa_speed},
           {"moxa_duration", &s.moxa_duration},
           {"sample_rate", &s.sample_rate},
           {"noise_sigma", &s.noise_sigma}})
    detail::read_number(j, key, *field, kSpec);
  if (j.contains("depths")) {
    const auto& a = j.at("depths");
    if (!a.is_array()) throw Error(kSpec, "'depths' must be an array");
    s.depths.clear();
    for (const auto& v : a) {
      if (!v.is_number()) throw Error(kSpec, "'depths' must hold numbers");
      s.depths.push_back(v.get<double>());
    }
  }
  if (j.contains("turns")) {
    const auto& a = j.at("turns");
    if (!a.is_array()) throw Error(kSpec, "'turns' must be an array");
    s.turns.clear();
    for (const auto& v : a) {
      if (!v.is_number_integer()) throw Error(kSpec, "'turns' must hold integers");
      s.turns.push_back(v.get<int>());
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(kSpec, "'seed' must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  s.validate();
  return s;
}

json SynthSpec::to_json() const {
  json j{{"technique", to_string(kind)},
         {"label", label},
         {"session_id", session_id},
         {"target", target},
         {"skin_point", detail::vec3_to_json(skin_point)},
         {"skin_normal", detail::vec3_to_json(skin_normal)},
         {"sample_rate", sample_rate},
         {"noise_sigma", noise_sigma},
         {"seed", seed}};
  if (is_needle(kind)) {
    j["insertion_angle_deg"] = insertion_angle_deg;
    j["approach_distance"] = approach_distance;
    j["approach_speed"] = approach_speed;
  }
  if (kind == SynthKind::LiftThrust) {
    j["depths"] = depths;
    j["thrust_speed"] = thrust_speed;
    j["lift_speed"] = lift_speed;
    j["base_depth"] = base_depth;
  } else if (kind == SynthKind::Twist) {
    j["turns"] = turns;
    j["cw_duration"] = cw_duration;
    j["ccw_duration"] = ccw_duration;
    j["hold_depth"] = hold_depth;
    j["twist_pause"] = twist_pause;
  } else {
    j["moxa_height"] = moxa_height;
    j["moxa_amplitude"] = moxa_amplitude;
    j["moxa_frequency"] = moxa_frequency;
    j["moxa_radius"] = moxa_radius;
    j["moxa_speed"] = moxa_speed;
    j["moxa_duration"] = moxa_duration;
  }
  return j;
}

Session generate(const SynthSpec& spec) {
  spec.validate();
  if (spec.kind == SynthKind::Moxibustion) return generate_moxa(spec);
  return generate_needle(spec);
}

std::vector<SynthSpec> label_grid() {
  return {
      SynthSpec::defaults(SynthKind::LiftThrust, "reinforce"),
      SynthSpec::defaults(SynthKind::LiftThrust, "reduce"),
      SynthSpec::defaults(SynthKind::Twist, "reinforce"),
      SynthSpec::defaults(SynthKind::Twist, "reduce"),
      SynthSpec::defaults(SynthKind::Moxibustion, "mild"),
      SynthSpec::defaults(SynthKind::Moxibustion, "sparrow"),
      SynthSpec::defaults(SynthKind::Moxibustion, "whirling"),
  };
}

}  // namespace acu
