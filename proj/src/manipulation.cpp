#include "acu/manipulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace acu {
namespace {

constexpr double kUnitTolerance = 1e-6;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_unit(const Vec3& v, const std::string& what) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitTolerance)
    throw Error(ErrorCode::InvalidInput, what + " must be a unit vector");
}

template <typename Samples>
void require_timeline(const Samples& samples, std::size_t min_count, const std::string& what) {
  if (samples.size() < min_count)
    throw Error(ErrorCode::InvalidInput, what + " needs at least " + std::to_string(min_count) + " samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].t)) throw Error(ErrorCode::InvalidInput, what + ": non-finite timestamp");
    if (i > 0 && !(samples[i].t > samples[i - 1].t))
      throw Error(ErrorCode::InvalidInput, what + ": timestamps must be strictly increasing");
  }
}

// Angle between a vector and an axis in degrees, [0, 180].
double angle_to_axis_deg(const Vec3& v, const Vec3& axis) {
  return std::atan2(v.cross(axis).norm(), v.dot(axis)) * kRadToDeg;
}

}  // namespace

// ---- validation ------------------------------------------------------------

void NeedleSession::validate() const {
  require_timeline(samples, 2, "needle session");
  require_unit(skin_normal, "skin normal");
  if (!skin_point.allFinite()) throw Error(ErrorCode::InvalidInput, "skin point must be finite");
  for (const auto& s : samples) {
    if (!s.tip.allFinite()) throw Error(ErrorCode::InvalidInput, "needle tip must be finite");
    require_unit(s.direction, "needle direction");
    for (const auto& [name, p] : s.hand)
      if (!p.allFinite()) throw Error(ErrorCode::InvalidInput, "hand joint " + name + " must be finite");
  }
}

void MoxaSession::validate() const {
  require_timeline(samples, 2, "moxa session");
  require_unit(skin_normal, "skin normal");
  if (!target_pos.allFinite()) throw Error(ErrorCode::InvalidInput, "target position must be finite");
  for (const auto& s : samples)
    if (!s.head.allFinite()) throw Error(ErrorCode::InvalidInput, "moxa head must be finite");
}

void PressSession::validate() const {
  require_timeline(samples, 1, "press session");
  if (!target_pos.allFinite()) throw Error(ErrorCode::InvalidInput, "target position must be finite");
  for (const auto& s : samples)
    if (!s.press.allFinite()) throw Error(ErrorCode::InvalidInput, "press position must be finite");
}

void Thresholds::validate() const {
  if (!(stationary_band > 0 && whirl_angle_deg > 0 && whirl_speed > 0 && twist_deadband > 0 && contact_radius > 0 &&
        cycle_prominence > 0))
    throw Error(ErrorCode::InvalidConfig, "thresholds must be positive");
  if (whirl_frame_count < 1) throw Error(ErrorCode::InvalidConfig, "whirl_frame_count must be >= 1");
  if (smoothing_window < 1) throw Error(ErrorCode::InvalidConfig, "smoothing_window must be >= 1");
  if (!(speed_margin >= 0)) throw Error(ErrorCode::InvalidConfig, "speed_margin must be >= 0");
}

// ---- insertion -------------------------------------------------------------

double insertion_angle_deg(const Vec3& direction, const Vec3& skin_normal) {
  const Vec3 d = direction.normalized();
  const Vec3 n = skin_normal.normalized();
  return std::atan2(std::abs(d.dot(n)), d.cross(n).norm()) * kRadToDeg;
}

InsertionClass classify_insertion_angle(double angle_deg) {
  if (angle_deg >= 67.5) return InsertionClass::Perpendicular;
  if (angle_deg >= 30.0) return InsertionClass::Oblique;
  return InsertionClass::Transverse;
}

InsertionEvent detect_insertion(const NeedleSession& session, const Thresholds& thresholds) {
  const auto& s = session.samples;
  const Vec3 n = session.skin_normal.normalized();
  const std::size_t last = s.size() - 1;

  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < s.size() && !start; ++i) {
    if ((s[i].tip - session.skin_point).norm() > thresholds.contact_radius) continue;
    // Two-sample look-ahead keeps single-sample jitter from masking the motion.
    const std::size_t ahead = std::min(i + 2, last);
    const std::size_t behind = ahead == i ? (i > 0 ? i - 1 : i) : i;
    const Vec3 motion = s[ahead].tip - s[behind].tip;
    if (motion.dot(n) < 0.0) start = i;
  }
  if (!start) throw Error(ErrorCode::NoContact, "needle tip never entered the contact sphere moving inward");

  InsertionEvent e;
  e.start_index = *start;
  e.t_start = s[*start].t;
  e.axis = s[*start].direction.normalized();
  e.angle_deg = insertion_angle_deg(e.axis, n);
  e.insertion_class = classify_insertion_angle(e.angle_deg);

  std::size_t max_index = *start;
  double max_pen = 0.0;
  for (std::size_t i = *start; i < s.size(); ++i) {
    const double pen = std::max(0.0, (s[i].tip - session.skin_point).dot(e.axis));
    if (pen > max_pen) {
      max_pen = pen;
      max_index = i;
    }
  }
  e.max_penetration = max_pen;
  e.t_max_depth = s[max_index].t;
  e.vertical_depth = max_pen * std::sin(e.angle_deg / kRadToDeg);
  e.t_end = s[last].t;
  for (std::size_t i = max_index + 1; i < s.size(); ++i) {
    if ((s[i].tip - session.skin_point).dot(e.axis) <= 0.0) {
      e.t_end = s[i].t;
      break;
    }
  }
  return e;
}

// ---- lifting-thrusting -----------------------------------------------------

PenetrationSignal penetration_signal(const NeedleSession& session, const InsertionEvent& event,
                                     const Thresholds& thresholds) {
  PenetrationSignal sig;
  const double sin_angle = std::sin(event.angle_deg / kRadToDeg);
  for (std::size_t i = event.start_index; i < session.samples.size(); ++i) {
    const auto& smp = session.samples[i];
    sig.t.push_back(smp.t);
    sig.depth.push_back(std::max(0.0, (smp.tip - session.skin_point).dot(event.axis)) * sin_angle);
  }
  sig.smoothed = moving_average(sig.depth, thresholds.smoothing_window);
  return sig;
}

namespace {

struct Extrema {
  std::vector<std::size_t> peaks;
  std::vector<std::size_t> valleys;  // valleys.size() == peaks.size() + 1
};

// Alternating peak/valley detection with hysteresis: a peak is confirmed once
// the signal has risen `prominence` above the preceding low and then fallen
// `prominence` below the peak.
Extrema find_extrema(const std::vector<double>& s, double prominence) {
  Extrema ex;
  if (s.empty()) return ex;
  bool rising = true;
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (rising) {
      if (s[i] < s[lo]) {
        lo = i;
        hi = i;
      } else if (s[i] > s[hi]) {
        hi = i;
      }
      if (s[hi] - s[lo] >= prominence && s[hi] - s[i] >= prominence) {
        ex.valleys.push_back(lo);
        ex.peaks.push_back(hi);
        rising = false;
        lo = i;
      }
    } else {
      if (s[i] < s[lo]) lo = i;
      if (s[i] - s[lo] >= prominence) {
        rising = true;
        hi = i;
      }
    }
  }
  if (!ex.peaks.empty()) {
    // The low after the last peak closes the final cycle whether or not the
    // signal rose again afterwards.
    ex.valleys.push_back(lo);
  }
  return ex;
}

// Average speed over the 10%-90% span of a monotone phase between `from` and
// `to` (inclusive, either order in time).
double phase_speed(const std::vector<double>& t, const std::vector<double>& s, std::size_t valley, std::size_t peak) {
  const double base = s[valley];
  const double amp = s[peak] - base;
  const double lo_level = base + 0.1 * amp;
  const double hi_level = base + 0.9 * amp;
  std::size_t i_lo = valley, i_hi = peak;
  if (valley < peak) {
    for (std::size_t i = valley; i <= peak; ++i)
      if (s[i] <= lo_level) i_lo = i;
    for (std::size_t i = i_lo; i <= peak; ++i)
      if (s[i] >= hi_level) {
        i_hi = i;
        break;
      }
  } else {
    for (std::size_t i = peak; i <= valley; ++i)
      if (s[i] <= lo_level) {
        i_lo = i;
        break;
      }
    for (std::size_t i = peak; i <= i_lo; ++i)
      if (s[i] >= hi_level) i_hi = i;
  }
  if (i_lo == i_hi) {
    i_lo = valley;
    i_hi = peak;
  }
  const double dt = std::abs(t[i_hi] - t[i_lo]);
  return dt > 0.0 ? std::abs(s[i_hi] - s[i_lo]) / dt : 0.0;
}

}  // namespace

std::vector<LiftThrustCycle> segment_lift_thrust(const PenetrationSignal& signal, const Thresholds& thresholds) {
  const auto ex = find_extrema(signal.smoothed, thresholds.cycle_prominence);
  std::vector<LiftThrustCycle> cycles;
  for (std::size_t k = 0; k < ex.peaks.size(); ++k) {
    const std::size_t vb = ex.valleys[k];
    const std::size_t p = ex.peaks[k];
    const std::size_t va = ex.valleys[k + 1];
    LiftThrustCycle c;
    const auto first = signal.depth.begin() + static_cast<std::ptrdiff_t>(vb);
    const auto last = signal.depth.begin() + static_cast<std::ptrdiff_t>(va) + 1;
    const auto top = std::max_element(first, last);
    c.depth = *top;
    c.t_peak = signal.t[static_cast<std::size_t>(top - signal.depth.begin())];
    c.t_start = signal.t[vb];
    c.t_end = signal.t[va];
    c.thrust_speed = phase_speed(signal.t, signal.smoothed, vb, p);
    c.lift_speed = phase_speed(signal.t, signal.smoothed, va, p);
    cycles.push_back(c);
  }
  if (cycles.size() < 2)
    throw Error(ErrorCode::InsufficientCycles,
                "found " + std::to_string(cycles.size()) + " lifting-thrusting cycle(s), need 2");
  return cycles;
}

std::vector<LiftThrustCycle> segment_lift_thrust(const NeedleSession& session, const InsertionEvent& event,
                                                 const Thresholds& thresholds) {
  return segment_lift_thrust(penetration_signal(session, event, thresholds), thresholds);
}

LiftThrustClassification classify_lift_thrust(std::span<const LiftThrustCycle> cycles, double speed_margin) {
  if (cycles.size() < 2) throw Error(ErrorCode::InsufficientCycles, "classification needs two cycles");
  const auto faster = [speed_margin](double a, double b) { return a > b * (1.0 + speed_margin); };
  const auto& c1 = cycles[0];
  const auto& c2 = cycles[1];
  LiftThrustClassification r;
  r.deep_then_shallow = c1.depth > c2.depth;
  r.shallow_then_deep = c1.depth < c2.depth;
  r.fast_then_slow = faster(c1.thrust_speed, c1.lift_speed) && faster(c2.thrust_speed, c2.lift_speed);
  r.slow_then_fast = faster(c1.lift_speed, c1.thrust_speed) && faster(c2.lift_speed, c2.thrust_speed);
  if (r.deep_then_shallow && r.fast_then_slow)
    r.method = LiftThrustMethod::Reinforce;
  else if (r.shallow_then_deep && r.slow_then_fast)
    r.method = LiftThrustMethod::Reduce;
  else
    r.method = LiftThrustMethod::Ineffective;
  return r;
}

// ---- twisting --------------------------------------------------------------

double twist_delta(const HandJoints& hand) {
  const auto get = [&hand](const char* key) -> const Vec3& {
    const auto it = hand.find(key);
    if (it == hand.end()) throw Error(ErrorCode::MissingJoint, key);
    return it->second;
  };
  const Vec3& thumb_tip = get(kThumbTip);
  const Vec3& index_tip = get(kIndexTip);
  const Vec3 mid = 0.5 * (get(kIndexProximal) + get(kThumbProximal));
  return (mid - thumb_tip).norm() - (mid - index_tip).norm();
}

std::vector<StateTransition> detect_state_transitions(std::span<const double> delta_d, double deadband) {
  std::vector<StateTransition> out;
  std::optional<TwistState> state;
  // First and last sample of the extremum plateau in the current state. Values
  // within a relative 1e-9 count as ties so that held poses do not pick an
  // arbitrary sample by rounding.
  std::size_t first_ext = 0;
  std::size_t last_ext = 0;
  std::vector<std::size_t> first_of_state;
  for (std::size_t i = 0; i < delta_d.size(); ++i) {
    std::optional<TwistState> seen;
    if (delta_d[i] > deadband)
      seen = TwistState::One;
    else if (delta_d[i] < -deadband)
      seen = TwistState::Two;

    if (!state) {
      if (seen) {
        state = seen;
        first_ext = last_ext = i;
      }
      continue;
    }
    if (seen && *seen != *state) {
      first_of_state.push_back(first_ext);
      out.push_back({*state, *seen, i, last_ext, i});
      state = seen;
      first_ext = last_ext = i;
      continue;
    }
    const double sign = *state == TwistState::One ? 1.0 : -1.0;
    const double gain = sign * (delta_d[i] - delta_d[last_ext]);
    const double tol = 1e-9 * std::max(1.0, std::abs(delta_d[last_ext]));
    if (gain > tol)
      first_ext = last_ext = i;
    else if (gain >= -tol)
      last_ext = i;
  }
  first_of_state.push_back(first_ext);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].to_index = first_of_state[k + 1];
  return out;
}

TwistSequence TwistSequence::from_rotations(std::vector<TwistRotation> rotations) {
  TwistSequence seq;
  seq.rotations = std::move(rotations);
  for (const auto& r : seq.rotations) seq.n_total += r.turns;
  return seq;
}

TwistSequence segment_twists(const NeedleSession& session, const Thresholds& thresholds) {
  return segment_twists(session, thresholds, detect_insertion(session, thresholds).start_index);
}

TwistSequence segment_twists(const NeedleSession& session, const Thresholds& thresholds, std::size_t start_index) {
  const auto& s = session.samples;
  std::vector<double> dd;
  dd.reserve(s.size() - std::min(start_index, s.size()));
  for (std::size_t i = start_index; i < s.size(); ++i) dd.push_back(twist_delta(s[i].hand));
  const auto smoothed = moving_average(dd, thresholds.smoothing_window);
  const auto transitions = detect_state_transitions(smoothed, thresholds.twist_deadband);
  if (transitions.empty()) throw Error(ErrorCode::NoTwistDetected, "delta-d never changed state");

  const auto finger_vector = [&](std::size_t i, const Vec3& axis) {
    const Vec3 w = s[i].hand.at(kThumbTip) - s[i].hand.at(kIndexTip);
    return Vec3(w - w.dot(axis) * axis);
  };

  std::vector<TwistRotation> rotations;
  for (const auto& tr : transitions) {
    const std::size_t a = start_index + tr.from_index;
    const std::size_t b = start_index + tr.to_index;
    const Vec3 axis = s[a].direction.normalized();
    const Vec3 wa = finger_vector(a, axis);
    const Vec3 wb = finger_vector(b, axis);
    const double sweep = wa.cross(wb).dot(axis);
    bool clockwise = tr.from == TwistState::One;
    if (std::abs(sweep) > 1e-12 * wa.norm() * wb.norm()) clockwise = sweep > 0.0;

    TwistRotation r;
    r.direction = clockwise ? TwistDirection::CW : TwistDirection::CCW;
    r.turns = clockwise ? 1 : -1;
    r.start_index = a;
    r.end_index = b;
    r.t_start = s[a].t;
    r.t_end = s[b].t;
    double path = 0.0;
    for (std::size_t i = a; i < b; ++i) path += (s[i + 1].hand.at(kThumbTip) - s[i].hand.at(kThumbTip)).norm();
    r.mean_speed = r.t_end > r.t_start ? path / (r.t_end - r.t_start) : 0.0;
    rotations.push_back(r);
  }
  return TwistSequence::from_rotations(std::move(rotations));
}

Method classify_twist(const TwistSequence& seq) {
  if (seq.rotations.size() < 2)
    throw Error(ErrorCode::InsufficientRotations,
                "found " + std::to_string(seq.rotations.size()) + " rotation(s), need 2");
  return seq.rotations.front().direction == TwistDirection::CW ? Method::Reinforce : Method::Reduce;
}

// ---- moxibustion -----------------------------------------------------------

MoxaClassification classify_moxibustion(const MoxaSession& session, const Thresholds& thresholds) {
  const auto& s = session.samples;
  const double duration = s.back().t - s.front().t;
  if (duration < 1.0) throw Error(ErrorCode::TooShort, "moxibustion session shorter than 1 s");

  const Vec3 n = session.skin_normal.normalized();
  std::vector<Vec3> heads;
  heads.reserve(s.size());
  for (const auto& smp : s) heads.push_back(smp.head);
  const auto smooth = moving_average(heads, thresholds.smoothing_window);

  MoxaClassification r;
  const std::size_t count = s.size();
  const std::size_t half = static_cast<std::size_t>(std::max(1, thresholds.smoothing_window / 2));
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  r.speed.resize(count);
  r.whirl_flags.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 offset = smooth[i] - session.target_pos;
    const double dist = offset.norm();
    dmin = std::min(dmin, dist);
    dmax = std::max(dmax, dist);

    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(i + half, count - 1);
    r.speed[i] = (smooth[hi] - smooth[lo]).norm() / (s[hi].t - s[lo].t);

    const bool off_axis = dist > 0.0 && angle_to_axis_deg(offset, n) > thresholds.whirl_angle_deg;
    r.whirl_flags[i] = off_axis && r.speed[i] > thresholds.whirl_speed;
    if (r.whirl_flags[i]) ++r.whirl_frames;
  }
  r.distance_spread = dmax - dmin;

  double area = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    const double h0 = (s[i - 1].head - session.target_pos).dot(n);
    const double h1 = (s[i].head - session.target_pos).dot(n);
    area += 0.5 * (h0 + h1) * (s[i].t - s[i - 1].t);
  }
  r.d_moxi = area / duration;

  // A centred orbit keeps a constant distance to the acupoint, so the whirl
  // count is checked before the stationary test.
  if (r.whirl_frames >= thresholds.whirl_frame_count)
    r.type = MoxaType::Whirling;
  else if (r.distance_spread <= thresholds.stationary_band)
    r.type = MoxaType::Mild;
  else
    r.type = MoxaType::SparrowPecking;
  return r;
}

double pressing_deviation(const PressSession& session) {
  if (session.samples.empty()) throw Error(ErrorCode::InvalidInput, "press session has no samples");
  return (session.samples.back().press - session.target_pos).norm();
}

}  // namespace acu
