#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acu/manipulation.hpp"
#include "acu/rng.hpp"
#include "acu/synth.hpp"
#include "support.hpp"

using namespace acu;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidInput;
}

NeedleSession needle(SynthKind kind, const std::string& label, void (*tweak)(SynthSpec&) = nullptr) {
  auto spec = SynthSpec::defaults(kind, label);
  if (tweak) tweak(spec);
  return std::get<NeedleSession>(generate(spec));
}

MoxaSession moxa(const std::string& label) {
  return std::get<MoxaSession>(generate(SynthSpec::defaults(SynthKind::Moxibustion, label)));
}

Vec3 at_angle_to_surface(double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  return Vec3(std::cos(a), 0.0, -std::sin(a));
}

template <typename S>
S reversed(const S& in) {
  S out = in;
  const double end = in.samples.back().t;
  std::reverse(out.samples.begin(), out.samples.end());
  for (auto& s : out.samples) s.t = end - s.t;
  return out;
}

NeedleSession transformed(const NeedleSession& in, const Eigen::Matrix3d& r, const Vec3& shift) {
  NeedleSession out = in;
  out.skin_point = r * in.skin_point + shift;
  out.skin_normal = r * in.skin_normal;
  for (auto& s : out.samples) {
    s.tip = r * s.tip + shift;
    s.direction = r * s.direction;
    for (auto& [k, p] : s.hand) p = r * p + shift;
  }
  return out;
}

}  // namespace

TEST(Insertion, AngleClasses) {
  const Vec3 n = Vec3::UnitZ();
  EXPECT_NEAR(insertion_angle_deg(-n, n), 90.0, 1e-12);
  EXPECT_EQ(classify_insertion_angle(insertion_angle_deg(-n, n)), InsertionClass::Perpendicular);
  EXPECT_NEAR(insertion_angle_deg(at_angle_to_surface(45.0), n), 45.0, 1e-9);
  EXPECT_EQ(classify_insertion_angle(insertion_angle_deg(at_angle_to_surface(45.0), n)), InsertionClass::Oblique);
  EXPECT_EQ(classify_insertion_angle(insertion_angle_deg(at_angle_to_surface(15.0), n)), InsertionClass::Transverse);
  EXPECT_EQ(classify_insertion_angle(insertion_angle_deg(at_angle_to_surface(29.9), n)), InsertionClass::Transverse);
  EXPECT_EQ(classify_insertion_angle(insertion_angle_deg(at_angle_to_surface(30.1), n)), InsertionClass::Oblique);
  EXPECT_EQ(classify_insertion_angle(67.4), InsertionClass::Oblique);
  EXPECT_EQ(classify_insertion_angle(67.6), InsertionClass::Perpendicular);
}

TEST(Insertion, DetectsContactAndDepth) {
  const auto s = needle(SynthKind::LiftThrust, "reinforce");
  const auto e = detect_insertion(s, Thresholds{});
  // Tip approaches from 2 cm at 2 cm/s; the 0.56 cm sphere is entered at t = 0.72 s.
  EXPECT_GE(e.t_start, 0.72);
  EXPECT_LT(e.t_start, 0.72 + 1.0 / 90.0);
  EXPECT_NEAR(e.angle_deg, 90.0, 1e-9);
  EXPECT_NEAR(e.max_penetration, 2.0, 1e-9);
  EXPECT_NEAR(e.vertical_depth, 2.0, 1e-9);
  EXPECT_LE(e.t_start, e.t_max_depth);
  EXPECT_LE(e.t_max_depth, e.t_end);

  const auto oblique = needle(SynthKind::LiftThrust, "reinforce", [](SynthSpec& sp) { sp.insertion_angle_deg = 45.0; });
  const auto eo = detect_insertion(oblique, Thresholds{});
  EXPECT_EQ(eo.insertion_class, InsertionClass::Oblique);
  EXPECT_NEAR(eo.vertical_depth, 2.0, 1e-9);
  EXPECT_NEAR(eo.max_penetration, 2.0 / std::sin(std::numbers::pi / 4), 1e-9);
  EXPECT_LE(eo.vertical_depth, eo.max_penetration);
}

TEST(Insertion, NoContact) {
  auto s = needle(SynthKind::LiftThrust, "reinforce");
  for (auto& smp : s.samples) smp.tip += Vec3(5.0, 0.0, 0.0);
  EXPECT_EQ(code_of([&] { detect_insertion(s, Thresholds{}); }), ErrorCode::NoContact);
}

TEST(LiftThrust, TriangleWaveGivesExactPeakDepths) {
  const auto s = needle(SynthKind::LiftThrust, "reinforce");
  const auto e = detect_insertion(s, Thresholds{});
  const auto cycles = segment_lift_thrust(s, e, Thresholds{});
  ASSERT_EQ(cycles.size(), 2u);
  EXPECT_NEAR(cycles[0].depth, 2.0, 1e-9);
  EXPECT_NEAR(cycles[1].depth, 0.8, 1e-9);
  EXPECT_NEAR(cycles[0].t_peak, 1.7, 1e-9);
  EXPECT_NEAR(cycles[1].t_peak, 3.7, 1e-9);
  // The outer phases blend in the approach and withdrawal; the inner ones are single ramps.
  EXPECT_NEAR(cycles[0].lift_speed, 1.0, 1e-6);
  EXPECT_NEAR(cycles[1].thrust_speed, 3.0, 1e-6);
}

TEST(LiftThrust, SymmetricRampsGiveEqualSpeeds) {
  const auto s = needle(SynthKind::LiftThrust, "reinforce", [](SynthSpec& sp) {
    sp.thrust_speed = 1.0;
    sp.lift_speed = 1.0;
    sp.approach_speed = 1.0;
  });
  const auto cycles = segment_lift_thrust(s, detect_insertion(s, Thresholds{}), Thresholds{});
  for (const auto& c : cycles) {
    EXPECT_NEAR(c.thrust_speed, 1.0, 1e-6);
    EXPECT_NEAR(c.lift_speed, 1.0, 1e-6);
  }
  EXPECT_EQ(classify_lift_thrust(cycles).method, LiftThrustMethod::Ineffective);
}

TEST(LiftThrust, ConstantDepthHasNoCycles) {
  PenetrationSignal sig;
  for (int i = 0; i < 300; ++i) {
    sig.t.push_back(i / 90.0);
    sig.depth.push_back(1.0);
  }
  sig.smoothed = sig.depth;
  EXPECT_EQ(code_of([&] { segment_lift_thrust(sig, Thresholds{}); }), ErrorCode::InsufficientCycles);
}

TEST(LiftThrust, ClassificationRules) {
  const Thresholds thr;
  auto classify = [&](const NeedleSession& s) {
    return classify_lift_thrust(segment_lift_thrust(s, detect_insertion(s, thr), thr)).method;
  };
  EXPECT_EQ(classify(needle(SynthKind::LiftThrust, "reinforce")), LiftThrustMethod::Reinforce);
  EXPECT_EQ(classify(needle(SynthKind::LiftThrust, "reduce")), LiftThrustMethod::Reduce);
  // Deep then shallow but lifting faster than thrusting.
  EXPECT_EQ(classify(needle(SynthKind::LiftThrust, "reinforce",
                            [](SynthSpec& sp) {
                              sp.thrust_speed = 1.0;
                              sp.lift_speed = 3.0;
                            })),
            LiftThrustMethod::Ineffective);

  std::vector<LiftThrustCycle> one(1);
  EXPECT_EQ(code_of([&] { classify_lift_thrust(one); }), ErrorCode::InsufficientCycles);
  const std::vector<LiftThrustCycle> within_margin{{2.0, 1.05, 1.0, 0, 0, 0}, {0.8, 1.05, 1.0, 0, 0, 0}};
  EXPECT_EQ(classify_lift_thrust(within_margin).method, LiftThrustMethod::Ineffective);
}

TEST(LiftThrust, TimeReversalSwapsReinforceAndReduce) {
  const Thresholds thr;
  for (const auto& [label, expected] : {std::pair{"reinforce", LiftThrustMethod::Reduce},
                                        std::pair{"reduce", LiftThrustMethod::Reinforce}}) {
    const auto s = reversed(needle(SynthKind::LiftThrust, label));
    const auto cycles = segment_lift_thrust(s, detect_insertion(s, thr), thr);
    EXPECT_EQ(classify_lift_thrust(cycles).method, expected) << label;
  }
}

TEST(Manipulation, RigidTransformInvariance) {
  Xoshiro256 rng(41);
  const Thresholds thr;
  const auto lt = needle(SynthKind::LiftThrust, "reinforce", [](SynthSpec& sp) { sp.insertion_angle_deg = 50.0; });
  const auto tw = needle(SynthKind::Twist, "reduce");
  const auto base_e = detect_insertion(lt, thr);
  const auto base_c = segment_lift_thrust(lt, base_e, thr);
  const auto base_t = segment_twists(tw, thr);
  const auto mx = moxa("whirling");
  const auto base_m = classify_moxibustion(mx, thr);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Matrix3d r = test::random_rotation(rng);
    const Vec3 shift = test::random_vec(rng, 100.0);
    const auto lt2 = transformed(lt, r, shift);
    const auto e = detect_insertion(lt2, thr);
    EXPECT_NEAR(e.angle_deg, base_e.angle_deg, 1e-6);
    EXPECT_EQ(e.start_index, base_e.start_index);
    const auto c = segment_lift_thrust(lt2, e, thr);
    ASSERT_EQ(c.size(), base_c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      EXPECT_NEAR(c[k].depth, base_c[k].depth, 1e-6);
      EXPECT_NEAR(c[k].thrust_speed, base_c[k].thrust_speed, 1e-6);
      EXPECT_NEAR(c[k].lift_speed, base_c[k].lift_speed, 1e-6);
    }
    const auto t = segment_twists(transformed(tw, r, shift), thr);
    ASSERT_EQ(t.rotations.size(), base_t.rotations.size());
    for (std::size_t k = 0; k < t.rotations.size(); ++k) {
      EXPECT_EQ(t.rotations[k].direction, base_t.rotations[k].direction);
      EXPECT_NEAR(t.rotations[k].mean_speed, base_t.rotations[k].mean_speed, 1e-6);
    }

    MoxaSession m2 = mx;
    m2.target_pos = r * mx.target_pos + shift;
    m2.skin_normal = r * mx.skin_normal;
    for (auto& s : m2.samples) s.head = r * s.head + shift;
    const auto m = classify_moxibustion(m2, thr);
    EXPECT_EQ(m.type, base_m.type);
    EXPECT_NEAR(m.d_moxi, base_m.d_moxi, 1e-6);
    EXPECT_EQ(m.whirl_frames, base_m.whirl_frames);
  }
}

TEST(Twist, DeltaDExamples) {
  HandJoints h{{kThumbProximal, Vec3(0, 1, 0)},
               {kIndexProximal, Vec3(0, -1, 0)},
               {kThumbTip, Vec3(3, 4, 0)},
               {kIndexTip, Vec3(3, -4, 0)}};
  EXPECT_EQ(twist_delta(h), 0.0);
  h[kThumbTip] = Vec3(0, 0, 5);
  h[kIndexTip] = Vec3(3, 0, 0);
  EXPECT_DOUBLE_EQ(twist_delta(h), 2.0);

  Xoshiro256 rng(42);
  for (int i = 0; i < 1000; ++i) {
    HandJoints a{{kThumbProximal, test::random_vec(rng, 5)},
                 {kIndexProximal, test::random_vec(rng, 5)},
                 {kThumbTip, test::random_vec(rng, 5)},
                 {kIndexTip, test::random_vec(rng, 5)}};
    HandJoints b = a;
    std::swap(b[kThumbTip], b[kIndexTip]);
    EXPECT_EQ(twist_delta(b), -twist_delta(a));
  }
  h.erase(kIndexTip);
  EXPECT_EQ(code_of([&] { twist_delta(h); }), ErrorCode::MissingJoint);
}

TEST(Twist, StateTransitionsOnSquareWave) {
  std::vector<double> dd;
  for (double level : {1.0, -1.0, 1.0, -1.0, 1.0})
    for (int k = 0; k < 10; ++k) dd.push_back(level);
  const auto tr = detect_state_transitions(dd, 0.0);
  ASSERT_EQ(tr.size(), 4u);
  EXPECT_EQ(tr[0].from, TwistState::One);
  EXPECT_EQ(tr[0].to, TwistState::Two);
  EXPECT_EQ(tr[0].flip_index, 10u);
  std::vector<TwistRotation> rot(tr.size());
  EXPECT_EQ(TwistSequence::from_rotations(rot).full_cycles(), 2);

  // Excursions inside the deadband never flip the state.
  const std::vector<double> small{0.5, 0.1, -0.1, 0.1, -0.15, 0.5};
  EXPECT_TRUE(detect_state_transitions(small, 0.2).empty());
}

TEST(Twist, SynthesizedSequences) {
  const Thresholds thr;
  const auto rein = segment_twists(needle(SynthKind::Twist, "reinforce"), thr);
  ASSERT_EQ(rein.rotations.size(), 4u);
  const TwistDirection expected[] = {TwistDirection::CW, TwistDirection::CCW, TwistDirection::CW, TwistDirection::CCW};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(rein.rotations[i].direction, expected[i]);
  EXPECT_EQ(rein.n_total, 0);
  EXPECT_EQ(rein.full_cycles(), 2);
  EXPECT_EQ(classify_twist(rein), Method::Reinforce);
  // Clockwise rotations are generated faster than counter-clockwise ones.
  EXPECT_GT(rein.rotations[0].mean_speed, rein.rotations[1].mean_speed);

  const auto redu = segment_twists(needle(SynthKind::Twist, "reduce"), thr);
  EXPECT_EQ(redu.rotations.front().direction, TwistDirection::CCW);
  EXPECT_EQ(classify_twist(redu), Method::Reduce);

  const auto unbalanced = segment_twists(
      needle(SynthKind::Twist, "reinforce", [](SynthSpec& sp) { sp.turns = {+1, -1, +1}; }), thr);
  EXPECT_EQ(unbalanced.n_total, 1);
}

TEST(Twist, ConstantDeltaDIsNoTwist) {
  auto s = needle(SynthKind::Twist, "reinforce");
  const auto first = s.samples.front().hand;
  for (auto& smp : s.samples) smp.hand = first;
  EXPECT_EQ(code_of([&] { segment_twists(s, Thresholds{}); }), ErrorCode::NoTwistDetected);
}

TEST(Twist, ClassificationByFirstRotation) {
  auto seq = [](std::initializer_list<TwistDirection> dirs) {
    std::vector<TwistRotation> r;
    for (auto d : dirs) r.push_back({d, d == TwistDirection::CW ? 1 : -1});
    return TwistSequence::from_rotations(r);
  };
  using enum TwistDirection;
  EXPECT_EQ(classify_twist(seq({CW, CCW})), Method::Reinforce);
  EXPECT_EQ(classify_twist(seq({CCW, CW})), Method::Reduce);
  EXPECT_EQ(classify_twist(seq({CW, CW, CCW})), Method::Reinforce);
  EXPECT_EQ(seq({CW, CW, CCW}).n_total, 1);
  EXPECT_EQ(code_of([&] { classify_twist(seq({CW})); }), ErrorCode::InsufficientRotations);
}

TEST(Twist, ConcatenationAddsNetTurns) {
  const Thresholds thr;
  const auto a = needle(SynthKind::Twist, "reinforce", [](SynthSpec& sp) { sp.turns = {+1, -1, +1}; });
  const auto b = needle(SynthKind::Twist, "reduce", [](SynthSpec& sp) { sp.turns = {-1, +1, -1}; });
  NeedleSession ab = a;
  const double offset = a.samples.back().t + 1.0 / 90.0;
  for (auto smp : b.samples) {
    smp.t += offset;
    ab.samples.push_back(smp);
  }
  const auto na = segment_twists(a, thr, 0).n_total;
  const auto nb = segment_twists(b, thr, 0).n_total;
  EXPECT_EQ(na, 1);
  EXPECT_EQ(nb, -1);
  EXPECT_EQ(segment_twists(ab, thr, 0).n_total, na + nb);
}

TEST(Moxibustion, Types) {
  const Thresholds thr;
  const auto mild = classify_moxibustion(moxa("mild"), thr);
  EXPECT_EQ(mild.type, MoxaType::Mild);
  EXPECT_NEAR(mild.d_moxi, 3.0, 1e-9);
  EXPECT_LE(mild.distance_spread, thr.stationary_band);
  EXPECT_EQ(classify_moxibustion(moxa("sparrow"), thr).type, MoxaType::SparrowPecking);
  const auto whirl = classify_moxibustion(moxa("whirling"), thr);
  EXPECT_EQ(whirl.type, MoxaType::Whirling);
  // Every frame of the orbit is both off-axis and fast.
  EXPECT_EQ(whirl.whirl_frames, static_cast<int>(whirl.whirl_flags.size()));
  EXPECT_NEAR(whirl.d_moxi, 3.0, 1e-9);
}

TEST(Moxibustion, StaticButMisplacedStickStaysMild) {
  auto s = moxa("mild");
  for (auto& smp : s.samples) smp.head += Vec3(2.5, 0.0, 0.0);
  const auto c = classify_moxibustion(s, Thresholds{});
  EXPECT_EQ(c.type, MoxaType::Mild);
  EXPECT_EQ(c.whirl_frames, 0);
}

TEST(Moxibustion, TooShort) {
  auto s = moxa("mild");
  s.samples.resize(50);
  EXPECT_EQ(code_of([&] { classify_moxibustion(s, Thresholds{}); }), ErrorCode::TooShort);
}

TEST(Acupressure, PressingDeviation) {
  PressSession s;
  s.target_pos = Vec3(1, 2, 3);
  s.samples = {{0.0, Vec3(9, 9, 9)}, {1.0, Vec3(4, 6, 3)}};
  EXPECT_DOUBLE_EQ(pressing_deviation(s), 5.0);
}

TEST(Sessions, Validation) {
  auto s = needle(SynthKind::LiftThrust, "reinforce");
  auto one = s;
  one.samples.resize(1);
  EXPECT_EQ(code_of([&] { one.validate(); }), ErrorCode::InvalidInput);
  auto unordered = s;
  unordered.samples[3].t = unordered.samples[2].t;
  EXPECT_EQ(code_of([&] { unordered.validate(); }), ErrorCode::InvalidInput);
  auto skewed = s;
  skewed.samples[0].direction = Vec3(0, 0, -2);
  EXPECT_EQ(code_of([&] { skewed.validate(); }), ErrorCode::InvalidInput);
  EXPECT_NO_THROW(s.validate());

  Thresholds t;
  t.whirl_frame_count = 0;
  EXPECT_THROW(t.validate(), Error);
}
