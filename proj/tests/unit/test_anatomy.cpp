#include <gtest/gtest.h>

#include <fstream>
#include <map>

#include "acu/anatomy.hpp"
#include "locate_oracle.hpp"
#include "support.hpp"

using namespace acu;
using nlohmann::json;

TEST(Anatomy, BuiltinTableHasTheTwentyFourRepresentativePoints) {
  const auto& table = AcupointTable::builtin();
  ASSERT_EQ(table.size(), 24u);
  const std::vector<std::string> ids = {"LU10",    "HT8",    "PC8",    "EX-UE10", "EX-UE11", "SI1",    "HT9",  "TE1",
                                        "TE3",     "EX-UE5", "LI3",    "LI4",     "EX-UE9",  "EX-UE7", "EX-UE4", "EX-UE8",
                                        "EX-UE6",  "CV22",   "CV17",   "ST17",    "ST35",    "ST36",   "ST41", "LU5"};
  for (const auto& id : ids) EXPECT_NE(table.find(id), nullptr) << id;
  int hand = 0;
  for (const auto& d : table.defs()) hand += d.region == Region::Hand;
  EXPECT_EQ(hand, 17);
}

TEST(Anatomy, YujiIsMidpointOfThumbProximalAndMetacarpalJoints) {
  SkeletonFrame f;
  f.joints["right_hand_thumb_mcp"] = Vec3(2.0, 4.0, -6.0);
  f.joints["right_hand_thumb_cmc"] = Vec3(4.0, 0.0, 10.0);
  const Vec3 p = locate_acupoint(*AcupointTable::builtin().find("LU10"), f);
  EXPECT_NEAR((p - Vec3(3.0, 2.0, 2.0)).norm(), 0.0, 1e-12);
}

TEST(Anatomy, EveryEntryMatchesItsHandExpandedAffineCombination) {
  const json raw = oracle::raw_table();
  Xoshiro256 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto frame = test::random_skeleton(rng);
    const auto result = locate_all(AcupointTable::builtin(), frame);
    ASSERT_TRUE(result.failures.empty());
    for (const auto& entry : raw.at("acupoints")) {
      const auto id = entry.at("id").get<std::string>();
      const Vec3* got = result.find(id);
      ASSERT_NE(got, nullptr) << id;
      EXPECT_LT((*got - oracle::expand(entry, frame)).norm(), 1e-9) << id;
    }
  }
}

TEST(Anatomy, LocatedPointsLieOnTheirDefiningSegments) {
  Xoshiro256 rng(12);
  const auto frame = test::random_skeleton(rng);
  for (const auto& d : AcupointTable::builtin().defs()) {
    const Vec3 p1 = resolve_reference_point(d.p1, frame);
    const Vec3 p2 = resolve_reference_point(d.p2, frame);
    const Vec3 a = locate_acupoint(d, frame);
    EXPECT_NEAR((a - p1).norm() + (a - p2).norm(), (p2 - p1).norm(), 1e-9) << d.id;
    EXPECT_NEAR((a - p1).norm(), d.lambda * (p2 - p1).norm(), 1e-9) << d.id;
  }
}

TEST(Anatomy, RigidTransformInvarianceAndScaleCovariance) {
  Xoshiro256 rng(13);
  const auto& table = AcupointTable::builtin();
  for (int trial = 0; trial < 200; ++trial) {
    const auto frame = test::random_skeleton(rng);
    const Eigen::Matrix3d rot = test::random_rotation(rng);
    const Vec3 shift = test::random_vec(rng, 100.0);
    const double scale = test::uniform(rng, 0.2, 5.0);
    const auto base = locate_all(table, frame);
    const auto moved = locate_all(table, test::map_joints(frame, [&](const Vec3& p) { return Vec3(rot * p + shift); }));
    const auto scaled = locate_all(table, test::map_joints(frame, [&](const Vec3& p) { return Vec3(scale * p); }));
    for (std::size_t i = 0; i < base.positions.size(); ++i) {
      const Vec3& p = base.positions[i].second;
      EXPECT_LT((moved.positions[i].second - (rot * p + shift)).norm(), 1e-9);
      EXPECT_LT((scaled.positions[i].second - scale * p).norm(), 1e-9);
    }
  }
}

TEST(Anatomy, MissingJointFailsOnlyTheDependentAcupoints) {
  Xoshiro256 rng(14);
  auto frame = test::random_skeleton(rng);
  frame.joints.erase("right_hand_thumb_cmc");
  EXPECT_THROW(
      {
        try {
          locate_acupoint(*AcupointTable::builtin().find("LU10"), frame);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::MissingJoint);
          throw;
        }
      },
      Error);
  const auto result = locate_all(AcupointTable::builtin(), frame);
  ASSERT_FALSE(result.failures.empty());
  EXPECT_EQ(result.positions.size() + result.failures.size(), 24u);
  for (const auto& f : result.failures) EXPECT_EQ(f.code, ErrorCode::MissingJoint);
  EXPECT_EQ(result.find("LU10"), nullptr);
}

TEST(Anatomy, LowConfidenceJointsAreDropped) {
  const json j = {{"timestamp", 1.5},
                  {"joints",
                   {{"right_hand_thumb_mcp", {{"position", {0, 0, 0}}, {"confidence", 0.9}}},
                    {"right_hand_thumb_cmc", {{"position", {1, 0, 0}}, {"confidence", 0.3}}}}}};
  const auto f = SkeletonFrame::from_json(j);
  EXPECT_NE(f.find("right_hand_thumb_mcp"), nullptr);
  EXPECT_EQ(f.find("right_hand_thumb_cmc"), nullptr);
  EXPECT_EQ(SkeletonFrame::from_json(j, 0.2).joints.size(), 2u);
}

TEST(Anatomy, NestingBeyondFourLevelsIsRejected) {
  auto spec = ReferencePointSpec::joint("right_wrist");
  for (int i = 0; i < 4; ++i) spec = ReferencePointSpec::between(spec, ReferencePointSpec::joint("right_elbow"), 0.5);
  EXPECT_EQ(spec.depth(), 4);
  SkeletonFrame f;
  f.joints["right_wrist"] = Vec3(0, 0, 0);
  f.joints["right_elbow"] = Vec3(16, 0, 0);
  // Depth four resolves: the wrist weight halves at every level.
  EXPECT_NEAR(resolve_reference_point(spec, f).x(), 15.0, 1e-12);

  const auto deeper = ReferencePointSpec::between(spec, ReferencePointSpec::joint("right_elbow"), 0.5);
  try {
    resolve_reference_point(deeper, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RecursionLimitExceeded);
  }
  AcupointDef d;
  d.id = "X";
  d.p1 = deeper;
  d.p2 = ReferencePointSpec::joint("right_wrist");
  EXPECT_THROW(AcupointTable("v", {d}), Error);
}

TEST(Anatomy, RatiosOutsideTheUnitIntervalAreRejected) {
  EXPECT_THROW(ReferencePointSpec::between(ReferencePointSpec::joint("a"), ReferencePointSpec::joint("b"), 1.5), Error);
  AcupointDef d;
  d.id = "X";
  d.p1 = ReferencePointSpec::joint("right_wrist");
  d.p2 = ReferencePointSpec::joint("right_elbow");
  d.lambda = -0.1;
  EXPECT_THROW(AcupointTable("v", {d}), Error);
}

TEST(Anatomy, ReferencePointJsonRoundTrip) {
  for (const auto& d : AcupointTable::builtin().defs()) {
    const auto again = ReferencePointSpec::from_json(d.p1.to_json());
    EXPECT_EQ(again.to_json(), d.p1.to_json());
  }
}

TEST(Anatomy, NeedlingDepthsAreConvertedFromCun) {
  const auto* lu10 = AcupointTable::builtin().find("LU10");
  ASSERT_TRUE(lu10->needling && lu10->needling->deep);
  EXPECT_DOUBLE_EQ(lu10->needling->deep->min, 0.6 * 3.33);
  EXPECT_DOUBLE_EQ(lu10->needling->shallow->upper, lu10->needling->deep->max);
}

TEST(LocalizationError, AbsoluteErrorIsRelativeErrorTimesLength) {
  // Hand normalization pair spans 4.9 cm; half of it as deviation.
  const auto e = localization_error(Vec2(10.0, 0.0), Vec2(0.0, 0.0), 20.0, 4.9, default_norm_pair(Region::Hand));
  EXPECT_DOUBLE_EQ(e.re, 0.5);
  EXPECT_DOUBLE_EQ(e.ae, 2.45);
  EXPECT_EQ(e.norm_pair.first, "EX-UE10");
  EXPECT_EQ(e.norm_pair.second, "EX-UE11");
  EXPECT_EQ(default_norm_pair(Region::Limb), std::make_pair(std::string("LU5"), std::string("PC7")));

  Xoshiro256 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = test::random_vec(rng, 10), b = test::random_vec(rng, 10);
    const double d = test::uniform(rng, 0.1, 50), l = test::uniform(rng, 0.1, 50);
    const auto m = localization_error(a, b, d, l);
    EXPECT_EQ(m.ae, m.re * l);
  }
}

TEST(LocalizationError, ZeroNormalizationIsAnError) {
  try {
    localization_error(Vec2(1, 0), Vec2(0, 0), 0.0, 4.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroNormalization);
  }
}

TEST(Anatomy, RegionCriteria) {
  EXPECT_DOUBLE_EQ(criteria_for(Region::Hand).precise, 0.56);
  EXPECT_DOUBLE_EQ(criteria_for(Region::Hand).general, 1.13);
  EXPECT_DOUBLE_EQ(criteria_for(Region::Limb).precise, 0.94);
  EXPECT_DOUBLE_EQ(criteria_for(Region::Limb).general, 1.90);
  EXPECT_DOUBLE_EQ(criteria_for(Region::Torso).precise, 1.16);
  EXPECT_DOUBLE_EQ(criteria_for(Region::Torso).general, 2.14);
}
