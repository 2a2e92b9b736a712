#pragma once

#include <Eigen/Geometry>

#include "acu/anatomy.hpp"
#include "acu/rng.hpp"

namespace acu::test {

inline double uniform(Xoshiro256& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline Vec3 random_vec(Xoshiro256& rng, double extent) {
  return {uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -extent, extent)};
}

// Every known joint at an independent random position.
inline SkeletonFrame random_skeleton(Xoshiro256& rng, double extent = 50.0) {
  SkeletonFrame f;
  f.timestamp = 0.0;
  for (const auto& name : known_joint_names()) f.joints[name] = random_vec(rng, extent);
  return f;
}

inline Eigen::Matrix3d random_rotation(Xoshiro256& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

template <typename F>
SkeletonFrame map_joints(const SkeletonFrame& in, F f) {
  SkeletonFrame out = in;
  for (auto& [name, p] : out.joints) p = f(p);
  return out;
}

}  // namespace acu::test
