#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace acu {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

// Centered moving average. The window shrinks symmetrically at the ends so the
// output has the same length as the input and no samples are extrapolated.
std::vector<double> moving_average(std::span<const double> values, int window);
std::vector<Vec3> moving_average(std::span<const Vec3> values, int window);

// Any unit vector orthogonal to `axis` (which must be non-zero).
Vec3 any_orthogonal(const Vec3& axis);

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace acu
