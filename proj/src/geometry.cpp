#include "acu/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace acu {
namespace {

template <typename T>
std::vector<T> centered_average(std::span<const T> values, int window, T zero) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  std::vector<T> out(values.begin(), values.end());
  if (window <= 1 || n == 0) return out;
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    T sum = zero;
    for (std::ptrdiff_t k = i - h; k <= i + h; ++k) sum += values[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

}  // namespace

std::vector<double> moving_average(std::span<const double> values, int window) {
  return centered_average<double>(values, window, 0.0);
}

std::vector<Vec3> moving_average(std::span<const Vec3> values, int window) {
  return centered_average<Vec3>(values, window, Vec3::Zero());
}

Vec3 any_orthogonal(const Vec3& axis) {
  const Vec3 a = axis.normalized();
  const Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return a.cross(helper).normalized();
}

}  // namespace acu
