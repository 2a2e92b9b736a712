#pragma once

#include <array>
#include <cstdint>

namespace acu {

// xoshiro256** seeded through splitmix64. The output stream is fully
// specified so traces are reproducible across platforms and standard
// libraries; normal deviates use the Box-Muller transform, not
// std::normal_distribution.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  // Standard normal.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace acu
