#pragma once

// Second, independently typed path for the piecewise scoring rubric. Each
// function lists its branches as (condition, value) in the order they are
// defined; tests compare the library against these.

#include <cmath>
#include <vector>

#include "acu/rng.hpp"
#include "acu/scoring.hpp"

namespace acu::oracle {

inline double AL(double d, double r_min, double r_max, double C) {
  if (d >= 0 && d < r_min) return C;
  if (r_min <= d && d < r_max) return C * std::pow(d - r_max, 2) / std::pow(r_min - r_max, 2);
  return 0;
}

inline double IA(double th, double th_min, double th_max, double C) {
  if (0 <= th && th < th_min) return C;
  if (th_min <= th && th < th_max) return C * std::pow(th - th_max, 2) / std::pow(th_min - th_max, 2);
  return 0;
}

inline double DN(double d, const DepthBounds& b, double C) {
  if (0 <= d && d < b.lower) return 0;
  if (b.lower <= d && d < b.min) return C * (d - b.lower) / (b.min - b.lower);
  if (b.min <= d && d < b.max) return C;
  if (b.max <= d && d < b.upper) return C * std::pow(d - b.upper, 2) / std::pow(b.max - b.upper, 2);
  return 0;
}

inline double SN(double d, const DepthBounds& b, double C) {
  if (b.lower <= d && d < b.min) return C * d / b.min;
  if (b.min <= d && d < b.max) return C;
  if (b.max <= d && d < b.upper) return C * (d - b.upper) / (b.max - b.upper);
  return 0;  // at or above upper, and the undefined stretch below lower
}

inline double MD(double d, const DepthBounds& b, double C) {
  if (0 <= d && d < b.lower) return 0;
  if (b.lower <= d && d < b.min) return C * std::pow(d - b.lower, 2) / std::pow(b.min - b.lower, 2);
  if (b.min <= d && d < b.max) return C;
  if (b.max <= d && d < b.upper) return C * (d - b.upper) / (b.max - b.upper);
  return 0;
}

// A random configuration satisfying every ScoringConfig invariant. Gaps
// between consecutive knots are at least 0.05 so slopes stay bounded.
inline ScoringConfig random_config(Xoshiro256& rng) {
  auto u = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  ScoringConfig c;
  c.full_score = u(1.0, 1000.0);
  for (auto& [region, r] : c.acupressure) {
    r.r_min = u(0.05, 3.0);
    r.r_max = r.r_min + u(0.05, 3.0);
  }
  c.class_specific_theta_max = false;
  c.insertion.theta_min = u(0.5, 20.0);
  c.insertion.theta_max = c.insertion.theta_min + u(0.5, 40.0);

  // Half the configs keep shallow.lower at 0, half use a positive lower bound.
  const double s_lower = rng.uniform() < 0.5 ? 0.0 : u(0.05, 1.0);
  const double s_min = s_lower + u(0.05, 1.0);
  const double s_max = s_min + u(0.05, 1.5);
  const double d_min = s_min + u(0.05, 2.0);
  const double d_max = std::max(d_min, s_max) + u(0.05, 2.0);
  c.shallow = {s_lower, s_min, s_max, d_max};
  c.deep = {s_min, d_min, d_max, d_max + u(0.05, 2.0)};
  const double m_lower = u(0.0, 3.0);
  const double m_min = m_lower + u(0.05, 1.0);
  const double m_max = m_min + u(0.05, 2.0);
  c.moxi = {m_lower, m_min, m_max, m_max + u(0.05, 2.0)};
  c.mismatch_weight = u(0.05, 0.95);
  return c;
}

}  // namespace acu::oracle
