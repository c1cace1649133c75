#pragma once

// Shared fixtures and independent oracles for the tests.

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "commonlines/lines.hpp"

namespace testing_support {

using namespace commonlines;

inline constexpr double kPi = std::numbers::pi;
inline const double kHalfSqrt2 = std::sqrt(2.0) / 2.0;

/// Code of the commonlines::Error thrown by fn; records a failure if none is.
inline ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no commonlines::Error thrown";
  return ErrorCode::ParseError;
}

/// Random generic frame set, conditioned as in the CLI generator.
inline FrameSet generic_frames(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto frames = sample_generic_frames(n, rng);
  if (!frames) throw std::runtime_error("no well-conditioned sample");
  return *frames;
}

/// Four planes with lines (1,0), (s,s), (0,1) toward the other three planes
/// in every plane, s = sqrt(2)/2. Built here, independent of the fixture file.
inline CommonLinesData counterexample() {
  const Vec2 e1(1.0, 0.0), d(kHalfSqrt2, kHalfSqrt2), e2(0.0, 1.0);
  // lines[p] lists, for plane p, the line toward each other plane in order.
  auto line = [&](int p, int q) -> Vec2 {
    const int slot = q < p ? q : q - 1;
    return slot == 0 ? e1 : slot == 1 ? d : e2;
  };
  std::vector<CommonLinePair> pairs;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) pairs.push_back(CommonLinePair::from_raw(i, j, line(i, j), line(j, i)));
  return CommonLinesData(4, std::move(pairs));
}

/// Three-plane data whose triple (0,1,2) has the given angles, using the
/// representative lines(0,1) = lines(1,0) = lines(2,0) = e1.
inline CommonLinesData data_with_angles(double alpha, double beta, double gamma) {
  const Vec2 e1(1.0, 0.0);
  std::vector<CommonLinePair> pairs{
      CommonLinePair::from_raw(0, 1, e1, e1),
      CommonLinePair::from_raw(0, 2, Vec2(std::cos(alpha), std::sin(alpha)), e1),
      CommonLinePair::from_raw(1, 2, Vec2(std::cos(beta), std::sin(beta)),
                               Vec2(std::cos(gamma), std::sin(gamma)))};
  return CommonLinesData(3, std::move(pairs));
}

/// Direction of the intersection of two planes: null vector of [c_i c_j]^T.
inline Vec3 intersection_direction(const Frame& fi, const Frame& fj) {
  Eigen::Matrix<double, 2, 3> m;
  m.row(0) = fi.c().transpose();
  m.row(1) = fj.c().transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(2);
}

/// Cosine of the angle between two planes.
inline double dihedral_cosine(const Frame& fi, const Frame& fj) {
  return std::abs(fi.c().dot(fj.c()));
}

/// The four strict angle inequalities of a spherical triangle, and the
/// smallest slack among them.
inline bool angle_inequalities(double a, double b, double g) {
  return b + g > a && a + g > b && a + b > g && a + b + g < 2.0 * kPi;
}
inline double angle_slack(double a, double b, double g) {
  return std::min({b + g - a, a + g - b, a + b - g, 2.0 * kPi - (a + b + g)});
}

inline Vec2 random_unit2(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec2 v(normal(rng), normal(rng));
  return v.normalized();
}

/// Random (generally invalid) data with unit halves.
inline CommonLinesData random_lines(int n, std::mt19937_64& rng) {
  std::vector<CommonLinePair> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pairs.push_back(CommonLinePair::from_raw(i, j, random_unit2(rng), random_unit2(rng)));
  return CommonLinesData(n, std::move(pairs));
}

}  // namespace testing_support
