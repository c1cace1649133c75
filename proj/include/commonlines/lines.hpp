#pragma once

// Common lines data in projective coordinates [v_ij : v_ji], its realization
// from frames, and the per-triple angles.

#include <cstddef>
#include <vector>

#include "commonlines/geometry.hpp"

namespace commonlines {

/// How strictly ||v_ij|| = ||v_ji|| is enforced when a pair is built from raw
/// coordinates. Strict rejects violations; Lenient records the mismatch so that
/// validation can report it and the denoiser can repair it.
enum class NormPolicy { Strict, Lenient };

/// One common line pair between planes i < j (0-based).
///
/// The stored representative is canonical: ||v_ij|| = ||v_ji|| = 1 and the
/// first nonzero coordinate of v_ij is positive. The relative sign between
/// v_ij and v_ji encodes the isometry between the two lines and is preserved.
class CommonLinePair {
 public:
  static CommonLinePair from_raw(int i, int j, const Vec2& v_ij, const Vec2& v_ji,
                                 double tol = kDefaultTol, NormPolicy policy = NormPolicy::Strict);

  int i() const { return i_; }
  int j() const { return j_; }
  const Vec2& v_ij() const { return v_ij_; }
  const Vec2& v_ji() const { return v_ji_; }

  /// 2(|v_ij|^2 - |v_ji|^2) / (|v_ij|^2 + |v_ji|^2) of the raw input, i.e.
  /// |v_ij|^2 - |v_ji|^2 on the representative with |(v_ij, v_ji)|^2 = 2.
  /// Zero for data built from frames.
  double norm_residual() const { return norm_residual_; }

  /// (v_ij, v_ji) / sqrt(2): the unit 4-vector of the representative.
  Eigen::Vector4d unit4() const;

 private:
  CommonLinePair() = default;

  int i_ = 0;
  int j_ = 1;
  Vec2 v_ij_ = Vec2::UnitX();
  Vec2 v_ji_ = Vec2::UnitX();
  double norm_residual_ = 0.0;
};

/// Sine of the angle between the unit 4-vectors of two pairs, insensitive to
/// the representative's sign. Lies in [0, 1].
double pair_distance(const CommonLinePair& p, const CommonLinePair& q);

/// Number of unordered pairs / triples / quadruples.
inline std::size_t choose2(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
inline std::size_t choose3(std::size_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }
inline std::size_t choose4(std::size_t n) {
  return n < 4 ? 0 : n * (n - 1) * (n - 2) * (n - 3) / 24;
}

/// One pair for every 0 <= i < j < n, stored in lexicographic order.
class CommonLinesData {
 public:
  /// `pairs` may come in any order but must cover every (i, j) exactly once.
  CommonLinesData(int n, std::vector<CommonLinePair> pairs);

  int n() const { return n_; }
  const std::vector<CommonLinePair>& pairs() const { return pairs_; }

  const CommonLinePair& pair(int i, int j) const;

  /// The common line of plane `i` with plane `j`, for any i != j: v_ij of the
  /// stored pair when i < j, else its v_ji.
  const Vec2& line(int i, int j) const;

  std::size_t pair_index(int i, int j) const;

 private:
  int n_;
  std::vector<CommonLinePair> pairs_;
};

/// Common line pair of two frames from the vector quadruple product:
///   v_ij = (-det[a_j,b_j,b_i], det[a_j,b_j,a_i]),
///   v_ji = ( det[a_i,b_i,b_j], -det[a_i,b_i,a_j]).
/// Throws CoincidentPlanes if the planes agree within `tol`.
CommonLinePair realize_pair(const Frame& fi, const Frame& fj, int i = 0, int j = 1,
                            double tol = kDefaultTol);

/// Raw (unnormalized) (v_ij, v_ji) from the formula above; |Lambda_ij| equals
/// both half norms.
Eigen::Vector4d realize_pair_raw(const Frame& fi, const Frame& fj);

/// Throws NotGeneric if the frames are not generic.
CommonLinesData realize_all(const FrameSet& frames, double tol = kDefaultTol);

struct TripleAngles {
  int i, j, k;
  /// angle(v_ij, v_ik), in plane i
  double alpha;
  /// angle(v_ji, v_jk), in plane j
  double beta;
  /// angle(v_ki, v_kj), in plane k
  double gamma;
};

/// Angles between the common lines of a triple of distinct planes (any order).
/// Throws DegenerateAngle if two common lines in one plane coincide within
/// `tol` (sine of the angle).
TripleAngles triple_angles(const CommonLinesData& data, int i, int j, int k,
                           double tol = kDefaultTol);

}  // namespace commonlines
