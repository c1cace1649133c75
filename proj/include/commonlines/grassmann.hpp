#pragma once

// Pluecker coordinates of the row space of F = [a_1 b_1 ... a_N b_N] in
// Gr(3, 2N), the projection that keeps only the minors of pairs of frames,
// and the splitting of a frame set into (Pluecker point, gauge).

#include <array>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "commonlines/lines.hpp"

namespace commonlines {

/// All (2N choose 3) 3x3 minors of F, scaled to unit Euclidean norm with the
/// first coordinate of magnitude above `kSignThreshold` made positive. Column
/// triples (c0 < c1 < c2) are ordered lexicographically; column 2i is a_i and
/// column 2i+1 is b_i.
class PlueckerPoint {
 public:
  static constexpr double kSignThreshold = 1e-9;

  PlueckerPoint(int n, std::vector<double> coords);

  int n() const { return n_; }
  const std::vector<double>& coords() const { return coords_; }

  /// det of columns (c0, c1, c2) in any order, with the permutation sign.
  double minor(int c0, int c1, int c2) const;

  /// Position of the sorted column triple in the lexicographic order.
  static std::size_t triple_rank(int columns, int c0, int c1, int c2);

 private:
  int n_;
  std::vector<double> coords_;
};

/// Throws RankDeficient if F has numerical rank < 3 (all planes equal).
PlueckerPoint pluecker_embed(std::span<const Frame> frames, double tol = kDefaultTol);

/// Keeps the four minors of each pair of frames:
///   [-det[a_j,b_j,b_i] : det[a_j,b_j,a_i] : det[a_i,b_i,b_j] : -det[a_i,b_i,a_j]]
/// -> [v_ij : v_ji]. Throws UndefinedProjection if all four vanish for a pair.
CommonLinesData pluecker_project(const PlueckerPoint& point, double tol = 1e-12);

/// Residual of the three-term Pluecker relations on `samples` random index
/// choices (max absolute value); zero on the Grassmannian.
double pluecker_relation_residual(const PlueckerPoint& point, std::size_t samples,
                                  std::mt19937_64& rng);

struct GaugeSplit {
  PlueckerPoint point;
  /// [a_1, b_1, xi a_1 x b_1] with xi = sign det[L_12, L_13, L_23], where
  /// L_ij = embed(F_i, v_ij) for the canonical representative v_ij of the
  /// projected data. L_ij is then equivariant under all of O(3), so a
  /// reflection of the frames flips xi.
  Rotation gauge;
  int xi;
};

/// Throws NotGeneric if det[L_12, L_13, L_23] vanishes within `tol`.
GaugeSplit gauge_split(const FrameSet& frames, double tol = kDefaultTol);

/// Inverse of gauge_split: projects the point to common lines data,
/// reconstructs frames up to O(3) and fixes the remaining rotation from the
/// gauge and the sign xi.
FrameSet gauge_join(const GaugeSplit& split);

/// Numerical rank of the Jacobian of
///   (per-frame rotation parameters, 3N of them) -> unit common line 4-vectors
/// by central differences with the given step; singular values below
/// `rank_tol` times the largest are treated as zero. Generic frames give
/// 3N - 3, the missing three being the global rotation.
int jacobian_rank_at(const FrameSet& frames, double step = 1e-5, double rank_tol = 1e-6);

}  // namespace commonlines
