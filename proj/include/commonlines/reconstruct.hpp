#pragma once

// Recovers realizing frames from valid common lines data, unique up to a
// global element of O(3): one spherical triangle per triple, glued together
// along shared edges.

#include <array>
#include <optional>

#include "commonlines/validity.hpp"

namespace commonlines {

/// Realizing frames for one triple of planes.
struct TripleFrames {
  std::array<int, 3> indices;
  std::array<Frame, 3> frames;

  /// Frame of plane `index`; throws IndexOutOfRange if it is not in the triple.
  const Frame& frame_of(int index) const;
  TripleFrames transformed(const Rotation& r) const;
};

/// Places the triple's spherical triangle canonically and maps each plane onto
/// it: v_ij, v_ik -> L_ij, L_ik in plane i; v_ji, v_jk -> L_ij, L_jk in plane j;
/// v_ki, v_kj -> L_ik, L_jk in plane k.
/// Throws DegenerateAngle or TriangleInequalityViolated.
TripleFrames reconstruct_triple(const CommonLinesData& data, int i, int j, int k,
                                double degenerate_tol = kDefaultTol);

/// The orthogonal A with A F_i = G_i and A F_j = G_j, where (i, j) are the two
/// planes the triples share. Throws IncompatibleTriples when no orthogonal map
/// fits within `tol`, i.e. when the law-of-cosines compatibility fails.
Rotation gluing_rotation(const TripleFrames& left, const TripleFrames& right,
                         double tol = 1e-8);

enum class BaseSelection {
  /// Planes (1, 2, 3).
  First,
  /// The triple with the largest Gram value.
  Best,
};

struct ReconstructOptions {
  Tolerances tolerances;
  BaseSelection base = BaseSelection::First;
  /// Overrides `base` when set (0-based, distinct).
  std::optional<std::array<int, 3>> base_indices;
  /// Run is_valid first and refuse Invalid or Degenerate data.
  bool check_validity = true;
  /// Tolerate inconsistent data: least-squares gluing, fallback triples for
  /// planes whose triple with the base edge fails, no final rejection.
  bool best_effort = false;
};

struct ReconstructionResult {
  FrameSet frames;
  /// max over pairs of |embed(F_i, v_ij) - embed(F_j, v_ji)|.
  double max_residual;
  /// Base triple that fixes the gauge (0-based).
  std::array<int, 3> base;
};

/// Throws InvalidData (naming the first failing certificate or pair) or
/// IncompatibleTriples (naming the triples) unless best_effort is set.
ReconstructionResult reconstruct_all(const CommonLinesData& data,
                                     const ReconstructOptions& opts = {});

/// max_k |embed(F_i, v_ij) - embed(F_j, v_ji)| over all pairs.
double realization_residual(const CommonLinesData& data, const FrameSet& frames);

/// min over R in O(3) fitted on the first two frames (both determinant signs)
/// of max_i sqrt(|R a_i - a'_i|^2 + |R b_i - b'_i|^2).
double frameset_distance_mod_o3(const FrameSet& a, const FrameSet& b);

/// max_i sqrt(|a_i - a'_i|^2 + |b_i - b'_i|^2), no gauge freedom.
double frameset_distance(const FrameSet& a, const FrameSet& b);

}  // namespace commonlines
