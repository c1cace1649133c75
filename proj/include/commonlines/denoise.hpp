#pragma once

// Noise injection on common lines data and least-squares projection of noisy
// data back onto the valid set, by optimizing over frames so that the output
// is realizable by construction.

#include <cstdint>
#include <optional>
#include <vector>

#include "commonlines/reconstruct.hpp"

namespace commonlines {

struct NoiseSpec {
  /// Standard deviation of the Gaussian added to each representative
  /// coordinate before the halves are renormalized.
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds seeded Gaussian noise to the four stored coordinates of every pair
/// (in lexicographic pair order), then rescales each half to unit norm.
/// sigma = 0 returns the data unchanged.
CommonLinesData perturb(const CommonLinesData& data, const NoiseSpec& spec);

struct ProjectOptions {
  int max_iters = 200;
  /// Stop when the infinity norm of J^T r falls below this.
  double grad_tol = 1e-12;
  /// Step halvings tried before a Gauss-Newton step is declared stalled.
  int max_halvings = 40;
  Tolerances tolerances;
  /// Start here instead of from the best-effort reconstruction.
  std::optional<FrameSet> initial;
};

struct ProjectionResult {
  CommonLinesData projected;
  FrameSet frames;
  /// sum over pairs of pair_distance(noisy, realized)^2
  double objective;
  int iterations;
  /// True when the gradient test passed or no step could reduce the
  /// objective further (a stationary point to working precision). False only
  /// when max_iters ran out.
  bool converged;
  /// Objective at the start and after every accepted step.
  std::vector<double> objective_history;
};

/// sum over pairs of pair_distance(data_ij, realize_pair(F_i, F_j))^2.
double projection_objective(const CommonLinesData& data, const FrameSet& frames);

/// Minimizes projection_objective over frame sets by Gauss-Newton on
/// per-frame rotation increments (frame 1 held fixed to remove the gauge),
/// with step halving and re-orthonormalization after each step. Throws
/// InitializationFailed if no triple can seed the initial reconstruction.
ProjectionResult project_to_cn(const CommonLinesData& noisy, const ProjectOptions& opts = {});

}  // namespace commonlines
