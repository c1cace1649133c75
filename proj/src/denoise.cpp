#include "commonlines/denoise.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace commonlines {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat43 = Eigen::Matrix<double, 4, 3>;

/// Residual of one pair, (I - q q^T) p with p the unit realized 4-vector and q
/// the unit data 4-vector; its squared norm is pair_distance^2.
struct PairTerm {
  Vec4 residual;
  /// d residual / d(rotation increment of frame i); frame j gets the negative.
  Mat43 jac_i;
};

PairTerm pair_term(const Frame& fi, const Frame& fj, const Vec4& q, bool with_jacobian) {
  const Vec4 u = realize_pair_raw(fi, fj);
  const double norm = u.norm();
  const Vec4 p = u / norm;
  const Mat4 proj_q = Mat4::Identity() - q * q.transpose();
  PairTerm term;
  term.residual = proj_q * p;
  if (with_jacobian) {
    // With F -> exp([w]x) F, d(x.y) = (w_x - w_y).(x cross y), so every row
    // depends on w_i - w_j only.
    const Vec3 ci = fi.c(), cj = fj.c();
    Mat43 du;
    du.row(0) = cj.cross(fi.b()).transpose();
    du.row(1) = -cj.cross(fi.a()).transpose();
    du.row(2) = ci.cross(fj.b()).transpose();
    du.row(3) = -ci.cross(fj.a()).transpose();
    term.jac_i = proj_q * (Mat4::Identity() - p * p.transpose()) * du / norm;
  }
  return term;
}

std::vector<Vec4> data_vectors(const CommonLinesData& data) {
  std::vector<Vec4> q;
  q.reserve(data.pairs().size());
  for (const auto& p : data.pairs()) q.push_back(p.unit4().normalized());
  return q;
}

double objective_of(const CommonLinesData& data, const std::vector<Vec4>& q,
                    const std::vector<Frame>& frames) {
  double f = 0.0;
  const auto& pairs = data.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    f += pair_term(frames[pairs[k].i()], frames[pairs[k].j()], q[k], false).residual.squaredNorm();
  }
  return f;
}

std::vector<Frame> retract(const std::vector<Frame>& frames, const Eigen::VectorXd& step, double t) {
  std::vector<Frame> out;
  out.reserve(frames.size());
  out.push_back(frames[0]);
  for (std::size_t f = 1; f < frames.size(); ++f) {
    const Vec3 w = t * step.segment<3>(3 * static_cast<Eigen::Index>(f - 1));
    const Frame moved = Rotation::from_axis_angle(w) * frames[f];
    out.push_back(make_frame(moved.a(), moved.b()));
  }
  return out;
}

}  // namespace

CommonLinesData perturb(const CommonLinesData& data, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0)) throw Error(ErrorCode::InvalidData, "noise sigma must be non-negative");
  if (spec.sigma == 0.0) return data;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  std::vector<CommonLinePair> out;
  out.reserve(data.pairs().size());
  for (const auto& p : data.pairs()) {
    for (;;) {
      Vec2 a = p.v_ij(), b = p.v_ji();
      a.x() += normal(rng);
      a.y() += normal(rng);
      b.x() += normal(rng);
      b.y() += normal(rng);
      if (a.norm() > 0 && b.norm() > 0) {
        out.push_back(CommonLinePair::from_raw(p.i(), p.j(), a.normalized(), b.normalized()));
        break;
      }
    }
  }
  return CommonLinesData(data.n(), std::move(out));
}

double projection_objective(const CommonLinesData& data, const FrameSet& frames) {
  return objective_of(data, data_vectors(data), frames.frames());
}

ProjectionResult project_to_cn(const CommonLinesData& noisy, const ProjectOptions& opts) {
  std::vector<Frame> frames;
  if (opts.initial) {
    if (static_cast<int>(opts.initial->size()) != noisy.n()) {
      throw Error(ErrorCode::InitializationFailed, "initial frame set has the wrong size");
    }
    frames = opts.initial->frames();
  } else {
    ReconstructOptions init;
    init.tolerances = opts.tolerances;
    init.base = BaseSelection::Best;
    init.check_validity = false;
    init.best_effort = true;
    frames = reconstruct_all(noisy, init).frames.frames();
  }

  const int n = noisy.n();
  const auto& pairs = noisy.pairs();
  const std::vector<Vec4> q = data_vectors(noisy);
  const Eigen::Index rows = 4 * static_cast<Eigen::Index>(pairs.size());
  const Eigen::Index cols = 3 * static_cast<Eigen::Index>(n - 1);

  double f = objective_of(noisy, q, frames);
  std::vector<double> history{f};
  bool converged = false;
  int iterations = 0;

  for (; iterations < opts.max_iters; ++iterations) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd r(rows);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int i = pairs[k].i(), j = pairs[k].j();
      const PairTerm term = pair_term(frames[i], frames[j], q[k], true);
      const auto row = static_cast<Eigen::Index>(4 * k);
      r.segment<4>(row) = term.residual;
      if (i > 0) jac.block<4, 3>(row, 3 * (i - 1)) = term.jac_i;
      if (j > 0) jac.block<4, 3>(row, 3 * (j - 1)) = -term.jac_i;
    }
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
      converged = true;
      break;
    }
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);

    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      std::vector<Frame> trial = retract(frames, step, t);
      const double f_trial = objective_of(noisy, q, trial);
      if (std::isfinite(f_trial) && f_trial < f) {
        frames = std::move(trial);
        f = f_trial;
        history.push_back(f);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      converged = true;
      break;
    }
  }

  FrameSet result_frames(std::move(frames));
  CommonLinesData projected = realize_all(result_frames, opts.tolerances.degenerate_tol);
  return ProjectionResult{std::move(projected), std::move(result_frames), f, iterations, converged,
                          std::move(history)};
}

}  // namespace commonlines
