#include "commonlines/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace commonlines {

namespace {

std::string triple_label(const std::array<int, 3>& t) {
  std::ostringstream out;
  out << '(' << t[0] + 1 << ',' << t[1] + 1 << ',' << t[2] + 1 << ')';
  return out.str();
}

/// The isometric embedding of a plane sending unit u -> U and unit v -> V,
/// assuming u.v = U.V.
Frame plane_isometry(const Vec2& u, const Vec2& v, const Vec3& big_u, const Vec3& big_v) {
  Eigen::Matrix2d src;
  src.col(0) = u;
  src.col(1) = v;
  Eigen::Matrix<double, 3, 2> dst;
  dst.col(0) = big_u;
  dst.col(1) = big_v;
  const Eigen::Matrix<double, 3, 2> m = dst * src.inverse();
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Matrix<double, 3, 2> q = svd.matrixU().leftCols<2>() * svd.matrixV().transpose();
  return Frame(q.col(0), q.col(1), 1e-8);
}

double frame_gap(const Frame& x, const Frame& y) {
  return std::sqrt((x.a() - y.a()).squaredNorm() + (x.b() - y.b()).squaredNorm());
}

std::array<int, 3> choose_base(const CommonLinesData& data, const ReconstructOptions& opts) {
  if (opts.base_indices) {
    const auto& b = *opts.base_indices;
    for (int x : b) {
      if (x < 0 || x >= data.n()) throw Error(ErrorCode::IndexOutOfRange, "base index out of range");
    }
    if (b[0] == b[1] || b[0] == b[2] || b[1] == b[2]) {
      throw Error(ErrorCode::IndexOutOfRange, "base indices must be distinct");
    }
    return b;
  }
  if (opts.base == BaseSelection::First) return {0, 1, 2};
  std::array<int, 3> best{0, 1, 2};
  double best_value = -std::numeric_limits<double>::infinity();
  const int n = data.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double g = triangle_gram(data, i, j, k, opts.tolerances).gram_value;
        if (g > best_value) {
          best_value = g;
          best = {i, j, k};
        }
      }
  return best;
}

std::optional<TripleFrames> try_triple(const CommonLinesData& data, int i, int j, int k,
                                       const ReconstructOptions& opts) {
  try {
    if (!triangle_gram(data, i, j, k, opts.tolerances).passes) return std::nullopt;
    return reconstruct_triple(data, i, j, k, opts.tolerances.degenerate_tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateAngle || e.code() == ErrorCode::TriangleInequalityViolated) {
      return std::nullopt;
    }
    throw;
  }
}

/// Least-squares gluing of `incoming` onto the already placed frames along
/// the planes (u, w) it shares with them.
Frame glue_least_squares(const std::vector<std::optional<Frame>>& placed, const TripleFrames& incoming,
                         int u, int w, int target) {
  const Frame& fu = *placed[u];
  const Frame& fw = *placed[w];
  const Frame& gu = incoming.frame_of(u);
  const Frame& gw = incoming.frame_of(w);
  const std::array<Vec3, 4> src{fu.a(), fu.b(), fw.a(), fw.b()};
  const std::array<Vec3, 4> dst{gu.a(), gu.b(), gw.a(), gw.b()};
  const Rotation a = fit_o3(src, dst);
  return a.inverse() * incoming.frame_of(target);
}

ReconstructionResult reconstruct_best_effort(const CommonLinesData& data,
                                             const ReconstructOptions& opts) {
  const int n = data.n();
  std::array<int, 3> base = choose_base(data, opts);
  auto base_frames = try_triple(data, base[0], base[1], base[2], opts);
  if (!base_frames) {
    throw Error(ErrorCode::InitializationFailed,
                "base triple " + triple_label(base) + " fails the triangle inequalities");
  }
  std::vector<std::optional<Frame>> placed(n);
  std::vector<int> order(base.begin(), base.end());
  for (int x : base) placed[x] = base_frames->frame_of(x);

  for (int t = 0; t < n; ++t) {
    if (placed[t]) continue;
    std::optional<TripleFrames> triple = try_triple(data, base[0], base[1], t, opts);
    int u = base[0], w = base[1];
    if (!triple) {
      // fall back to the best-conditioned triple with two placed planes
      double best_value = -std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < order.size(); ++p)
        for (std::size_t q = p + 1; q < order.size(); ++q) {
          const auto cert = triangle_gram(data, order[p], order[q], t, opts.tolerances);
          if (cert.passes && cert.gram_value > best_value) {
            auto candidate = try_triple(data, order[p], order[q], t, opts);
            if (candidate) {
              best_value = cert.gram_value;
              triple = candidate;
              u = order[p];
              w = order[q];
            }
          }
        }
    }
    if (triple) {
      placed[t] = glue_least_squares(placed, *triple, u, w, t);
    } else {
      const Frame& ref = *placed[base[0]];
      const Vec3 axis = (ref.a() + ref.b() + ref.c()).normalized();
      placed[t] = Rotation::from_axis_angle(0.5 * std::numbers::pi * axis) * ref;
    }
    order.push_back(t);
  }

  std::vector<Frame> frames;
  frames.reserve(n);
  for (auto& f : placed) frames.push_back(*f);
  FrameSet set(std::move(frames));
  const double residual = realization_residual(data, set);
  return ReconstructionResult{std::move(set), residual, base};
}

}  // namespace

const Frame& TripleFrames::frame_of(int index) const {
  for (std::size_t k = 0; k < 3; ++k) {
    if (indices[k] == index) return frames[k];
  }
  throw Error(ErrorCode::IndexOutOfRange, "plane not part of triple " + triple_label(indices));
}

TripleFrames TripleFrames::transformed(const Rotation& r) const {
  return TripleFrames{indices, {r * frames[0], r * frames[1], r * frames[2]}};
}

TripleFrames reconstruct_triple(const CommonLinesData& data, int i, int j, int k,
                                double degenerate_tol) {
  const TripleAngles angles = triple_angles(data, i, j, k, degenerate_tol);
  const auto [l_ij, l_ik, l_jk] = spherical_triangle_vertices(angles.alpha, angles.beta, angles.gamma);
  return TripleFrames{
      {i, j, k},
      {plane_isometry(data.line(i, j), data.line(i, k), l_ij, l_ik),
       plane_isometry(data.line(j, i), data.line(j, k), l_ij, l_jk),
       plane_isometry(data.line(k, i), data.line(k, j), l_ik, l_jk)}};
}

Rotation gluing_rotation(const TripleFrames& left, const TripleFrames& right, double tol) {
  std::vector<int> shared;
  for (int x : left.indices) {
    if (std::find(right.indices.begin(), right.indices.end(), x) != right.indices.end()) {
      shared.push_back(x);
    }
  }
  if (shared.size() < 2) {
    throw Error(ErrorCode::IndexOutOfRange,
                "triples " + triple_label(left.indices) + " and " + triple_label(right.indices) +
                    " do not share two planes");
  }
  const int i = shared[0];
  const int j = shared[1];
  const Frame& fi = left.frame_of(i);
  const Frame& fj = left.frame_of(j);
  const Frame& gi = right.frame_of(i);
  const Frame& gj = right.frame_of(j);

  const bool use_a = std::abs(det3(fi.a(), fi.b(), fj.a())) >= std::abs(det3(fi.a(), fi.b(), fj.b()));
  const Vec3& xf = use_a ? fj.a() : fj.b();
  const Vec3& xg = use_a ? gj.a() : gj.b();

  const std::string what =
      "triples " + triple_label(left.indices) + " and " + triple_label(right.indices);
  Rotation a;
  try {
    a = align_o3({fi.a(), fi.b(), xf}, {gi.a(), gi.b(), xg}, tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotIsometric) {
      throw Error(ErrorCode::IncompatibleTriples, what + " cannot be glued: " + e.what());
    }
    throw;
  }
  const double gap = std::max(frame_gap(a * fi, gi), frame_gap(a * fj, gj));
  if (gap > tol) {
    std::ostringstream msg;
    msg << what << " cannot be glued (frame mismatch " << gap << ")";
    throw Error(ErrorCode::IncompatibleTriples, msg.str());
  }
  return a;
}

double realization_residual(const CommonLinesData& data, const FrameSet& frames) {
  double worst = 0.0;
  for (const auto& p : data.pairs()) {
    const double r = (embed(frames[p.i()], p.v_ij()) - embed(frames[p.j()], p.v_ji())).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

ReconstructionResult reconstruct_all(const CommonLinesData& data, const ReconstructOptions& opts) {
  if (opts.best_effort) return reconstruct_best_effort(data, opts);

  if (opts.check_validity) {
    const ValidityReport report = is_valid(data, opts.tolerances);
    if (report.verdict != Verdict::Valid) {
      std::string msg = "data is " + to_string(report.verdict);
      if (!report.offenders.empty()) msg += "; first failing certificate: " + report.offenders.front().label();
      throw Error(ErrorCode::InvalidData, msg);
    }
  }

  const int n = data.n();
  const std::array<int, 3> base = choose_base(data, opts);
  const TripleFrames base_frames = reconstruct_triple(data, base[0], base[1], base[2],
                                                      opts.tolerances.degenerate_tol);
  std::vector<std::optional<Frame>> placed(n);
  for (int x : base) placed[x] = base_frames.frame_of(x);

  for (int t = 0; t < n; ++t) {
    if (placed[t]) continue;
    TripleFrames incoming =
        reconstruct_triple(data, base[0], base[1], t, opts.tolerances.degenerate_tol);
    Rotation a = gluing_rotation(base_frames, incoming, opts.tolerances.eq_tol);
    if (a.det() < 0) {
      // reflect the incoming triple so that the gluing map is proper
      incoming = incoming.transformed(Rotation::reflection());
      a = Rotation::reflection() * a;
    }
    placed[t] = a.inverse() * incoming.frame_of(t);
  }

  std::vector<Frame> frames;
  frames.reserve(n);
  for (auto& f : placed) frames.push_back(*f);
  FrameSet set(std::move(frames));

  const double residual = realization_residual(data, set);
  if (!(residual <= opts.tolerances.eq_tol)) {
    std::ostringstream msg;
    msg << "reconstructed frames violate the input pairs (max residual " << residual << ")";
    throw Error(ErrorCode::InvalidData, msg.str());
  }
  return ReconstructionResult{std::move(set), residual, base};
}

double frameset_distance(const FrameSet& a, const FrameSet& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, frame_gap(a[k], b[k]));
  return worst;
}

double frameset_distance_mod_o3(const FrameSet& a, const FrameSet& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const std::array<Vec3, 4> src{a[0].a(), a[0].b(), a[1].a(), a[1].b()};
  const std::array<Vec3, 4> dst{b[0].a(), b[0].b(), b[1].a(), b[1].b()};
  double best = std::numeric_limits<double>::infinity();
  for (Handedness h : {Handedness::Proper, Handedness::Improper}) {
    const Rotation r = fit_o3(src, dst, h);
    best = std::min(best, frameset_distance(a.transformed(r), b));
  }
  return best;
}

}  // namespace commonlines
