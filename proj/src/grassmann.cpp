#include "commonlines/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "commonlines/reconstruct.hpp"

namespace commonlines {

namespace {

const Vec3& column(std::span<const Frame> frames, int c) {
  const Frame& f = frames[static_cast<std::size_t>(c / 2)];
  return c % 2 == 0 ? f.a() : f.b();
}

Eigen::VectorXd unit_lines(std::span<const Frame> frames) {
  const int n = static_cast<int>(frames.size());
  Eigen::VectorXd out(4 * static_cast<Eigen::Index>(choose2(frames.size())));
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      out.segment<4>(row) = realize_pair_raw(frames[i], frames[j]).normalized();
      row += 4;
    }
  return out;
}

/// Sign of det[L_12, L_13, L_23] with L_ij = embed(F_i, v_ij) for the stored
/// representatives of `data`. Since the representatives do not depend on the
/// frames' gauge, L transforms as R L under every R in O(3) and the sign picks
/// up det R.
int lambda_orientation(const FrameSet& frames, const CommonLinesData& data, double tol) {
  const Vec3 l12 = embed(frames[0], data.line(0, 1));
  const Vec3 l13 = embed(frames[0], data.line(0, 2));
  const Vec3 l23 = embed(frames[1], data.line(1, 2));
  const double d = det3(l12, l13, l23);
  if (!std::isfinite(d) || std::abs(d) <= tol) {
    throw Error(ErrorCode::NotGeneric, "common lines (1,2), (1,3), (2,3) are linearly dependent");
  }
  return d > 0 ? 1 : -1;
}

}  // namespace

PlueckerPoint::PlueckerPoint(int n, std::vector<double> coords) : n_(n), coords_(std::move(coords)) {
  const auto columns = static_cast<std::size_t>(2 * n);
  const std::size_t expected = columns * (columns - 1) * (columns - 2) / 6;
  if (n < 2 || coords_.size() != expected) {
    throw Error(ErrorCode::IndexOutOfRange, "Pluecker vector has the wrong length");
  }
  double norm = 0.0;
  for (double x : coords_) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::RankDeficient, "Pluecker vector is zero");
  }
  double sign = 1.0;
  for (double x : coords_) {
    if (std::abs(x) > kSignThreshold * norm) {
      sign = x > 0 ? 1.0 : -1.0;
      break;
    }
  }
  for (double& x : coords_) x *= sign / norm;
}

std::size_t PlueckerPoint::triple_rank(int columns, int c0, int c1, int c2) {
  auto c2_of = [](int m) { return m < 2 ? 0 : static_cast<std::size_t>(m) * (m - 1) / 2; };
  std::size_t rank = 0;
  for (int x = 0; x < c0; ++x) rank += c2_of(columns - 1 - x);
  for (int y = c0 + 1; y < c1; ++y) rank += static_cast<std::size_t>(columns - 1 - y);
  rank += static_cast<std::size_t>(c2 - c1 - 1);
  return rank;
}

double PlueckerPoint::minor(int c0, int c1, int c2) const {
  if (c0 == c1 || c0 == c2 || c1 == c2) return 0.0;
  double sign = 1.0;
  if (c0 > c1) { std::swap(c0, c1); sign = -sign; }
  if (c1 > c2) { std::swap(c1, c2); sign = -sign; }
  if (c0 > c1) { std::swap(c0, c1); sign = -sign; }
  return sign * coords_[triple_rank(2 * n_, c0, c1, c2)];
}

PlueckerPoint pluecker_embed(std::span<const Frame> frames, double tol) {
  const int n = static_cast<int>(frames.size());
  const int columns = 2 * n;
  Eigen::Matrix3Xd f(3, columns);
  for (int c = 0; c < columns; ++c) f.col(c) = column(frames, c);
  Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(f);
  const auto& s = svd.singularValues();
  if (s.size() < 3 || !(s[2] > tol * s[0])) {
    throw Error(ErrorCode::RankDeficient, "frame matrix has rank < 3 (all planes coincide)");
  }
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(columns) * (columns - 1) * (columns - 2) / 6);
  for (int c0 = 0; c0 < columns; ++c0)
    for (int c1 = c0 + 1; c1 < columns; ++c1)
      for (int c2 = c1 + 1; c2 < columns; ++c2)
        coords.push_back(det3(column(frames, c0), column(frames, c1), column(frames, c2)));
  return PlueckerPoint(n, std::move(coords));
}

CommonLinesData pluecker_project(const PlueckerPoint& point, double tol) {
  const int n = point.n();
  std::vector<CommonLinePair> pairs;
  pairs.reserve(choose2(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int ai = 2 * i, bi = 2 * i + 1, aj = 2 * j, bj = 2 * j + 1;
      const Vec2 v_ij(-point.minor(aj, bj, bi), point.minor(aj, bj, ai));
      const Vec2 v_ji(point.minor(ai, bi, bj), -point.minor(ai, bi, aj));
      if (std::max(v_ij.cwiseAbs().maxCoeff(), v_ji.cwiseAbs().maxCoeff()) <= tol) {
        std::ostringstream msg;
        msg << "the four minors of pair (" << i + 1 << "," << j + 1 << ") vanish";
        throw Error(ErrorCode::UndefinedProjection, msg.str());
      }
      pairs.push_back(CommonLinePair::from_raw(i, j, v_ij, v_ji, 1e-8));
    }
  return CommonLinesData(n, std::move(pairs));
}

double pluecker_relation_residual(const PlueckerPoint& point, std::size_t samples,
                                  std::mt19937_64& rng) {
  const int columns = 2 * point.n();
  if (columns < 5) return 0.0;
  std::vector<int> idx(static_cast<std::size_t>(columns));
  for (int c = 0; c < columns; ++c) idx[static_cast<std::size_t>(c)] = c;
  double worst = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const int s = idx[0], a = idx[1], b = idx[2], c = idx[3], d = idx[4];
    const double r = point.minor(s, a, b) * point.minor(s, c, d) -
                     point.minor(s, a, c) * point.minor(s, b, d) +
                     point.minor(s, a, d) * point.minor(s, b, c);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

GaugeSplit gauge_split(const FrameSet& frames, double tol) {
  PlueckerPoint point = pluecker_embed(frames.span());
  const int xi = lambda_orientation(frames, pluecker_project(point), tol);
  const Frame& f1 = frames[0];
  Mat3 g;
  g.col(0) = f1.a();
  g.col(1) = f1.b();
  g.col(2) = xi * f1.c();
  return GaugeSplit{std::move(point), Rotation(g, 1e-8), xi};
}

FrameSet gauge_join(const GaugeSplit& split) {
  const CommonLinesData data = pluecker_project(split.point);
  const FrameSet up_to_o3 = reconstruct_all(data).frames;

  const int det_r = split.xi * lambda_orientation(up_to_o3, data, kDefaultTol);
  const Vec3 ga = split.gauge.matrix().col(0);
  const Vec3 gb = split.gauge.matrix().col(1);
  Mat3 target;
  target.col(0) = ga;
  target.col(1) = gb;
  target.col(2) = det_r * ga.cross(gb);
  const Rotation r(target * up_to_o3[0].basis().transpose(), 1e-8);
  return up_to_o3.transformed(r);
}

int jacobian_rank_at(const FrameSet& frames, double step, double rank_tol) {
  const int n = static_cast<int>(frames.size());
  const Eigen::Index rows = 4 * static_cast<Eigen::Index>(choose2(frames.size()));
  Eigen::MatrixXd jac(rows, 3 * n);
  std::vector<Frame> work(frames.begin(), frames.end());
  for (int f = 0; f < n; ++f) {
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 delta = step * Vec3::Unit(axis);
      work[f] = Rotation::from_axis_angle(delta) * frames[f];
      const Eigen::VectorXd plus = unit_lines(work);
      work[f] = Rotation::from_axis_angle(-delta) * frames[f];
      const Eigen::VectorXd minus = unit_lines(work);
      work[f] = frames[f];
      jac.col(3 * f + axis) = (plus - minus) / (2.0 * step);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0)) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > rank_tol * s[0]) ++rank;
  }
  return rank;
}

}  // namespace commonlines
