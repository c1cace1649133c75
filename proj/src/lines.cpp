#include "commonlines/lines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace commonlines {

namespace {

/// Rescales to unit length, leaving vectors that are already unit to within
/// rounding untouched so that normalization is idempotent bit for bit.
Vec2 unit_half(const Vec2& v, double squared_norm) {
  if (std::abs(squared_norm - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return v;
  return v / std::sqrt(squared_norm);
}

}  // namespace

CommonLinePair CommonLinePair::from_raw(int i, int j, const Vec2& v_ij, const Vec2& v_ji,
                                        double tol, NormPolicy policy) {
  if (i < 0 || j <= i) {
    std::ostringstream msg;
    msg << "pair indices must satisfy 0 <= i < j, got (" << i << "," << j << ")";
    throw Error(ErrorCode::IndexOutOfRange, msg.str());
  }
  if (!v_ij.allFinite() || !v_ji.allFinite()) {
    throw Error(ErrorCode::ZeroVector, "common line coordinates are not finite");
  }
  const double n_ij = v_ij.squaredNorm();
  const double n_ji = v_ji.squaredNorm();
  const double total = n_ij + n_ji;
  if (!(total > 0)) throw Error(ErrorCode::ZeroVector, "common line pair is zero");

  CommonLinePair pair;
  pair.i_ = i;
  pair.j_ = j;
  pair.norm_residual_ = 2.0 * (n_ij - n_ji) / total;
  if (policy == NormPolicy::Strict && std::abs(n_ij - n_ji) > tol * total) {
    std::ostringstream msg;
    msg << "pair (" << i + 1 << "," << j + 1 << ") violates |v_ij| = |v_ji| (" << std::sqrt(n_ij)
        << " vs " << std::sqrt(n_ji) << ")";
    throw Error(ErrorCode::NormMismatch, msg.str());
  }
  if (n_ij == 0.0 || n_ji == 0.0) {
    throw Error(ErrorCode::ZeroVector, "one half of the common line pair is zero");
  }

  Vec2 a = unit_half(v_ij, n_ij);
  Vec2 b = unit_half(v_ji, n_ji);
  if (a.x() < 0.0 || (a.x() == 0.0 && a.y() < 0.0)) {
    a = -a;
    b = -b;
  }
  pair.v_ij_ = a;
  pair.v_ji_ = b;
  return pair;
}

Eigen::Vector4d CommonLinePair::unit4() const {
  Eigen::Vector4d u;
  u << v_ij_, v_ji_;
  return u / std::sqrt(2.0);
}

double pair_distance(const CommonLinePair& p, const CommonLinePair& q) {
  const Eigen::Vector4d a = p.unit4().normalized();
  const Eigen::Vector4d b = q.unit4().normalized();
  double wedge = 0.0;
  for (int k = 0; k < 4; ++k) {
    for (int l = k + 1; l < 4; ++l) {
      const double m = a[k] * b[l] - a[l] * b[k];
      wedge += m * m;
    }
  }
  return std::min(1.0, std::sqrt(wedge));
}

CommonLinesData::CommonLinesData(int n, std::vector<CommonLinePair> pairs) : n_(n) {
  if (n < 3) throw Error(ErrorCode::IndexOutOfRange, "common lines data needs n >= 3");
  if (pairs.size() != choose2(static_cast<std::size_t>(n))) {
    std::ostringstream msg;
    msg << "expected " << choose2(n) << " pairs for n = " << n << ", got " << pairs.size();
    throw Error(ErrorCode::IndexOutOfRange, msg.str());
  }
  std::vector<bool> seen(pairs.size(), false);
  for (const auto& p : pairs) {
    if (p.j() >= n) {
      std::ostringstream msg;
      msg << "pair (" << p.i() + 1 << "," << p.j() + 1 << ") out of range for n = " << n;
      throw Error(ErrorCode::IndexOutOfRange, msg.str());
    }
    const std::size_t idx = pair_index(p.i(), p.j());
    if (seen[idx]) {
      std::ostringstream msg;
      msg << "duplicate pair (" << p.i() + 1 << "," << p.j() + 1 << ")";
      throw Error(ErrorCode::IndexOutOfRange, msg.str());
    }
    seen[idx] = true;
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    return x.i() != y.i() ? x.i() < y.i() : x.j() < y.j();
  });
  pairs_ = std::move(pairs);
}

std::size_t CommonLinesData::pair_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || i == j || j >= n_) {
    std::ostringstream msg;
    msg << "no pair (" << i + 1 << "," << j + 1 << ") for n = " << n_;
    throw Error(ErrorCode::IndexOutOfRange, msg.str());
  }
  const auto ui = static_cast<std::size_t>(i);
  const auto un = static_cast<std::size_t>(n_);
  return ui * un - ui * (ui + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

const CommonLinePair& CommonLinesData::pair(int i, int j) const { return pairs_[pair_index(i, j)]; }

const Vec2& CommonLinesData::line(int i, int j) const {
  const auto& p = pairs_[pair_index(i, j)];
  return i < j ? p.v_ij() : p.v_ji();
}

Eigen::Vector4d realize_pair_raw(const Frame& fi, const Frame& fj) {
  const Vec3 ci = fi.c();
  const Vec3 cj = fj.c();
  Eigen::Vector4d u;
  u << -cj.dot(fi.b()), cj.dot(fi.a()), ci.dot(fj.b()), -ci.dot(fj.a());
  return u;
}

CommonLinePair realize_pair(const Frame& fi, const Frame& fj, int i, int j, double tol) {
  if (fi.c().cross(fj.c()).norm() <= tol) {
    std::ostringstream msg;
    msg << "planes " << i + 1 << " and " << j + 1 << " coincide";
    throw Error(ErrorCode::CoincidentPlanes, msg.str());
  }
  const Eigen::Vector4d u = realize_pair_raw(fi, fj);
  return CommonLinePair::from_raw(i, j, u.head<2>(), u.tail<2>(), 1e-8);
}

CommonLinesData realize_all(const FrameSet& frames, double tol) {
  require_generic(frames.span(), tol);
  const int n = static_cast<int>(frames.size());
  std::vector<CommonLinePair> pairs;
  pairs.reserve(choose2(frames.size()));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.push_back(realize_pair(frames[i], frames[j], i, j, tol));
  }
  return CommonLinesData(n, std::move(pairs));
}

TripleAngles triple_angles(const CommonLinesData& data, int i, int j, int k, double tol) {
  if (i == j || i == k || j == k) {
    throw Error(ErrorCode::IndexOutOfRange, "triple indices must be distinct");
  }
  auto angle = [&](int plane, int p, int q) {
    const Vec2& u = data.line(plane, p);
    const Vec2& v = data.line(plane, q);
    if (std::abs(det2(u, v)) <= tol) {
      std::ostringstream msg;
      msg << "common lines " << plane + 1 << "->" << p + 1 << " and " << plane + 1 << "->" << q + 1
          << " coincide in plane " << plane + 1;
      throw Error(ErrorCode::DegenerateAngle, msg.str());
    }
    return angle_between(u, v);
  };
  return TripleAngles{i, j, k, angle(i, j, k), angle(j, i, k), angle(k, i, j)};
}

}  // namespace commonlines
