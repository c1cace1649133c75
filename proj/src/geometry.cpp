#include "commonlines/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace commonlines {

namespace {

Vec3 gaussian_vec3(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 v;
  v.x() = normal(rng);
  v.y() = normal(rng);
  v.z() = normal(rng);
  return v;
}

}  // namespace

double angle_between(const Vec2& u, const Vec2& v) {
  return std::atan2(std::abs(det2(u, v)), u.dot(v));
}

double angle_between(const Vec3& u, const Vec3& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

Frame::Frame(const Vec3& a, const Vec3& b, double tol) : a_(a), b_(b) {
  if (!a.allFinite() || !b.allFinite() || std::abs(a.norm() - 1.0) > tol ||
      std::abs(b.norm() - 1.0) > tol || std::abs(a.dot(b)) > tol) {
    std::ostringstream msg;
    msg << "frame vectors are not orthonormal (|a| = " << a.norm() << ", |b| = " << b.norm()
        << ", a.b = " << a.dot(b) << ")";
    throw Error(ErrorCode::DegenerateInput, msg.str());
  }
}

Mat3 Frame::basis() const {
  Mat3 m;
  m.col(0) = a_;
  m.col(1) = b_;
  m.col(2) = c();
  return m;
}

Frame make_frame(const Vec3& a, const Vec3& b, double tol) {
  const double na = a.norm();
  if (!(na > tol) || !a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::DegenerateInput, "first frame vector is zero or not finite");
  }
  if (a.cross(b).norm() < tol * na * std::max(b.norm(), 1.0)) {
    throw Error(ErrorCode::DegenerateInput, "frame vectors are collinear");
  }
  const Vec3 ua = a / na;
  Vec3 ub = b - ua.dot(b) * ua;
  // second pass keeps |a.b| at rounding level even for nearly collinear input
  ub -= ua.dot(ub) * ua;
  return Frame(ua, ub.normalized(), tol);
}

Frame random_frame(std::mt19937_64& rng) {
  for (;;) {
    const Vec3 g1 = gaussian_vec3(rng);
    const Vec3 g2 = gaussian_vec3(rng);
    if (g1.norm() > 1e-6 && g1.normalized().cross(g2).norm() > 1e-6) {
      return make_frame(g1, g2);
    }
  }
}

Vec3 embed(const Frame& frame, const Vec2& p) { return p.x() * frame.a() + p.y() * frame.b(); }

Vec2 project(const Frame& frame, const Vec3& v) { return {v.dot(frame.a()), v.dot(frame.b())}; }

Rotation::Rotation(const Mat3& m, double tol) : m_(m) {
  const double err = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!m.allFinite() || err > tol) {
    std::ostringstream msg;
    msg << "matrix is not orthogonal (max |R^T R - I| = " << err << ")";
    throw Error(ErrorCode::NotIsometric, msg.str());
  }
}

Rotation Rotation::reflection() {
  Mat3 m = Mat3::Identity();
  m(2, 2) = -1.0;
  return Rotation(m, Unchecked{});
}

Rotation Rotation::from_axis_angle(const Vec3& omega) {
  return Rotation(Eigen::AngleAxisd(omega.norm(), omega.norm() > 0 ? omega.normalized() : Vec3::UnitX())
                      .toRotationMatrix(),
                  Unchecked{});
}

Rotation Rotation::random(std::mt19937_64& rng, bool allow_improper) {
  Mat3 m = random_frame(rng).basis();
  if (allow_improper && std::uniform_int_distribution<int>(0, 1)(rng) == 1) {
    m = reflection().matrix() * m;
  }
  return Rotation(m, Unchecked{});
}

Rotation Rotation::inverse() const { return Rotation(m_.transpose(), Unchecked{}); }

Frame Rotation::operator*(const Frame& f) const {
  // exact isometries keep (Ra, Rb) orthonormal up to rounding
  return Frame(m_ * f.a(), m_ * f.b(), 1e-8);
}

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(m_ * other.m_, Unchecked{});
}

FrameSet::FrameSet(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 3) {
    throw Error(ErrorCode::IndexOutOfRange, "a frame set needs at least 3 frames");
  }
}

FrameSet FrameSet::transformed(const Rotation& r) const {
  std::vector<Frame> out;
  out.reserve(frames_.size());
  for (const auto& f : frames_) out.push_back(r * f);
  return FrameSet(std::move(out));
}

GenericityReport check_generic(std::span<const Frame> frames, double tol) {
  GenericityReport report;
  const int n = static_cast<int>(frames.size());
  std::vector<Vec3> normals;
  normals.reserve(frames.size());
  for (const auto& f : frames) normals.push_back(f.c().normalized());

  struct Line {
    int i, j;
    Vec3 dir;
  };
  std::vector<Line> lines;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec3 l = normals[i].cross(normals[j]);
      const double s = l.norm();
      if (s < report.min_plane_sine) report.min_plane_sine = s;
      if (s <= tol) {
        if (report.generic) report.witness = {i, j, -1, -1};
        report.generic = false;
        continue;
      }
      lines.push_back({i, j, l / s});
    }
  }
  for (std::size_t p = 0; p < lines.size(); ++p) {
    for (std::size_t q = p + 1; q < lines.size(); ++q) {
      const double s = lines[p].dir.cross(lines[q].dir).norm();
      if (s < report.min_line_sine) report.min_line_sine = s;
      if (s <= tol && report.generic) {
        report.generic = false;
        report.witness = {lines[p].i, lines[p].j, lines[q].i, lines[q].j};
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        report.min_triple_volume =
            std::min(report.min_triple_volume, std::abs(det3(normals[i], normals[j], normals[k])));
      }
  return report;
}

std::optional<FrameSet> sample_generic_frames(int n, std::mt19937_64& rng, double floor,
                                              int max_attempts) {
  if (n < 3) throw Error(ErrorCode::IndexOutOfRange, "a frame set needs at least 3 frames");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) frames.push_back(random_frame(rng));
    const GenericityReport g = check_generic(frames);
    if (g.generic && conditioning(g) >= floor) return FrameSet(std::move(frames));
  }
  return std::nullopt;
}

void require_generic(std::span<const Frame> frames, double tol) {
  const auto report = check_generic(frames, tol);
  if (report.generic) return;
  const auto& w = report.witness;
  std::ostringstream msg;
  if (w[2] < 0) {
    msg << "planes " << w[0] + 1 << " and " << w[1] + 1 << " coincide";
  } else {
    msg << "common lines (" << w[0] + 1 << "," << w[1] + 1 << ") and (" << w[2] + 1 << ","
        << w[3] + 1 << ") coincide";
  }
  throw Error(ErrorCode::NotGeneric, msg.str());
}

std::array<Vec3, 3> spherical_triangle_vertices(double alpha, double beta, double gamma) {
  constexpr double pi = std::numbers::pi;
  const bool in_range = alpha > 0 && alpha < pi && beta > 0 && beta < pi && gamma > 0 && gamma < pi;
  if (!in_range || !(beta + gamma > alpha) || !(alpha + gamma > beta) || !(alpha + beta > gamma) ||
      !(alpha + beta + gamma < 2 * pi)) {
    std::ostringstream msg;
    msg << "no non-degenerate spherical triangle with edges (" << alpha << ", " << beta << ", "
        << gamma << ")";
    throw Error(ErrorCode::TriangleInequalityViolated, msg.str());
  }
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cos_c = std::clamp((std::cos(gamma) - ca * cb) / (sa * sb), -1.0, 1.0);
  const double sin_c = std::sqrt((1.0 - cos_c) * (1.0 + cos_c));

  const Vec3 l_ij = Vec3::UnitX();
  const Vec3 l_ik(ca, sa, 0.0);
  const Vec3 l_jk(cb, sb * cos_c, sb * sin_c);
  return {l_ij, l_ik, l_jk};
}

Mat3 nearest_orthogonal(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Rotation align_o3(const std::array<Vec3, 3>& src, const std::array<Vec3, 3>& dst, double tol) {
  Mat3 s, d;
  for (int k = 0; k < 3; ++k) {
    s.col(k) = src[k];
    d.col(k) = dst[k];
  }
  const double scale = src[0].norm() * src[1].norm() * src[2].norm();
  if (!(scale > 0) || std::abs(s.determinant()) < tol * scale) {
    throw Error(ErrorCode::DegenerateInput, "source vectors are linearly dependent");
  }
  for (int p = 0; p < 3; ++p) {
    for (int q = p; q < 3; ++q) {
      const double norm_scale = std::max({src[p].norm() * src[q].norm(), dst[p].norm() * dst[q].norm(), 1e-300});
      const double diff = std::abs(src[p].dot(src[q]) - dst[p].dot(dst[q]));
      if (diff > tol * norm_scale) {
        std::ostringstream msg;
        msg << "inner products differ at (" << p << "," << q << ") by " << diff;
        throw Error(ErrorCode::NotIsometric, msg.str());
      }
    }
  }
  const Mat3 a = d * s.inverse();
  return Rotation(nearest_orthogonal(a), 1e-8);
}

Rotation fit_o3(std::span<const Vec3> src, std::span<const Vec3> dst, Handedness handedness) {
  Mat3 cov = Mat3::Zero();
  const std::size_t n = std::min(src.size(), dst.size());
  for (std::size_t k = 0; k < n; ++k) cov += dst[k] * src[k].transpose();
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 correction = Mat3::Identity();
  const double sign = (u * v.transpose()).determinant() < 0 ? -1.0 : 1.0;
  if (handedness == Handedness::Proper) correction(2, 2) = sign;
  if (handedness == Handedness::Improper) correction(2, 2) = -sign;
  return Rotation(u * correction * v.transpose(), 1e-8);
}

}  // namespace commonlines
