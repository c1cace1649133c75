#pragma once

// 3D primitives shared by every other module: frames, orthogonal maps,
// the plane embeddings of a frame, spherical triangles and O(3) alignment.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "commonlines/error.hpp"

namespace commonlines {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kDefaultTol = 1e-9;

inline Vec3 cross(const Vec3& u, const Vec3& v) { return u.cross(v); }

/// det[u v w] with the arguments as columns.
inline double det3(const Vec3& u, const Vec3& v, const Vec3& w) { return u.dot(v.cross(w)); }

/// det[u v] with the arguments as columns.
inline double det2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

/// Angle in [0, pi] between two nonzero vectors, computed with atan2 so that
/// it stays accurate near 0 and pi.
double angle_between(const Vec2& u, const Vec2& v);
double angle_between(const Vec3& u, const Vec3& v);

class Rotation;

/// An orthonormal pair (a, b); the viewing direction c = a x b completes it to
/// a right-handed basis. The embedded image plane is span{a, b}.
class Frame {
 public:
  /// Accepts (a, b) verbatim after checking orthonormality within `tol`.
  Frame(const Vec3& a, const Vec3& b, double tol = kDefaultTol);

  const Vec3& a() const { return a_; }
  const Vec3& b() const { return b_; }
  Vec3 c() const { return a_.cross(b_); }

  /// [a b c] as columns.
  Mat3 basis() const;

 private:
  Vec3 a_;
  Vec3 b_;
};

/// Gram-Schmidt on (a, b). Throws DegenerateInput if the inputs are (nearly)
/// collinear or zero.
Frame make_frame(const Vec3& a, const Vec3& b, double tol = kDefaultTol);

/// Haar-distributed frame: a normalized Gaussian vector followed by a
/// Gram-Schmidt step on a second Gaussian vector.
Frame random_frame(std::mt19937_64& rng);

/// iota(x, y) = x a + y b
Vec3 embed(const Frame& frame, const Vec2& p);

/// Orthogonal projection onto the frame's plane, in frame coordinates.
Vec2 project(const Frame& frame, const Vec3& v);

/// Element of O(3). Improper (det = -1) elements are allowed.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m, double tol = kDefaultTol);

  static Rotation identity() { return Rotation(); }
  /// diag(1, 1, -1)
  static Rotation reflection();
  /// exp of the skew matrix of `omega` (Rodrigues).
  static Rotation from_axis_angle(const Vec3& omega);
  /// Haar on O(3) when `allow_improper`, else on SO(3).
  static Rotation random(std::mt19937_64& rng, bool allow_improper = true);

  const Mat3& matrix() const { return m_; }
  double det() const { return m_.determinant(); }
  Rotation inverse() const;

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Frame operator*(const Frame& f) const;
  Rotation operator*(const Rotation& other) const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

/// Ordered list of N >= 3 frames. Genericity is checked separately because
/// most callers want to decide what to do about it.
class FrameSet {
 public:
  explicit FrameSet(std::vector<Frame> frames);

  std::size_t size() const { return frames_.size(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const { return frames_; }
  std::span<const Frame> span() const { return frames_; }

  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

  /// Left action of O(3): (R F_1, ..., R F_N).
  FrameSet transformed(const Rotation& r) const;

 private:
  std::vector<Frame> frames_;
};

/// Genericity witness: pairwise distinct planes and pairwise distinct
/// intersection lines, both measured as sines of angles.
struct GenericityReport {
  bool generic = true;
  double min_plane_sine = 1.0;
  double min_line_sine = 1.0;
  /// min |det[c_i, c_j, c_k]| over triples of unit normals. Zero exactly when
  /// three planes share a line.
  double min_triple_volume = 1.0;
  /// Offending indices (0-based) when not generic: a pair of planes, or two
  /// pairs of planes whose intersection lines coincide.
  std::array<int, 4> witness{-1, -1, -1, -1};
};

GenericityReport check_generic(std::span<const Frame> frames, double tol = kDefaultTol);

/// Smallest of the three conditioning measures above.
inline double conditioning(const GenericityReport& r) {
  return std::min({r.min_plane_sine, r.min_line_sine, r.min_triple_volume});
}

/// Default conditioning floor for sampled frame sets. Realized data then has
/// every triangle Gram value >= floor^4, well above the default strictness
/// margin.
inline constexpr double kDefaultConditioning = 5e-3;

/// Draws n random frames until a sample with conditioning >= floor appears.
/// Returns nullopt after max_attempts failures.
std::optional<FrameSet> sample_generic_frames(int n, std::mt19937_64& rng,
                                              double floor = kDefaultConditioning,
                                              int max_attempts = 100);

/// Throws NotGeneric naming the offending indices (1-based in the message).
void require_generic(std::span<const Frame> frames, double tol = kDefaultTol);

/// Unit vertices (L_ij, L_ik, L_jk) of a non-degenerate spherical triangle with
/// angle(L_ij, L_ik) = alpha, angle(L_ij, L_jk) = beta and
/// angle(L_ik, L_jk) = gamma, in the canonical placement
///   L_ij = e1, L_ik in the e1-e2 plane, L_jk in the upper half-space.
/// Throws TriangleInequalityViolated unless all angles lie in (0, pi) and
/// beta + gamma > alpha, alpha + gamma > beta, alpha + beta > gamma and
/// alpha + beta + gamma < 2 pi hold strictly.
std::array<Vec3, 3> spherical_triangle_vertices(double alpha, double beta, double gamma);

/// The unique orthogonal A with A src[k] = dst[k]. Throws DegenerateInput if
/// src is nearly dependent and NotIsometric if the Gram matrices of src and
/// dst differ by more than `tol` (relative to the vector lengths).
Rotation align_o3(const std::array<Vec3, 3>& src, const std::array<Vec3, 3>& dst,
                  double tol = kDefaultTol);

/// Orthogonal Procrustes: the A in O(3) minimizing sum ||A src[k] - dst[k]||^2.
/// Handedness::Proper restricts the search to det A = +1 and
/// Handedness::Improper to det A = -1.
enum class Handedness { Any, Proper, Improper };
Rotation fit_o3(std::span<const Vec3> src, std::span<const Vec3> dst,
                Handedness handedness = Handedness::Any);

/// Nearest orthogonal matrix with the same determinant sign.
Mat3 nearest_orthogonal(const Mat3& m);

}  // namespace commonlines
