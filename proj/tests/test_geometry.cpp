#include <gtest/gtest.h>

#include "commonlines/geometry.hpp"
#include "support.hpp"

using namespace commonlines;
using testing_support::kHalfSqrt2;
using testing_support::code_of;
using testing_support::kPi;

namespace {

const Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY(), e3 = Vec3::UnitZ();

void expect_near(const Vec3& x, const Vec3& y, double tol) {
  EXPECT_LE((x - y).norm(), tol) << x.transpose() << " vs " << y.transpose();
}

}  // namespace

TEST(Cross, BasisAndSelf) {
  expect_near(cross(e1, e2), e3, 0);
  expect_near(cross(Vec3(1, 2, 3), Vec3(1, 2, 3)), Vec3::Zero(), 0);
  // expand the determinant by hand: e3 x (-e2) = -(e3 x e2) = e1
  expect_near(cross(e3, -e2), e1, 0);
}

TEST(MakeFrame, Examples) {
  const Frame f = make_frame(e1, e2);
  expect_near(f.a(), e1, 0);
  expect_near(f.b(), e2, 0);

  const Frame g = make_frame(2 * e1, e1 + e2);
  expect_near(g.a(), e1, 1e-15);
  expect_near(g.b(), e2, 1e-15);

  EXPECT_EQ(code_of([] { make_frame(e1, 3 * e1); }), ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([] { make_frame(Vec3::Zero(), e1); }), ErrorCode::DegenerateInput);
}

TEST(Frame, RejectsNonOrthonormal) {
  EXPECT_EQ(code_of([] { Frame(e1, e1 + e2); }), ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([] { Frame(2 * e1, e2); }), ErrorCode::DegenerateInput);
  expect_near(Frame(e1, e2).c(), e3, 0);
}

TEST(RandomFrame, OrthonormalAndDeterministic) {
  std::mt19937_64 rng(0);
  const Frame f0 = random_frame(rng);
  const Frame f1 = random_frame(rng);
  EXPECT_GT((f0.a() - f1.a()).norm(), 1e-6);

  std::mt19937_64 again(0);
  const Frame g0 = random_frame(again);
  EXPECT_EQ(f0.a(), g0.a());
  EXPECT_EQ(f0.b(), g0.b());

  std::mt19937_64 many(42);
  for (int t = 0; t < 1000; ++t) {
    const Frame f = random_frame(many);
    EXPECT_LT(std::abs(f.a().dot(f.b())), 1e-12);
    EXPECT_LT(std::abs(f.a().norm() - 1), 1e-12);
    EXPECT_LT(std::abs(f.b().norm() - 1), 1e-12);
  }
}

TEST(RandomFrame, MeanOfAIsSmall) {
  std::mt19937_64 rng(3);
  Vec3 mean = Vec3::Zero();
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) mean += random_frame(rng).a();
  EXPECT_LT((mean / draws).norm(), 0.05);
}

TEST(Embed, Examples) {
  expect_near(embed(Frame(e1, e2), Vec2(3, 4)), Vec3(3, 4, 0), 0);
  expect_near(embed(Frame(e2, e3), Vec2(1, 1)), Vec3(0, 1, 1), 0);
  std::mt19937_64 rng(1);
  expect_near(embed(random_frame(rng), Vec2::Zero()), Vec3::Zero(), 0);
}

TEST(Project, Examples) {
  EXPECT_EQ(project(Frame(e1, e2), Vec3(3, 4, 7)), Vec2(3, 4));
  EXPECT_EQ(project(Frame(e2, e3), e1), Vec2(0, 0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 100; ++t) {
    const Frame f = random_frame(rng);
    const Vec2 p(normal(rng), normal(rng));
    EXPECT_LT((project(f, embed(f, p)) - p).norm(), 1e-12);
  }
}

TEST(Embed, IsAnIsometry) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 1000; ++t) {
    const Frame f = random_frame(rng);
    const Vec2 p(normal(rng), normal(rng)), q(normal(rng), normal(rng));
    EXPECT_NEAR(embed(f, p).dot(embed(f, q)), p.dot(q), 1e-12);
  }
}

TEST(AngleBetween, AccurateAtExtremes) {
  EXPECT_DOUBLE_EQ(angle_between(Vec2(1, 0), Vec2(0, 1)), kPi / 2);
  EXPECT_NEAR(angle_between(Vec2(1, 0), Vec2(1, 1e-12)), 1e-12, 1e-24);
  EXPECT_NEAR(angle_between(Vec2(1, 0), Vec2(-1, 1e-12)), kPi - 1e-12, 1e-15);
  EXPECT_NEAR(angle_between(e1, Vec3(1, 1, 0)), kPi / 4, 1e-15);
}

TEST(SphericalTriangle, OctantTriangle) {
  const auto v = spherical_triangle_vertices(kPi / 2, kPi / 2, kPi / 2);
  expect_near(v[0], e1, 0);
  EXPECT_NEAR(v[0].dot(v[1]), 0, 1e-15);
  EXPECT_NEAR(v[0].dot(v[2]), 0, 1e-15);
  EXPECT_NEAR(v[1].dot(v[2]), 0, 1e-15);
}

TEST(SphericalTriangle, EqualQuarterAngles) {
  const auto v = spherical_triangle_vertices(kPi / 4, kPi / 4, kPi / 4);
  EXPECT_NEAR(v[0].dot(v[1]), kHalfSqrt2, 1e-15);
  EXPECT_NEAR(v[0].dot(v[2]), kHalfSqrt2, 1e-15);
  EXPECT_NEAR(v[1].dot(v[2]), kHalfSqrt2, 1e-15);
  EXPECT_GT(std::abs(det3(v[0], v[1], v[2])), 0.1);
  // canonical placement: second vertex in the e1-e2 plane, third above it
  EXPECT_EQ(v[1].z(), 0.0);
  EXPECT_GT(v[2].z(), 0.0);
}

TEST(SphericalTriangle, RejectsDegenerateAndViolating) {
  EXPECT_EQ(code_of([] { spherical_triangle_vertices(kPi / 4, kPi / 4, kPi / 2); }),
            ErrorCode::TriangleInequalityViolated);
  EXPECT_EQ(code_of([] { spherical_triangle_vertices(0.1, 0.2, 1.0); }),
            ErrorCode::TriangleInequalityViolated);
  EXPECT_EQ(code_of([] { spherical_triangle_vertices(2.5, 2.5, 2.0); }),
            ErrorCode::TriangleInequalityViolated);
  EXPECT_EQ(code_of([] { spherical_triangle_vertices(0.0, 1.0, 1.0); }),
            ErrorCode::TriangleInequalityViolated);
  EXPECT_EQ(code_of([] { spherical_triangle_vertices(kPi, 1.0, 1.0); }),
            ErrorCode::TriangleInequalityViolated);
}

TEST(SphericalTriangle, ReproducesAnglesProperty) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  int checked = 0;
  while (checked < 2000) {
    const double a = angle(rng), b = angle(rng), g = angle(rng);
    if (testing_support::angle_slack(a, b, g) <= 1e-6) continue;
    const auto v = spherical_triangle_vertices(a, b, g);
    EXPECT_NEAR(angle_between(v[0], v[1]), a, 1e-10);
    EXPECT_NEAR(angle_between(v[0], v[2]), b, 1e-10);
    EXPECT_NEAR(angle_between(v[1], v[2]), g, 1e-10);
    EXPECT_GT(std::abs(det3(v[0], v[1], v[2])), 0.0);
    ++checked;
  }
}

TEST(Rotation, ConstructionChecksOrthogonality) {
  EXPECT_EQ(code_of([] { Rotation(2 * Mat3::Identity()); }), ErrorCode::NotIsometric);
  EXPECT_EQ(Rotation::reflection().det(), -1.0);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const Rotation r = Rotation::random(rng, false);
    EXPECT_NEAR(r.det(), 1.0, 1e-12);
    EXPECT_LT((r.matrix() * r.matrix().transpose() - Mat3::Identity()).norm(), 1e-12);
    EXPECT_LT(((r * r.inverse()).matrix() - Mat3::Identity()).norm(), 1e-12);
  }
  const Rotation quarter = Rotation::from_axis_angle(kPi / 2 * e3);
  expect_near(quarter * e1, e2, 1e-15);
}

TEST(AlignO3, Examples) {
  const std::array<Vec3, 3> basis{e1, e2, e3};
  EXPECT_LT((align_o3(basis, basis).matrix() - Mat3::Identity()).norm(), 1e-15);

  const Rotation flip = align_o3(basis, {e1, e2, -e3});
  EXPECT_LT((flip.matrix() - Rotation::reflection().matrix()).norm(), 1e-15);
  EXPECT_NEAR(flip.det(), -1.0, 1e-15);
}

TEST(AlignO3, RecoversRandomOrthogonal) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 200; ++t) {
    const Rotation r = Rotation::random(rng);
    std::array<Vec3, 3> src, dst;
    for (int k = 0; k < 3; ++k) {
      src[k] = Vec3(normal(rng), normal(rng), normal(rng));
      dst[k] = r * src[k];
    }
    if (std::abs(det3(src[0], src[1], src[2])) < 0.05) continue;
    EXPECT_LT((align_o3(src, dst).matrix() - r.matrix()).norm(), 1e-10);
    // align(A src, src) composed with A is the identity
    EXPECT_LT(((align_o3(dst, src) * r).matrix() - Mat3::Identity()).norm(), 1e-9);
  }
}

TEST(AlignO3, Errors) {
  EXPECT_EQ(code_of([] { align_o3({e1, e2, e1 + e2}, {e1, e2, e3}); }), ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([] { align_o3({e1, e2, e3}, {e1, e2, 2 * e3}); }), ErrorCode::NotIsometric);
  EXPECT_EQ(code_of([] { align_o3({e1, e2, e3}, {e1, (e1 + e2).normalized(), e3}); }),
            ErrorCode::NotIsometric);
}

TEST(FitO3, RecoversAndRespectsHandedness) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  const Rotation r = Rotation::random(rng, false);
  std::vector<Vec3> src, dst;
  for (int k = 0; k < 6; ++k) {
    src.emplace_back(normal(rng), normal(rng), normal(rng));
    dst.push_back(r * src.back());
  }
  EXPECT_LT((fit_o3(src, dst).matrix() - r.matrix()).norm(), 1e-12);
  EXPECT_NEAR(fit_o3(src, dst, Handedness::Improper).det(), -1.0, 1e-12);
  EXPECT_NEAR(fit_o3(src, dst, Handedness::Proper).det(), 1.0, 1e-12);
}

TEST(NearestOrthogonal, ProjectsPerturbedRotation) {
  std::mt19937_64 rng(13);
  const Rotation r = Rotation::random(rng);
  const Mat3 noisy = r.matrix() + 1e-3 * Mat3::Ones();
  const Mat3 q = nearest_orthogonal(noisy);
  EXPECT_LT((q * q.transpose() - Mat3::Identity()).norm(), 1e-12);
  EXPECT_NEAR(q.determinant(), r.det(), 1e-12);
  EXPECT_LT((q - r.matrix()).norm(), 5e-3);
}

TEST(FrameSet, SizeAndTransform) {
  EXPECT_EQ(code_of([] { FrameSet({Frame(e1, e2), Frame(e2, e3)}); }), ErrorCode::IndexOutOfRange);
  const FrameSet fs({Frame(e1, e2), Frame(e1, e3), Frame(e2, e3)});
  const FrameSet moved = fs.transformed(Rotation::reflection());
  expect_near(moved[1].b(), -e3, 0);
}

TEST(Genericity, CoordinateFramesAreGeneric) {
  const FrameSet fs({Frame(e1, e2), Frame(e1, e3), Frame(e2, e3)});
  const auto g = check_generic(fs.span());
  EXPECT_TRUE(g.generic);
  EXPECT_NEAR(g.min_triple_volume, 1.0, 1e-15);
}

TEST(Genericity, DetectsCoincidentPlanesAndLines) {
  const std::vector<Frame> dup{Frame(e1, e2), Frame(e1, e3), Frame(e2, e1)};
  auto g = check_generic(dup);
  EXPECT_FALSE(g.generic);
  EXPECT_EQ(g.witness[0], 0);
  EXPECT_EQ(g.witness[1], 2);
  EXPECT_EQ(code_of([&] { require_generic(dup); }), ErrorCode::NotGeneric);

  // three planes through the e1 axis: lines (1,2) and (1,3) coincide
  const Vec3 tilted = (e2 + e3).normalized();
  const std::vector<Frame> pencil{Frame(e1, e2), Frame(e1, e3), Frame(e1, tilted)};
  g = check_generic(pencil);
  EXPECT_FALSE(g.generic);
  EXPECT_EQ(g.witness[3] >= 0, true);
  EXPECT_LT(g.min_triple_volume, 1e-15);
}

TEST(Genericity, SamplerHonoursFloor) {
  std::mt19937_64 rng(21);
  for (int n = 3; n <= 12; ++n) {
    const auto fs = sample_generic_frames(n, rng);
    ASSERT_TRUE(fs.has_value());
    EXPECT_GE(conditioning(check_generic(fs->span())), kDefaultConditioning);
  }
  EXPECT_FALSE(sample_generic_frames(5, rng, 2.0, 3).has_value());
}
