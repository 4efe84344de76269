#include <gtest/gtest.h>

#include <map>
#include <random>
#include <tuple>

#include "oracles.hpp"
#include "test_support.hpp"
#include "vigg/geometry.hpp"

namespace vigg {
namespace {

Eigen::Vector4d homogeneous(const Point3& p) { return {p.x(), p.y(), p.z(), 1.0}; }

TEST(RigidTransform, ApplyMatchesHomogeneousProduct) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto t = test::random_transform(rng);
    const Point3 p = test::random_point(rng, -5, 5);
    const Eigen::Vector4d h = t.matrix() * homogeneous(p);
    EXPECT_LT((t.apply(p) - h.head<3>()).norm(), 1e-12);
  }
}

TEST(RigidTransform, ComposeAndInverseMatchMatrixAlgebra) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    const auto a = test::random_transform(rng);
    const auto b = test::random_transform(rng);
    EXPECT_LT(((a * b).matrix() - a.matrix() * b.matrix()).norm(), 1e-12);
    EXPECT_LT((a.inverse().matrix() - a.matrix().inverse()).norm(), 1e-12);
    EXPECT_LT(((a * a.inverse()).matrix() - Matrix4::Identity()).norm(), 1e-12);
  }
}

TEST(RigidTransform, IdentityLeavesPointUnchanged) {
  const Point3 p(1, 2, 3);
  EXPECT_EQ(RigidTransform::identity().apply(p), p);
}

TEST(RigidTransform, QuarterTurnAboutZ) {
  const auto t = RigidTransform::from_axis_angle(Point3::UnitZ(), std::numbers::pi / 2);
  EXPECT_LT((t.apply(Point3(1, 0, 0)) - Point3(0, 1, 0)).norm(), 1e-15);
}

TEST(RigidTransform, RejectsNonRotations) {
  Matrix3 reflection = Matrix3::Identity();
  reflection(2, 2) = -1.0;
  EXPECT_THROW(RigidTransform(reflection, Point3::Zero()), InvalidArgument);
  EXPECT_THROW(RigidTransform(2.0 * Matrix3::Identity(), Point3::Zero()), InvalidArgument);
  Matrix4 m = Matrix4::Identity();
  m(3, 0) = 1.0;
  EXPECT_THROW(RigidTransform::from_matrix(m), InvalidArgument);
  EXPECT_THROW(RigidTransform::from_axis_angle(Point3::Zero(), 1.0), InvalidArgument);
}

CorrespondenceSet noisy_instance(std::mt19937_64& rng, const RigidTransform& t, std::size_t n,
                                 double noise) {
  std::normal_distribution<double> g(0.0, noise);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  CorrespondenceSet cs;
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 s = test::random_point(rng);
    cs.push_back({s, t.apply(s) + Point3(g(rng), g(rng), g(rng)), w(rng)});
  }
  return cs;
}

TEST(FitWeighted, MatchesQuaternionOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> count(3, 60);
  for (int k = 0; k < 300; ++k) {
    const auto truth = test::random_transform(rng);
    const auto cs = noisy_instance(rng, truth, count(rng), 0.05);
    const auto fit = fit_weighted(cs);
    const auto ref = oracle::horn_fit(cs);
    EXPECT_LT((fit.rotation() - ref.rotation()).norm(), 1e-9);
    EXPECT_LT((fit.translation() - ref.translation()).norm(), 1e-9);
  }
}

TEST(FitWeighted, RecoversExactTransform) {
  std::mt19937_64 rng(4);
  const auto truth = test::random_transform(rng);
  const auto cs = noisy_instance(rng, truth, 10, 0.0);
  const auto fit = fit_weighted(cs);
  EXPECT_LT(rotation_error(fit, truth), 1e-6);
  EXPECT_LT(translation_error(fit, truth), 1e-12);
}

TEST(FitWeighted, ZeroWeightPointsAreIgnored) {
  std::mt19937_64 rng(5);
  const auto truth = test::random_transform(rng);
  auto cs = noisy_instance(rng, truth, 8, 0.0);
  cs.push_back({Point3(0, 0, 0), Point3(100, 100, 100), 0.0});
  const auto fit = fit_weighted(cs);
  EXPECT_LT(translation_error(fit, truth), 1e-9);
}

TEST(FitWeighted, DegenerateInputs) {
  CorrespondenceSet two{{Point3(0, 0, 0), Point3(0, 0, 0)}, {Point3(1, 0, 0), Point3(1, 0, 0)}};
  EXPECT_THROW(fit_weighted(two), DegenerateInput);
  CorrespondenceSet collinear;
  for (int i = 0; i < 5; ++i) collinear.push_back({Point3(i, 0, 0), Point3(i, 1, 0)});
  EXPECT_THROW(fit_weighted(collinear), DegenerateInput);
  EXPECT_FALSE(try_fit_weighted(collinear));
  CorrespondenceSet zero;
  for (int i = 0; i < 4; ++i) zero.push_back({Point3(i, i * i, 1), Point3(i, i * i, 1), 0.0});
  EXPECT_THROW(fit_weighted(zero), DegenerateInput);
}

TEST(Errors, RotationErrorMatchesQuaternionAngle) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 500; ++k) {
    const auto a = test::random_transform(rng);
    const auto b = test::random_transform(rng);
    EXPECT_NEAR(rotation_error(a, b), oracle::quaternion_angle_deg(a.rotation(), b.rotation()), 1e-6);
  }
}

TEST(Errors, KnownValues) {
  const auto a = RigidTransform::from_axis_angle(Point3::UnitX(), std::numbers::pi / 6, Point3(1, 2, 2));
  EXPECT_NEAR(rotation_error(a, RigidTransform::identity()), 30.0, 1e-12);
  EXPECT_DOUBLE_EQ(translation_error(a, RigidTransform::identity()), 3.0);
  EXPECT_EQ(rotation_error(a, a), 0.0);
  const auto flip = RigidTransform::from_axis_angle(Point3::UnitY(), std::numbers::pi);
  EXPECT_NEAR(rotation_error(flip, RigidTransform::identity()), 180.0, 1e-9);
}

TEST(VoxelDownsample, MatchesHashGridOracle) {
  std::mt19937_64 rng(7);
  const auto cloud = test::random_cloud(rng, 5000, -1.0, 1.0);
  const double voxel = 0.13;

  std::map<std::tuple<long, long, long>, std::size_t> slot;
  std::vector<Point3> sum;
  std::vector<int> count;
  for (const auto& p : cloud.points) {
    const auto key = std::make_tuple(static_cast<long>(std::floor(p.x() / voxel)),
                                     static_cast<long>(std::floor(p.y() / voxel)),
                                     static_cast<long>(std::floor(p.z() / voxel)));
    auto [it, fresh] = slot.emplace(key, sum.size());
    if (fresh) {
      sum.push_back(Point3::Zero());
      count.push_back(0);
    }
    sum[it->second] += p;
    ++count[it->second];
  }

  const auto out = voxel_downsample(cloud, voxel);
  ASSERT_EQ(out.size(), sum.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_LT((out.points[i] - sum[i] / count[i]).norm(), 1e-14);
  }
}

TEST(VoxelDownsample, EdgeCases) {
  PointCloud c;
  EXPECT_TRUE(voxel_downsample(c, 0.1).empty());
  c.points = {Point3(0.01, 0.01, 0.01), Point3(0.03, 0.03, 0.03), Point3(-0.01, 0, 0)};
  c.normals = {Point3::UnitZ(), Point3::UnitZ(), Point3::UnitZ()};
  const auto out = voxel_downsample(c, 0.1);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_LT((out.points[0] - Point3(0.02, 0.02, 0.02)).norm(), 1e-15);
  EXPECT_FALSE(out.has_normals());
  EXPECT_THROW(voxel_downsample(c, 0.0), InvalidArgument);
}

TEST(Validate, RejectsBadClouds) {
  PointCloud c;
  c.points = {Point3(0, 0, 0), Point3(1, 0, 0)};
  EXPECT_NO_THROW(validate(c));
  c.normals = {Point3::UnitZ()};
  EXPECT_THROW(validate(c), InvalidArgument);
  c.normals = {Point3::UnitZ(), Point3(0, 0, 2)};
  EXPECT_THROW(validate(c), InvalidArgument);
  c.normals.clear();
  c.points[1].x() = std::nan("");
  EXPECT_THROW(validate(c), InvalidArgument);
}

}  // namespace
}  // namespace vigg
