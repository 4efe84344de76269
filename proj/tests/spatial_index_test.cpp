#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vigg/spatial_index.hpp"

namespace vigg {
namespace {

std::vector<std::size_t> scan_radius(const std::vector<Point3>& pts, const Point3& c, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if ((pts[i] - c).squaredNorm() <= r * r) out.push_back(i);
  }
  return out;
}

Neighbor scan_nearest(const std::vector<double>& rows, std::size_t dim, std::span<const double> q) {
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i * dim < rows.size(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < dim; ++k) d += (rows[i * dim + k] - q[k]) * (rows[i * dim + k] - q[k]);
    if (d < best.distance_sq) best = {i, d};
  }
  return best;
}

TEST(SpatialIndex3, RadiusQueryMatchesScan) {
  std::mt19937_64 rng(11);
  const auto cloud = test::random_cloud(rng, 10000);
  const SpatialIndex3 index(cloud.points);
  std::uniform_real_distribution<double> radius(0.0, 0.3);
  for (int k = 0; k < 100; ++k) {
    const Point3 c = test::random_point(rng, -1.2, 1.2);
    const double r = radius(rng);
    EXPECT_EQ(index.radius_query(c, r), scan_radius(cloud.points, c, r));
  }
}

TEST(SpatialIndex3, RadiusEdgeCases) {
  std::mt19937_64 rng(12);
  const auto cloud = test::random_cloud(rng, 500);
  const SpatialIndex3 index(cloud.points);
  EXPECT_TRUE(index.radius_query(Point3(5, 5, 5), 0.0).empty());
  EXPECT_EQ(index.radius_query(cloud.points[17], 0.0), std::vector<std::size_t>{17});
  EXPECT_EQ(index.radius_query(Point3::Zero(), 10.0).size(), cloud.size());
}

TEST(SpatialIndex3, NearestAndKnnMatchScanWithTies) {
  std::mt19937_64 rng(13);
  // Integer lattice points with duplicates make exact distance ties common.
  std::uniform_int_distribution<int> coord(0, 6);
  std::vector<Point3> pts;
  for (int i = 0; i < 2000; ++i) pts.emplace_back(coord(rng), coord(rng), coord(rng));
  std::vector<double> rows;
  for (const auto& p : pts) rows.insert(rows.end(), {p.x(), p.y(), p.z()});
  const SpatialIndex3 index(pts);
  for (int k = 0; k < 1000; ++k) {
    const Point3 q(coord(rng) + 0.5 * (k % 2), coord(rng), coord(rng));
    const Neighbor got = index.nearest_query(q);
    const Neighbor want = scan_nearest(rows, 3, std::span<const double>(q.data(), 3));
    EXPECT_EQ(got.index, want.index);
    EXPECT_EQ(got.distance_sq, want.distance_sq);

    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < pts.size(); ++i) all.push_back({i, (pts[i] - q).squaredNorm()});
    std::stable_sort(all.begin(), all.end(),
                     [](const Neighbor& a, const Neighbor& b) { return a.distance_sq < b.distance_sq; });
    const auto knn = index.knn_query(q, 7);
    ASSERT_EQ(knn.size(), 7u);
    for (std::size_t j = 0; j < 7; ++j) {
      EXPECT_EQ(knn[j].index, all[j].index);
      EXPECT_EQ(knn[j].distance_sq, all[j].distance_sq);
    }
  }
}

TEST(SpatialIndex3, SingletonAndEmpty) {
  const std::vector<Point3> one{Point3(1, 2, 3)};
  const SpatialIndex3 index(one);
  const auto n = index.nearest_query(Point3(0, 0, 0));
  EXPECT_EQ(n.index, 0u);
  EXPECT_DOUBLE_EQ(n.distance_sq, 14.0);
  EXPECT_EQ(index.nearest_query(one[0]).distance_sq, 0.0);
  EXPECT_EQ(index.knn_query(Point3::Zero(), 5).size(), 1u);
  const SpatialIndex3 empty{std::vector<Point3>{}};
  EXPECT_THROW(empty.nearest_query(Point3::Zero()), EmptyInput);
  EXPECT_TRUE(empty.radius_query(Point3::Zero(), 1.0).empty());
}

class FeatureIndexDims : public ::testing::TestWithParam<std::size_t> {};

TEST_P(FeatureIndexDims, NearestMatchesScan) {
  const std::size_t dim = GetParam();
  std::mt19937_64 rng(14 + dim);
  std::uniform_int_distribution<int> level(0, 3);
  std::vector<double> rows;
  for (std::size_t i = 0; i < 800 * dim; ++i) rows.push_back(level(rng));
  const FeatureIndex index(rows, dim);
  for (int k = 0; k < 300; ++k) {
    std::vector<double> q(dim);
    for (auto& v : q) v = level(rng) + 0.25 * (k % 3);
    const Neighbor got = index.nearest(q);
    const Neighbor want = scan_nearest(rows, dim, q);
    EXPECT_EQ(got.index, want.index);
    EXPECT_EQ(got.distance_sq, want.distance_sq);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, FeatureIndexDims, ::testing::Values(2, 16, 17, 33));

TEST(FeatureIndex, EmptyThrows) {
  const FeatureIndex index({}, 33);
  EXPECT_THROW(index.nearest(std::vector<double>(33, 0.0)), EmptyInput);
}

TEST(KdTree, BuildIsDeterministic) {
  std::mt19937_64 rng(15);
  const auto cloud = test::random_cloud(rng, 3000);
  const SpatialIndex3 a(cloud.points), b(cloud.points);
  for (int k = 0; k < 50; ++k) {
    const Point3 q = test::random_point(rng);
    EXPECT_EQ(a.radius_query(q, 0.2), b.radius_query(q, 0.2));
    EXPECT_EQ(a.nearest_query(q).index, b.nearest_query(q).index);
  }
}

TEST(SquaredDistance, Basic) {
  const std::vector<double> a{1, 2, 3}, b{4, 6, 3};
  EXPECT_EQ(squared_distance(a, b), 25.0);
}

}  // namespace
}  // namespace vigg
