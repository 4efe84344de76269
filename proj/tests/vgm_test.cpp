#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_support.hpp"
#include "vigg/synth.hpp"
#include "vigg/vgm.hpp"

namespace vigg {
namespace {

TEST(ChiSquare, MatchesCdfIntegration) {
  for (double g : {0.5, 2.0, 5.0, 10.0, 20.0}) {
    EXPECT_NEAR(chi_square_confidence(g), oracle::chi2_3_cdf(g), 1e-10) << g;
  }
  EXPECT_NEAR(chi_square_confidence(10.0), 0.9814, 1e-4);
  EXPECT_THROW(chi_square_confidence(0.0), InvalidArgument);
}

TEST(PseudoInliers, InclusiveThresholdPreservesOrder) {
  const CorrespondenceSet c{{Point3(0, 0, 0), Point3(0.5, 0, 0)},
                            {Point3(1, 0, 0), Point3(1.25, 0, 0)},
                            {Point3(2, 0, 0), Point3(2.0, 0.1, 0)}};
  const auto in = select_pseudo_inliers(c, RigidTransform::identity(), 0.25);
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0].src, Point3(1, 0, 0));
  EXPECT_EQ(in[1].src, Point3(2, 0, 0));
}

TEST(EstimateSigma, MomentEstimateFallbackAndFloor) {
  VgmConfig cfg;
  cfg.sigma_floor = 1e-12;
  const CorrespondenceSet c{{Point3(0, 0, 0), Point3(0.03, 0, 0)},
                            {Point3(1, 0, 0), Point3(1, 0.04, 0)},
                            {Point3(2, 0, 0), Point3(2, 0, 0.05)}};
  const auto m = estimate_sigma(c, RigidTransform::identity(), cfg);
  EXPECT_NEAR(m.sigma_sq, (0.0009 + 0.0016 + 0.0025) / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.radius_sq, m.sigma_sq * 10.0);
  EXPECT_FALSE(m.fallback);
  EXPECT_EQ(m.inlier_count, 3u);

  const auto f = estimate_sigma(std::span(c).first(2), RigidTransform::identity(), cfg);
  EXPECT_TRUE(f.fallback);
  EXPECT_DOUBLE_EQ(f.sigma_sq, 0.01 / 10.0);

  cfg.sigma_floor = 0.01;
  EXPECT_DOUBLE_EQ(estimate_sigma(c, RigidTransform::identity(), cfg).sigma_sq, 0.01);
  EXPECT_DOUBLE_EQ(VgmConfig::floor_for_voxel(0.04), 1e-4);
}

TEST(EstimateSigma, ConsistentForGaussianResiduals) {
  std::mt19937_64 rng(61);
  const double sigma = 0.02;
  std::normal_distribution<double> g(0.0, sigma);
  const auto t = test::random_transform(rng);
  CorrespondenceSet c;
  for (int i = 0; i < 20000; ++i) {
    const Point3 s = test::random_point(rng);
    c.push_back({s, t.apply(s) + Point3(g(rng), g(rng), g(rng))});
  }
  VgmConfig cfg;
  cfg.sigma_floor = 1e-12;
  EXPECT_NEAR(estimate_sigma(c, t, cfg).sigma_sq / (sigma * sigma), 1.0, 0.03);
}

TEST(SearchZones, MatchBruteForceBall) {
  std::mt19937_64 rng(62);
  const auto p = test::random_cloud(rng, 300);
  const auto q = test::random_cloud(rng, 2000);
  const SpatialIndex3 qi(q.points);
  const auto t = test::random_transform(rng, 0.2);
  ErrorModel m;
  m.sigma_sq = 0.003;
  m.radius_sq = 0.03;
  std::vector<std::size_t> sample{0, 5, 17, 200, 299};
  const auto zones = build_search_zones(sample, p, t, qi, m);
  ASSERT_EQ(zones.size(), sample.size());
  for (std::size_t k = 0; k < zones.size(); ++k) {
    EXPECT_EQ(zones[k].source, sample[k]);
    std::vector<std::size_t> want;
    const Point3 c = t.apply(p.points[sample[k]]);
    for (std::size_t j = 0; j < q.size(); ++j)
      if ((q.points[j] - c).squaredNorm() <= m.radius_sq) want.push_back(j);
    EXPECT_EQ(zones[k].candidates, want);
  }
  m.radius_sq = 0.0;
  EXPECT_THROW(build_search_zones(sample, p, t, qi, m), InvalidArgument);
}

TEST(LocalMatch, NearestFeatureInZoneWithTieToSmallerIndex) {
  FeatureSet fp(2, 2), fq(2, 4);
  fp.values = {0, 0, 1, 1};
  fq.values = {5, 5, 1, 0, 0, 1, 1, 1};
  const std::vector<SearchZone> zones{{0, {0, 1, 2}}, {1, {}}, {1, {0, 3}}};
  const auto m = local_feature_match_indices(zones, fp, fq);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].src, 0u);
  EXPECT_EQ(m[0].dst, 1u);  // ties with 2, smaller index wins
  EXPECT_DOUBLE_EQ(m[0].feature_distance, 1.0);
  EXPECT_EQ(m[1].dst, 3u);
  EXPECT_DOUBLE_EQ(m[1].feature_distance, 0.0);
}

TEST(VgmMatcher, ExtractsTrueCounterpartsOnNoiselessScene) {
  SceneSpec spec = SceneSpec::noiseless();
  spec.point_count = 1500;
  const Scene s = generate_scene(spec);
  VgmConfig cfg;
  const VgmMatcher matcher(s.p, s.q, s.fp, s.fq, cfg, 0);
  const auto out = matcher.extract(s.c_vis, s.truth);
  EXPECT_EQ(out.visual_count, s.c_vis.size());
  EXPECT_EQ(out.geometric_count + out.visual_count, out.correspondences.size());
  EXPECT_FALSE(out.model.fallback);
  std::size_t exact = 0;
  for (std::size_t k = 0; k < out.geometric_count; ++k) {
    const auto& c = out.correspondences[k];
    exact += (s.truth.apply(c.src) - c.dst).norm() < 1e-9;
    EXPECT_EQ(c.provenance, Provenance::kGeometric);
  }
  EXPECT_GT(exact, out.geometric_count * 9 / 10);
}

TEST(VgmMatcher, VisualSetSelection) {
  SceneSpec spec = SceneSpec::standard();
  spec.point_count = 1500;
  const Scene s = generate_scene(spec);
  VgmConfig cfg;
  const auto in = select_pseudo_inliers(s.c_vis, s.truth, cfg.t_inlier);
  const auto a = vgm_extract(s.p, s.q, s.fp, s.fq, s.c_vis, s.truth, cfg, 0);
  EXPECT_EQ(a.visual_count, in.size());
  cfg.keep_all_visual = true;
  const auto b = vgm_extract(s.p, s.q, s.fp, s.fq, s.c_vis, s.truth, cfg, 0);
  EXPECT_EQ(b.visual_count, s.c_vis.size());
  EXPECT_EQ(a.geometric_count, b.geometric_count);
}

TEST(VgmMatcher, FixedRadiusAndEmptyResult) {
  SceneSpec spec = SceneSpec::noiseless();
  spec.point_count = 1000;
  const Scene s = generate_scene(spec);
  VgmConfig cfg;
  cfg.fixed_radius = 1e-6;
  // A far-off prior leaves every zone empty and no visual pseudo-inliers.
  const auto far = RigidTransform::from_translation(Point3(100, 0, 0)) * s.truth;
  EXPECT_THROW(vgm_extract(s.p, s.q, s.fp, s.fq, s.c_vis, far, cfg, 0), NoCorrespondences);
  cfg.fixed_radius = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

}  // namespace
}  // namespace vigg
