#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vigg/features.hpp"
#include "vigg/geometry.hpp"
#include "vigg/spatial_index.hpp"

namespace vigg {

/// Isotropic residual model of a prior transform. radius_sq is the squared
/// search-zone radius, sigma_sq * gamma_sq.
struct ErrorModel {
  double sigma_sq = 0.0;
  double gamma_sq = 10.0;
  double radius_sq = 0.0;
  std::size_t inlier_count = 0;
  /// Fewer pseudo-inliers than required; sigma_sq came from t_inlier.
  bool fallback = false;

  double radius() const;
  /// P(chi2(3) <= gamma_sq).
  double confidence() const;
};

struct SearchZone {
  std::size_t source = 0;
  std::vector<std::size_t> candidates;  // ascending target indices
};

struct VgmConfig {
  double t_inlier = 0.10;
  double gamma_sq = 10.0;
  double sigma_floor = 0.25 * 0.025 * 0.25 * 0.025;
  std::size_t min_inliers = 3;
  std::size_t max_source_points = 10'000;
  /// Ablation only: use this zone radius (meters) instead of the
  /// distribution-based one.
  std::optional<double> fixed_radius;
  /// Feature kernel bandwidth; 0 selects the median feature distance of the
  /// extracted matches.
  double weight_bandwidth = 0.0;
  /// Append every visual match to the extracted set instead of only the
  /// pseudo-inliers of the prior.
  bool keep_all_visual = false;

  /// sigma_floor = (voxel / 4)^2.
  static double floor_for_voxel(double voxel) { return 0.0625 * voxel * voxel; }
  void validate() const;
};

/// Visual matches with |T_pri(src) - dst| <= t_inlier, order preserved.
CorrespondenceSet select_pseudo_inliers(std::span<const Correspondence> c_vis,
                                        const RigidTransform& t_pri, double t_inlier);

/// Moment estimate sigma^2 = sum |T_pri(src) - dst|^2 / (3 n). With fewer than
/// cfg.min_inliers matches sigma^2 = t_inlier^2 / gamma^2. Never below
/// cfg.sigma_floor.
ErrorModel estimate_sigma(std::span<const Correspondence> c_in, const RigidTransform& t_pri,
                          const VgmConfig& cfg);

/// Confidence of the chi-square (3 dof) interval [0, gamma_sq].
double chi_square_confidence(double gamma_sq);

/// Every target point within sqrt(radius_sq) of each transformed sample point.
std::vector<SearchZone> build_search_zones(std::span<const std::size_t> sample,
                                           const PointCloud& p, const RigidTransform& t_pri,
                                           const SpatialIndex3& q_index, const ErrorModel& model);

struct LocalMatch {
  std::size_t src = 0;
  std::size_t dst = 0;
  double feature_distance = 0.0;
};

/// Feature-space nearest candidate of each nonempty zone; ties go to the
/// smaller target index.
std::vector<LocalMatch> local_feature_match_indices(std::span<const SearchZone> zones,
                                                    const FeatureSet& fp, const FeatureSet& fq);

/// Geometric correspondences of local_feature_match_indices, weighted by the
/// feature kernel (bandwidth 0 selects the median match distance).
CorrespondenceSet local_feature_match(std::span<const SearchZone> zones, const PointCloud& p,
                                      const PointCloud& q, const FeatureSet& fp,
                                      const FeatureSet& fq, double bandwidth = 0.0);

struct VgmOutput {
  /// Extracted geometric correspondences followed by the visual pseudo-inliers
  /// (or all visual matches with keep_all_visual).
  CorrespondenceSet correspondences;
  ErrorModel model;
  std::size_t geometric_count = 0;
  std::size_t visual_count = 0;
};

/// Visual-guided geometric matching over a fixed pair of clouds. The target
/// index and the sampled source points are built once and reused by every
/// extract call.
class VgmMatcher {
 public:
  VgmMatcher(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
             const FeatureSet& fq, VgmConfig cfg, std::uint64_t seed);

  /// Throws NoCorrespondences if the result is empty.
  VgmOutput extract(std::span<const Correspondence> c_vis, const RigidTransform& t_pri) const;

  const std::vector<std::size_t>& sample() const { return sample_; }
  const VgmConfig& config() const { return cfg_; }

 private:
  const PointCloud& p_;
  const PointCloud& q_;
  const FeatureSet& fp_;
  const FeatureSet& fq_;
  VgmConfig cfg_;
  SpatialIndex3 q_index_;
  std::vector<std::size_t> sample_;
};

VgmOutput vgm_extract(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
                      const FeatureSet& fq, std::span<const Correspondence> c_vis,
                      const RigidTransform& t_pri, const VgmConfig& cfg, std::uint64_t seed);

}  // namespace vigg
