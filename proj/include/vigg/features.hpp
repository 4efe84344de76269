#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vigg/geometry.hpp"

namespace vigg {

/// Per-point descriptors, row-major and index-aligned with a PointCloud.
struct FeatureSet {
  std::size_t dim = 0;
  std::vector<double> values;

  FeatureSet() = default;
  FeatureSet(std::size_t dim, std::size_t count) : dim(dim), values(dim * count, 0.0) {}

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
};

/// Parameters of the fast point feature histogram descriptor.
struct DescriptorParams {
  double normal_radius = 0.05;
  double feature_radius = 0.125;
  int bins_per_angle = 11;

  std::size_t dim() const { return 3 * static_cast<std::size_t>(bins_per_angle); }
  /// Throws InvalidArgument on nonpositive radii, feature_radius < normal_radius
  /// or bins_per_angle < 1.
  void validate() const;
  /// normal_radius = 2 voxel, feature_radius = 5 voxel.
  static DescriptorParams for_voxel(double voxel);
};

/// Returns a copy of the cloud carrying PCA normals from each point's radius
/// neighborhood (k = 5 nearest when fewer than 3 neighbors), oriented away
/// from the cloud centroid. Throws EmptyInput on an empty cloud.
PointCloud estimate_normals(const PointCloud& cloud, double radius);

/// Darboux-frame angular triplet of an oriented point pair. Returns false for
/// coincident points or a degenerate frame.
struct PairFeature {
  double alpha = 0.0;  // angle of n2 in the (u, w) plane, [-pi, pi]
  double phi = 0.0;    // v . n2, [-1, 1]
  double theta = 0.0;  // cosine between the source normal and the baseline, [-1, 1]
};
bool compute_pair_feature(const Point3& p1, const Point3& n1, const Point3& p2, const Point3& n2,
                          PairFeature& out);

/// FPFH descriptor: per-point simplified histograms over the feature_radius
/// neighborhood, aggregated with inverse squared distance weights. Each of the
/// three blocks sums to 100, or is all zero for a point without neighbors.
/// Throws MissingNormals when the cloud has no normals.
FeatureSet compute_descriptor(const PointCloud& cloud, const DescriptorParams& params);

struct IndexedMatch {
  std::size_t src = 0;
  std::size_t dst = 0;
  double feature_distance = 0.0;
};

/// Feature-space nearest neighbor in Q for every source point, or for a
/// seeded uniform subset of max_pairs source points. Ascending source order.
std::vector<IndexedMatch> global_feature_match_indices(const FeatureSet& fp, const FeatureSet& fq,
                                                       std::size_t max_pairs, std::uint64_t seed);

/// Geometric correspondences from global_feature_match_indices, weighted with
/// the feature-similarity kernel at the median match distance.
CorrespondenceSet global_feature_match(const FeatureSet& fp, const FeatureSet& fq,
                                       const PointCloud& cloud_p, const PointCloud& cloud_q,
                                       std::size_t max_pairs, std::uint64_t seed);

}  // namespace vigg
