#include "vigg/features.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vigg/random.hpp"
#include "vigg/spatial_index.hpp"
#include "vigg/weighting.hpp"

namespace vigg {

void DescriptorParams::validate() const {
  if (!(normal_radius > 0.0) || !(feature_radius > 0.0)) {
    throw InvalidArgument("descriptor radii must be positive");
  }
  if (feature_radius < normal_radius) {
    throw InvalidArgument("feature_radius must be at least normal_radius");
  }
  if (bins_per_angle < 1) throw InvalidArgument("bins_per_angle must be positive");
}

DescriptorParams DescriptorParams::for_voxel(double voxel) {
  return {2.0 * voxel, 5.0 * voxel, 11};
}

PointCloud estimate_normals(const PointCloud& cloud, double radius) {
  if (cloud.empty()) throw EmptyInput("cannot estimate normals of an empty cloud");
  if (!(radius > 0.0)) throw InvalidArgument("normal radius must be positive");

  const SpatialIndex3 index(cloud.points);
  Point3 centroid = Point3::Zero();
  for (const auto& p : cloud.points) centroid += p;
  centroid /= static_cast<double>(cloud.size());

  PointCloud out;
  out.points = cloud.points;
  out.normals.resize(cloud.size());
  std::vector<std::size_t> nbrs;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    nbrs = index.radius_query(p, radius);
    if (nbrs.size() < 3) {
      nbrs.clear();
      for (const auto& n : index.knn_query(p, 5)) nbrs.push_back(n.index);
    }

    Point3 mean = Point3::Zero();
    for (auto j : nbrs) mean += cloud.points[j];
    mean /= static_cast<double>(nbrs.size());
    Matrix3 cov = Matrix3::Zero();
    for (auto j : nbrs) {
      const Point3 d = cloud.points[j] - mean;
      cov.noalias() += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Matrix3> solver(cov);
    Point3 n = solver.eigenvectors().col(0).normalized();
    if (n.dot(p - centroid) < 0.0) n = -n;
    out.normals[i] = n;
  }
  return out;
}

bool compute_pair_feature(const Point3& p1, const Point3& n1, const Point3& p2, const Point3& n2,
                          PairFeature& out) {
  Point3 dp = p2 - p1;
  const double dist = dp.norm();
  out = {};
  if (dist == 0.0) return false;

  const double angle1 = n1.dot(dp) / dist;
  const double angle2 = n2.dot(dp) / dist;
  Point3 u = n1;
  Point3 other = n2;
  double theta = angle1;
  // Pick the source so the result does not depend on pair order.
  if (std::abs(angle1) < std::abs(angle2)) {
    u = n2;
    other = n1;
    dp = -dp;
    theta = -angle2;
  }

  Point3 v = dp.cross(u);
  const double v_norm = v.norm();
  if (v_norm == 0.0) return false;
  v /= v_norm;
  const Point3 w = u.cross(v);

  out.theta = theta;
  out.phi = v.dot(other);
  out.alpha = std::atan2(w.dot(other), u.dot(other));
  return true;
}

namespace {

int bin_of(double normalized, int bins) {
  const int b = static_cast<int>(std::floor(bins * normalized));
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

FeatureSet compute_descriptor(const PointCloud& cloud, const DescriptorParams& params) {
  params.validate();
  if (!cloud.has_normals()) throw MissingNormals("descriptor computation requires normals");

  const std::size_t n = cloud.size();
  const int bins = params.bins_per_angle;
  const std::size_t dim = params.dim();
  const SpatialIndex3 index(cloud.points);

  std::vector<std::vector<std::size_t>> neighborhoods(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = index.radius_query(cloud.points[i], params.feature_radius);
    std::erase(nb, i);
    neighborhoods[i] = std::move(nb);
  }

  FeatureSet spfh(dim, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = neighborhoods[i];
    if (nb.empty()) continue;
    const double incr = 100.0 / static_cast<double>(nb.size());
    auto hist = spfh.row(i);
    for (auto j : nb) {
      PairFeature f;
      if (!compute_pair_feature(cloud.points[i], cloud.normals[i], cloud.points[j],
                                cloud.normals[j], f)) {
        continue;
      }
      hist[bin_of((f.alpha + std::numbers::pi) / (2.0 * std::numbers::pi), bins)] += incr;
      hist[bins + bin_of((f.phi + 1.0) * 0.5, bins)] += incr;
      hist[2 * bins + bin_of((f.theta + 1.0) * 0.5, bins)] += incr;
    }
  }

  FeatureSet fpfh(dim, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = fpfh.row(i);
    double sums[3] = {0.0, 0.0, 0.0};
    for (auto j : neighborhoods[i]) {
      const double d2 = (cloud.points[j] - cloud.points[i]).squaredNorm();
      if (d2 == 0.0) continue;
      const double w = 1.0 / d2;
      const auto h = spfh.row(j);
      for (std::size_t b = 0; b < dim; ++b) {
        const double val = h[b] * w;
        sums[b / static_cast<std::size_t>(bins)] += val;
        out[b] += val;
      }
    }
    for (std::size_t b = 0; b < dim; ++b) {
      const double s = sums[b / static_cast<std::size_t>(bins)];
      out[b] = s != 0.0 ? out[b] * (100.0 / s) : 0.0;
    }
  }
  return fpfh;
}

std::vector<IndexedMatch> global_feature_match_indices(const FeatureSet& fp, const FeatureSet& fq,
                                                       std::size_t max_pairs, std::uint64_t seed) {
  if (fp.dim != fq.dim) throw DimMismatch("source and target feature dimensions differ");
  std::vector<IndexedMatch> out;
  if (fp.size() == 0 || fq.size() == 0) return out;

  const FeatureIndex index(fq.values, fq.dim);
  const auto sources = sample_indices(fp.size(), max_pairs, seed);
  out.reserve(sources.size());
  for (auto i : sources) {
    const Neighbor nn = index.nearest(fp.row(i));
    out.push_back({i, nn.index, std::sqrt(nn.distance_sq)});
  }
  return out;
}

CorrespondenceSet global_feature_match(const FeatureSet& fp, const FeatureSet& fq,
                                       const PointCloud& cloud_p, const PointCloud& cloud_q,
                                       std::size_t max_pairs, std::uint64_t seed) {
  if (fp.dim != fq.dim) throw DimMismatch("source and target feature dimensions differ");
  if (fp.size() != cloud_p.size() || fq.size() != cloud_q.size()) {
    throw InvalidArgument("feature sets are not index-aligned with their clouds");
  }
  const auto matches = global_feature_match_indices(fp, fq, max_pairs, seed);

  std::vector<double> dists;
  dists.reserve(matches.size());
  for (const auto& m : matches) dists.push_back(m.feature_distance);
  const double bandwidth = median_bandwidth(dists);

  CorrespondenceSet out;
  out.reserve(matches.size());
  for (const auto& m : matches) {
    out.push_back({cloud_p.points[m.src], cloud_q.points[m.dst],
                   weight_from_distance(m.feature_distance, bandwidth), Provenance::kGeometric});
  }
  return out;
}

}  // namespace vigg
