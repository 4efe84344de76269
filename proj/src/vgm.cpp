#include "vigg/vgm.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

#include "vigg/random.hpp"
#include "vigg/weighting.hpp"

namespace vigg {

double ErrorModel::radius() const { return std::sqrt(radius_sq); }

double ErrorModel::confidence() const { return chi_square_confidence(gamma_sq); }

void VgmConfig::validate() const {
  if (!(t_inlier > 0.0)) throw InvalidArgument("t_inlier must be positive");
  if (!(gamma_sq > 0.0)) throw InvalidArgument("gamma_sq must be positive");
  if (!(sigma_floor > 0.0)) throw InvalidArgument("sigma_floor must be positive");
  if (max_source_points == 0) throw InvalidArgument("max_source_points must be positive");
  if (fixed_radius && !(*fixed_radius > 0.0)) throw InvalidArgument("fixed radius must be positive");
  if (weight_bandwidth < 0.0) throw InvalidArgument("weight bandwidth must be nonnegative");
}

CorrespondenceSet select_pseudo_inliers(std::span<const Correspondence> c_vis,
                                        const RigidTransform& t_pri, double t_inlier) {
  if (!(t_inlier > 0.0)) throw InvalidArgument("t_inlier must be positive");
  CorrespondenceSet out;
  for (const auto& c : c_vis) {
    if ((t_pri.apply(c.src) - c.dst).norm() <= t_inlier) out.push_back(c);
  }
  return out;
}

ErrorModel estimate_sigma(std::span<const Correspondence> c_in, const RigidTransform& t_pri,
                          const VgmConfig& cfg) {
  ErrorModel m;
  m.gamma_sq = cfg.gamma_sq;
  m.inlier_count = c_in.size();
  if (c_in.size() < cfg.min_inliers) {
    m.fallback = true;
    m.sigma_sq = cfg.t_inlier * cfg.t_inlier / cfg.gamma_sq;
  } else {
    double sum = 0.0;
    for (const auto& c : c_in) sum += (t_pri.apply(c.src) - c.dst).squaredNorm();
    m.sigma_sq = sum / (3.0 * static_cast<double>(c_in.size()));
  }
  m.sigma_sq = std::max(m.sigma_sq, cfg.sigma_floor);
  m.radius_sq = m.sigma_sq * m.gamma_sq;
  return m;
}

double chi_square_confidence(double gamma_sq) {
  if (!(gamma_sq > 0.0)) throw InvalidArgument("gamma_sq must be positive");
  return boost::math::gamma_p(1.5, gamma_sq / 2.0);
}

std::vector<SearchZone> build_search_zones(std::span<const std::size_t> sample,
                                           const PointCloud& p, const RigidTransform& t_pri,
                                           const SpatialIndex3& q_index, const ErrorModel& model) {
  if (!(model.radius_sq > 0.0)) throw InvalidArgument("search zone radius must be positive");
  std::vector<SearchZone> zones;
  zones.reserve(sample.size());
  for (auto i : sample) {
    zones.push_back({i, q_index.radius_query_sq(t_pri.apply(p.points[i]), model.radius_sq)});
  }
  return zones;
}

std::vector<LocalMatch> local_feature_match_indices(std::span<const SearchZone> zones,
                                                    const FeatureSet& fp, const FeatureSet& fq) {
  if (fp.dim != fq.dim) throw DimMismatch("source and target feature dimensions differ");
  std::vector<LocalMatch> out;
  out.reserve(zones.size());
  for (const auto& zone : zones) {
    if (zone.candidates.empty()) continue;
    const auto f = fp.row(zone.source);
    std::size_t best = zone.candidates.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (auto j : zone.candidates) {
      const double d = squared_distance(f, fq.row(j));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.push_back({zone.source, best, std::sqrt(best_d)});
  }
  return out;
}

CorrespondenceSet local_feature_match(std::span<const SearchZone> zones, const PointCloud& p,
                                      const PointCloud& q, const FeatureSet& fp,
                                      const FeatureSet& fq, double bandwidth) {
  const auto matches = local_feature_match_indices(zones, fp, fq);
  if (bandwidth <= 0.0) {
    std::vector<double> dists;
    dists.reserve(matches.size());
    for (const auto& m : matches) dists.push_back(m.feature_distance);
    bandwidth = median_bandwidth(std::move(dists));
  }
  CorrespondenceSet out;
  out.reserve(matches.size());
  for (const auto& m : matches) {
    out.push_back({p.points[m.src], q.points[m.dst],
                   weight_from_distance(m.feature_distance, bandwidth), Provenance::kGeometric});
  }
  return out;
}

VgmMatcher::VgmMatcher(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
                       const FeatureSet& fq, VgmConfig cfg, std::uint64_t seed)
    : p_(p), q_(q), fp_(fp), fq_(fq), cfg_(std::move(cfg)), q_index_(q.points) {
  cfg_.validate();
  if (fp.dim != fq.dim) throw DimMismatch("source and target feature dimensions differ");
  if (fp.size() != p.size() || fq.size() != q.size()) {
    throw InvalidArgument("feature sets are not index-aligned with their clouds");
  }
  sample_ = sample_indices(p.size(), cfg_.max_source_points, seed);
}

VgmOutput VgmMatcher::extract(std::span<const Correspondence> c_vis,
                              const RigidTransform& t_pri) const {
  VgmOutput out;
  const auto c_in = select_pseudo_inliers(c_vis, t_pri, cfg_.t_inlier);
  out.model = estimate_sigma(c_in, t_pri, cfg_);
  ErrorModel zone_model = out.model;
  if (cfg_.fixed_radius) zone_model.radius_sq = *cfg_.fixed_radius * *cfg_.fixed_radius;

  const auto zones = build_search_zones(sample_, p_, t_pri, q_index_, zone_model);
  out.correspondences = local_feature_match(zones, p_, q_, fp_, fq_, cfg_.weight_bandwidth);
  out.geometric_count = out.correspondences.size();
  if (cfg_.keep_all_visual) {
    out.correspondences.insert(out.correspondences.end(), c_vis.begin(), c_vis.end());
    out.visual_count = c_vis.size();
  } else {
    out.correspondences.insert(out.correspondences.end(), c_in.begin(), c_in.end());
    out.visual_count = c_in.size();
  }
  if (out.correspondences.empty()) {
    throw NoCorrespondences("visual-guided matching produced no correspondences");
  }
  return out;
}

VgmOutput vgm_extract(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
                      const FeatureSet& fq, std::span<const Correspondence> c_vis,
                      const RigidTransform& t_pri, const VgmConfig& cfg, std::uint64_t seed) {
  return VgmMatcher(p, q, fp, fq, cfg, seed).extract(c_vis, t_pri);
}

}  // namespace vigg
