#include "vigg/pipeline.hpp"

#include <chrono>
#include <string>

namespace vigg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

PipelineConfig PipelineConfig::indoor() {
  PipelineConfig cfg;
  cfg.voxel_size = 0.025;
  cfg.t_inlier = 0.10;
  return cfg;
}

PipelineConfig PipelineConfig::outdoor() {
  PipelineConfig cfg;
  cfg.voxel_size = 0.30;
  cfg.t_inlier = 0.60;
  return cfg;
}

GvcaConfig PipelineConfig::gvca() const {
  GvcaConfig g;
  g.inlier_threshold = t_inlier;
  g.compat_threshold = t_inlier;
  g.min_clique_size = min_clique_size;
  g.max_cliques = max_cliques;
  return g;
}

VgmConfig PipelineConfig::vgm() const {
  VgmConfig v;
  v.t_inlier = t_inlier;
  v.gamma_sq = gamma_sq;
  v.sigma_floor = VgmConfig::floor_for_voxel(voxel_size);
  v.max_source_points = max_source_points;
  v.fixed_radius = fixed_radius;
  v.weight_bandwidth = weight_bandwidth;
  v.keep_all_visual = keep_all_visual;
  return v;
}

void PipelineConfig::validate() const {
  if (!(voxel_size > 0.0)) throw InvalidArgument("voxel_size must be positive");
  if (iterations < 0 || iterations > kMaxIterations) {
    throw InvalidArgument("iterations must be within [0, " + std::to_string(kMaxIterations) + "]");
  }
  if (c_geo_cap == 0) throw InvalidArgument("c_geo_cap must be positive");
  gvca().validate();
  vgm().validate();
}

std::string_view to_string(RegistrationStatus s) {
  switch (s) {
    case RegistrationStatus::kOk:
      return "ok";
    case RegistrationStatus::kFailedNoHypothesis:
      return "failed_no_hypothesis";
    case RegistrationStatus::kFailedNoCorrespondences:
      return "failed_no_correspondences";
  }
  return "unknown";
}

RegistrationSession::RegistrationSession(const PointCloud& p, const PointCloud& q,
                                         const FeatureSet& fp, const FeatureSet& fq,
                                         const CorrespondenceSet& c_vis, PipelineConfig cfg)
    : c_vis_(c_vis), cfg_(std::move(cfg)), matcher_(p, q, fp, fq, cfg_.vgm(), cfg_.seed) {
  cfg_.validate();
  if (cfg_.use_guidance) {
    const auto start = Clock::now();
    c_geo_ = global_feature_match(fp, fq, p, q, cfg_.c_geo_cap, cfg_.seed);
    global_match_ms_ = ms_since(start);
  }
}

GvcaResult RegistrationSession::estimate_prior() const {
  return gvca_estimate(c_vis_, c_geo_, cfg_.gvca());
}

IterationRecord refine_step(const VgmMatcher& matcher, std::span<const Correspondence> c_vis,
                            const RigidTransform& prior) {
  VgmOutput vgm = matcher.extract(c_vis, prior);
  IterationRecord rec{fit_weighted(vgm.correspondences), vgm.model};
  rec.correspondence_count = vgm.correspondences.size();
  rec.geometric_count = vgm.geometric_count;
  rec.visual_count = vgm.visual_count;
  return rec;
}

IterationRecord RegistrationSession::refine_iteration(const RigidTransform& prior) const {
  return refine_step(matcher_, c_vis_, prior);
}

RegistrationResult register_pair(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
                                 const FeatureSet& fq, const CorrespondenceSet& c_vis,
                                 const PipelineConfig& cfg) {
  const auto start = Clock::now();
  RegistrationResult result;
  result.visual_count = c_vis.size();
  if (c_vis.size() < 3) {
    cfg.validate();
    result.status = RegistrationStatus::kFailedNoHypothesis;
    result.timings.total_ms = ms_since(start);
    return result;
  }

  const RegistrationSession session(p, q, fp, fq, c_vis, cfg);
  result.guidance_count = session.guidance().size();
  result.timings.global_match_ms = session.global_match_ms_;

  auto stage = Clock::now();
  try {
    GvcaResult prior = session.estimate_prior();
    result.prior = prior.prior;
    result.transform = prior.prior;
    result.gvca = std::move(prior.diagnostics);
  } catch (const NoValidHypothesis&) {
    result.status = RegistrationStatus::kFailedNoHypothesis;
    result.timings.gvca_ms = ms_since(stage);
    result.timings.total_ms = ms_since(start);
    return result;
  }
  result.timings.gvca_ms = ms_since(stage);

  stage = Clock::now();
  for (int k = 0; k < cfg.iterations; ++k) {
    try {
      IterationRecord rec = session.refine_iteration(result.transform);
      result.transform = rec.transform;
      result.trace.push_back(std::move(rec));
    } catch (const NoCorrespondences&) {
      result.status = RegistrationStatus::kFailedNoCorrespondences;
      break;
    } catch (const DegenerateInput&) {
      result.status = RegistrationStatus::kFailedNoCorrespondences;
      break;
    }
  }
  result.timings.refine_ms = ms_since(stage);
  result.timings.total_ms = ms_since(start);
  return result;
}

}  // namespace vigg
