#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "vigg/features.hpp"
#include "vigg/geometry.hpp"
#include "vigg/gvca.hpp"
#include "vigg/vgm.hpp"
#include "vigg/weighting.hpp"

namespace vigg {

struct PipelineConfig {
  double voxel_size = 0.025;
  double t_inlier = 0.10;
  double gamma_sq = 10.0;
  int iterations = 3;
  std::size_t max_source_points = 10'000;
  std::size_t c_geo_cap = 1'000;
  std::uint64_t seed = 0;
  /// 0 selects the self-tuning bandwidth (median feature distance).
  double weight_bandwidth = 0.0;
  std::size_t min_clique_size = 3;
  std::size_t max_cliques = 100'000;
  /// Score hypotheses over visual and geometric matches. Disabling this gives
  /// visual-only clique evaluation.
  bool use_guidance = true;
  /// Replaces the distribution-based zone radius (ablation).
  std::optional<double> fixed_radius;
  /// Fit over every visual match rather than the prior's pseudo-inliers.
  bool keep_all_visual = false;

  static constexpr int kMaxIterations = 10;

  /// voxel 0.025 m, t_inlier 0.10 m.
  static PipelineConfig indoor();
  /// voxel 0.30 m, t_inlier 0.60 m.
  static PipelineConfig outdoor();

  GvcaConfig gvca() const;
  VgmConfig vgm() const;
  void validate() const;
};

enum class RegistrationStatus { kOk, kFailedNoHypothesis, kFailedNoCorrespondences };

std::string_view to_string(RegistrationStatus s);

struct IterationRecord {
  RigidTransform transform;
  ErrorModel model;
  std::size_t correspondence_count = 0;
  std::size_t geometric_count = 0;
  std::size_t visual_count = 0;
};

struct StageTimings {
  double global_match_ms = 0.0;
  double gvca_ms = 0.0;
  double refine_ms = 0.0;
  double total_ms = 0.0;
};

struct RegistrationResult {
  RegistrationStatus status = RegistrationStatus::kOk;
  RigidTransform transform;
  RigidTransform prior;
  std::vector<IterationRecord> trace;
  std::size_t visual_count = 0;
  std::size_t guidance_count = 0;
  GvcaDiagnostics gvca;
  StageTimings timings;

  bool ok() const { return status == RegistrationStatus::kOk; }
};

/// One visual-guided matching plus weighted fit step from `prior`. Throws
/// NoCorrespondences, or DegenerateInput when the fit is degenerate.
IterationRecord refine_step(const VgmMatcher& matcher, std::span<const Correspondence> c_vis,
                            const RigidTransform& prior);

/// The stages of one registration, exposed separately so callers can record
/// the transform after every refinement step. Inputs are referenced and must
/// outlive the session.
class RegistrationSession {
 public:
  RegistrationSession(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
                      const FeatureSet& fq, const CorrespondenceSet& c_vis, PipelineConfig cfg);

  /// Global feature matches used to guide hypothesis scoring (empty when
  /// guidance is disabled).
  const CorrespondenceSet& guidance() const { return c_geo_; }
  const CorrespondenceSet& visual() const { return c_vis_; }
  const PipelineConfig& config() const { return cfg_; }
  const VgmMatcher& matcher() const { return matcher_; }

  /// Throws NoValidHypothesis.
  GvcaResult estimate_prior() const;
  /// refine_step with this session's matcher and visual matches.
  IterationRecord refine_iteration(const RigidTransform& prior) const;

 private:
  const CorrespondenceSet& c_vis_;
  PipelineConfig cfg_;
  CorrespondenceSet c_geo_;
  VgmMatcher matcher_;
  double global_match_ms_ = 0.0;

  friend RegistrationResult register_pair(const PointCloud&, const PointCloud&, const FeatureSet&,
                                          const FeatureSet&, const CorrespondenceSet&,
                                          const PipelineConfig&);
};

/// Clique-based prior followed by cfg.iterations refinement steps. Failures
/// are reported through the status, never thrown.
RegistrationResult register_pair(const PointCloud& p, const PointCloud& q, const FeatureSet& fp,
                                 const FeatureSet& fq, const CorrespondenceSet& c_vis,
                                 const PipelineConfig& cfg);

}  // namespace vigg
