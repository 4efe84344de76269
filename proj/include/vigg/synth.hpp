#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigg/features.hpp"
#include "vigg/geometry.hpp"
#include "vigg/pipeline.hpp"

namespace vigg {

/// A coherent block of false visual matches, all consistent with the wrong
/// transform offset * truth.
struct AmbiguityCluster {
  std::size_t size = 6;
  RigidTransform offset = RigidTransform::from_axis_angle(Point3::UnitZ(), 0.5, Point3(0.4, -0.3, 0.1));
};

struct SceneSpec {
  std::size_t point_count = 5000;
  double extent = 2.0;  // room side length, meters
  double overlap_fraction = 0.7;
  std::size_t visual_match_count = 150;
  double visual_inlier_ratio = 0.7;
  double match_noise_sigma = 0.0;  // per-axis, meters, added to lifted targets
  std::optional<AmbiguityCluster> ambiguity_cluster;
  double feature_noise_sigma = 0.0;  // per descriptor component
  double point_jitter_sigma = 0.0;   // per-axis resolution jitter of Q, meters
  double surface_roughness = 0.01;   // per-point offset along the surface normal, meters
  double relief_amplitude = 0.02;    // RMS of the smooth surface relief, meters
  DescriptorParams descriptor{0.08, 0.16, 11};
  std::uint64_t seed = 0;

  /// Throws InvalidArgument.
  void validate() const;
  /// All noise terms zero, all matches inliers.
  static SceneSpec noiseless();
  /// Noisy indoor-like scene used by the benchmark suites.
  static SceneSpec standard();
};

struct Scene {
  SceneSpec spec;
  PointCloud p, q;
  FeatureSet fp, fq;
  CorrespondenceSet c_vis;
  std::vector<bool> visual_inlier;  // aligned with c_vis
  /// Q index of each P point's counterpart, or -1 outside the overlap.
  std::vector<std::ptrdiff_t> counterpart;
  RigidTransform truth;
};

/// Deterministic in spec.seed.
Scene generate_scene(const SceneSpec& spec);

/// Ground-truth inlier fraction of a correspondence set.
double inlier_ratio(std::span<const Correspondence> c, const RigidTransform& truth, double t_inlier);

/// Small visual-only scenario with a competing false clique, for exercising
/// hypothesis evaluation without full clouds.
struct AmbiguitySpec {
  std::size_t true_inliers = 4;
  std::size_t false_cluster = 6;
  std::size_t geo_count = 100;
  double geo_inlier_ratio = 0.4;
  double match_noise_sigma = 0.005;
  double extent = 2.0;
  std::uint64_t seed = 0;
};

struct AmbiguityScenario {
  CorrespondenceSet c_vis;
  std::vector<bool> visual_inlier;
  CorrespondenceSet c_geo;
  RigidTransform truth;
  RigidTransform wrong;
};

AmbiguityScenario generate_ambiguity_scenario(const AmbiguitySpec& spec);

struct EvalThresholds {
  std::vector<double> rotation_deg{2.0, 5.0, 10.0};
  std::vector<double> translation_m{0.05, 0.10, 0.25};
  double rr_rotation_deg = 15.0;
  double rr_translation_m = 0.30;

  static EvalThresholds indoor() { return {}; }
  static EvalThresholds outdoor() { return {{0.25, 0.5, 1.0}, {0.075, 0.15, 0.30}, 5.0, 0.60}; }
  /// Throws InvalidArgument unless both threshold lists strictly increase.
  void validate() const;
};

struct PairOutcome {
  RegistrationStatus status = RegistrationStatus::kOk;
  double re_deg = 0.0;
  double te_m = 0.0;
};

/// Failed pairs carry RE = 180 and TE = +inf.
PairOutcome evaluate(const RegistrationResult& r, const RigidTransform& truth);

inline constexpr double kFailedRotationDeg = 180.0;

struct MetricsReport {
  std::vector<PairOutcome> pairs;
  std::vector<double> rotation_acc;     // aligned with thresholds.rotation_deg
  std::vector<double> translation_acc;  // aligned with thresholds.translation_m
  double recall = 0.0;
  double median_re_deg = 0.0;
  double median_te_m = 0.0;
  std::size_t failed = 0;
};

/// Threshold-inclusive accuracy and recall; medians over all pairs with failed
/// pairs entering as sentinels. Throws EmptyInput on no pairs.
MetricsReport compute_metrics(std::span<const PairOutcome> pairs, const EvalThresholds& thresholds);

double median(std::vector<double> values);

enum class AblationSuite { kIterations, kGuidance, kNoise, kGammaSweep, kZoneFixedVsDynamic };

std::string_view to_string(AblationSuite s);
/// Throws InvalidArgument on an unknown name.
AblationSuite parse_suite(std::string_view name);

struct AblationRow {
  std::string cell;
  std::uint64_t seed = 0;
  PairOutcome outcome;
  PairOutcome prior;  // clique-alignment stage alone
};

struct AblationCell {
  std::string name;
  MetricsReport metrics;
  MetricsReport prior_metrics;
};

struct AblationTable {
  AblationSuite suite = AblationSuite::kIterations;
  std::vector<AblationRow> rows;    // ordered by seed, then cell
  std::vector<AblationCell> cells;  // in suite order
};

/// Runs every cell of the suite on scenes seeded base.seed, base.seed + 1, ...
/// Scenes run on `workers` threads; the result does not depend on the count.
AblationTable run_ablation(AblationSuite suite, const SceneSpec& base, const PipelineConfig& cfg,
                           std::size_t seeds, const EvalThresholds& thresholds = {},
                           std::size_t workers = 1);

/// One CSV row per (seed, cell).
std::string ablation_csv(const AblationTable& table);

}  // namespace vigg
