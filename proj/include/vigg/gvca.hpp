#pragma once

#include <optional>
#include <span>

#include "vigg/compat_graph.hpp"
#include "vigg/geometry.hpp"

namespace vigg {

struct GvcaConfig {
  double inlier_threshold = 0.10;  // t_inlier, meters
  double compat_threshold = 0.10;  // graph edge threshold, meters
  std::size_t min_clique_size = 3;
  std::size_t max_cliques = 100'000;

  void validate() const;
};

struct Hypothesis {
  RigidTransform transform;
  Clique source_clique;
  double score = 0.0;
};

struct GvcaDiagnostics {
  std::size_t clique_count = 0;
  std::size_t hypothesis_count = 0;  // non-degenerate cliques
  bool truncated = false;
  double best_score = 0.0;
  double runner_up_score = 0.0;
  std::size_t winning_clique_size = 0;
  Clique winning_clique;
};

struct GvcaResult {
  RigidTransform prior;
  GvcaDiagnostics diagnostics;
};

/// Uniform-weight rigid fit to the clique members. Empty for collinear or
/// otherwise degenerate cliques. The returned score is 0.
std::optional<Hypothesis> hypothesis_from_clique(const Clique& clique,
                                                 const CorrespondenceSet& c_vis);

/// Sum over the set of max(0, t_inlier - |T(src) - dst|).
double score_hypothesis(const RigidTransform& t, std::span<const Correspondence> eval_set,
                        double t_inlier);

/// Structure-of-arrays copy of an evaluation set for repeated scoring.
class ScoringSet {
 public:
  explicit ScoringSet(std::span<const Correspondence> set);
  void append(std::span<const Correspondence> set);
  std::size_t size() const { return sx_.size(); }
  double score(const RigidTransform& t, double t_inlier) const;

 private:
  std::vector<double> sx_, sy_, sz_, dx_, dy_, dz_;
};

/// Cliques are searched on the visual matches only; every hypothesis is scored
/// over c_vis followed by c_geo. Equal scores go to the larger clique, then the
/// lexicographically smaller one. Throws NoValidHypothesis when no clique
/// yields a non-degenerate fit.
GvcaResult gvca_estimate(const CorrespondenceSet& c_vis, const CorrespondenceSet& c_geo,
                         const GvcaConfig& cfg);

}  // namespace vigg
