#include "vigg/gvca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vigg {

void GvcaConfig::validate() const {
  if (!(inlier_threshold > 0.0) || !(compat_threshold > 0.0)) {
    throw InvalidArgument("GVCA thresholds must be positive");
  }
  if (min_clique_size < 3) throw InvalidArgument("minimum clique size must be at least 3");
  if (max_cliques == 0) throw InvalidArgument("max_cliques must be positive");
}

std::optional<Hypothesis> hypothesis_from_clique(const Clique& clique,
                                                 const CorrespondenceSet& c_vis) {
  if (clique.size() < 3) return std::nullopt;
  CorrespondenceSet members;
  members.reserve(clique.size());
  for (auto i : clique) {
    Correspondence c = c_vis[i];
    c.weight = 1.0;
    members.push_back(c);
  }
  auto fit = try_fit_weighted(members);
  if (!fit) return std::nullopt;
  return Hypothesis{*fit, clique, 0.0};
}

double score_hypothesis(const RigidTransform& t, std::span<const Correspondence> eval_set,
                        double t_inlier) {
  double total = 0.0;
  for (const auto& c : eval_set) {
    total += std::max(0.0, t_inlier - (t.apply(c.src) - c.dst).norm());
  }
  return total;
}

ScoringSet::ScoringSet(std::span<const Correspondence> set) { append(set); }

void ScoringSet::append(std::span<const Correspondence> set) {
  for (const auto& c : set) {
    sx_.push_back(c.src.x());
    sy_.push_back(c.src.y());
    sz_.push_back(c.src.z());
    dx_.push_back(c.dst.x());
    dy_.push_back(c.dst.y());
    dz_.push_back(c.dst.z());
  }
}

double ScoringSet::score(const RigidTransform& t, double t_inlier) const {
  const Matrix3& r = t.rotation();
  const Point3& tr = t.translation();
  const double r00 = r(0, 0), r01 = r(0, 1), r02 = r(0, 2);
  const double r10 = r(1, 0), r11 = r(1, 1), r12 = r(1, 2);
  const double r20 = r(2, 0), r21 = r(2, 1), r22 = r(2, 2);
  const double t0 = tr.x(), t1 = tr.y(), t2 = tr.z();
  const std::size_t n = sx_.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ex = r00 * sx_[i] + r01 * sy_[i] + r02 * sz_[i] + t0 - dx_[i];
    const double ey = r10 * sx_[i] + r11 * sy_[i] + r12 * sz_[i] + t1 - dy_[i];
    const double ez = r20 * sx_[i] + r21 * sy_[i] + r22 * sz_[i] + t2 - dz_[i];
    const double g = t_inlier - std::sqrt(ex * ex + ey * ey + ez * ez);
    total += g > 0.0 ? g : 0.0;
  }
  return total;
}

GvcaResult gvca_estimate(const CorrespondenceSet& c_vis, const CorrespondenceSet& c_geo,
                         const GvcaConfig& cfg) {
  cfg.validate();
  if (c_vis.size() < 3) {
    throw NoValidHypothesis("clique alignment needs at least 3 visual matches");
  }

  const CompatGraph graph = build_graph(c_vis, cfg.compat_threshold);
  const CliqueEnumeration cliques =
      enumerate_maximal_cliques(graph, cfg.min_clique_size, cfg.max_cliques);

  ScoringSet eval(c_vis);
  eval.append(c_geo);

  GvcaDiagnostics diag;
  diag.clique_count = cliques.cliques.size();
  diag.truncated = cliques.truncated;

  std::optional<Hypothesis> best;
  double runner_up = -std::numeric_limits<double>::infinity();
  for (const auto& clique : cliques.cliques) {
    auto h = hypothesis_from_clique(clique, c_vis);
    if (!h) continue;
    ++diag.hypothesis_count;
    h->score = eval.score(h->transform, cfg.inlier_threshold);
    // Cliques arrive in canonical order, so a strict comparison implements
    // the tie rule.
    if (!best || h->score > best->score) {
      if (best) runner_up = std::max(runner_up, best->score);
      best = std::move(h);
    } else {
      runner_up = std::max(runner_up, h->score);
    }
  }
  if (!best) throw NoValidHypothesis("no clique produced a non-degenerate transform");

  diag.best_score = best->score;
  diag.runner_up_score = std::isfinite(runner_up) ? runner_up : 0.0;
  diag.winning_clique_size = best->source_clique.size();
  diag.winning_clique = best->source_clique;
  return {best->transform, std::move(diag)};
}

}  // namespace vigg
