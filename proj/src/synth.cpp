#include "vigg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "vigg/spatial_index.hpp"

namespace vigg {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

Point3 gauss3(Rng& rng) {
  const double x = gauss(rng);
  const double y = gauss(rng);
  const double z = gauss(rng);
  return {x, y, z};
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Point3 random_unit(Rng& rng) {
  for (;;) {
    const Point3 v = gauss3(rng);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

RigidTransform random_transform(Rng& rng, double extent) {
  const Point3 axis = random_unit(rng);
  const double angle = uniform(rng, 0.0, std::numbers::pi);
  Point3 t;
  for (int k = 0; k < 3; ++k) t[k] = uniform(rng, -extent, extent);
  return RigidTransform::from_axis_angle(axis, angle, t);
}

struct Ellipsoid {
  Point3 center;
  Point3 axes;
};

struct Surface {
  enum Kind { kFloor, kWallX0, kWallY0, kWallX1, kBlob } kind;
  double area;
  std::size_t blob = 0;
};

// Room shell (floor plus three walls) with ellipsoidal clutter resting on the
// floor. Points are offset along the surface normal by the roughness term.
std::vector<Point3> room_points(std::size_t count, const SceneSpec& spec, Rng& rng) {
  const double e = spec.extent;
  const double h = 0.6 * e;
  std::vector<Ellipsoid> blobs(6);
  for (auto& b : blobs) {
    for (int k = 0; k < 3; ++k) b.axes[k] = uniform(rng, 0.05 * e, 0.12 * e);
    b.center = {uniform(rng, 0.2 * e, 0.8 * e), uniform(rng, 0.2 * e, 0.8 * e), 0.5 * b.axes[2]};
  }

  std::vector<Surface> surfaces{{Surface::kFloor, e * e},
                                {Surface::kWallX0, e * h},
                                {Surface::kWallY0, e * h},
                                {Surface::kWallX1, e * h}};
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    const auto& a = blobs[i].axes;
    const double p = 1.6;
    const double s = std::pow((std::pow(a[0] * a[1], p) + std::pow(a[0] * a[2], p) +
                               std::pow(a[1] * a[2], p)) / 3.0, 1.0 / p);
    surfaces.push_back({Surface::kBlob, 4.0 * std::numbers::pi * s, i});
  }
  // Smooth relief shared by all surfaces: a sum of plane waves over position.
  struct Wave {
    Point3 k;
    double phase;
  };
  std::vector<Wave> waves(8);
  for (auto& w : waves) {
    const double wavelength = uniform(rng, 0.15, 0.5) * e / 2.0;
    w.k = random_unit(rng) * (2.0 * std::numbers::pi / wavelength);
    w.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  }
  auto relief = [&](const Point3& x) {
    double r = 0.0;
    for (const auto& w : waves) r += std::sin(w.k.dot(x) + w.phase);
    return spec.relief_amplitude * r / std::sqrt(static_cast<double>(waves.size()));
  };

  std::vector<double> areas;
  for (const auto& s : surfaces) areas.push_back(s.area);
  std::discrete_distribution<std::size_t> which(areas.begin(), areas.end());

  std::vector<Point3> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto& s = surfaces[which(rng)];
    Point3 x, n;
    switch (s.kind) {
      case Surface::kFloor:
        x = {uniform(rng, 0.0, e), uniform(rng, 0.0, e), 0.0};
        n = Point3::UnitZ();
        break;
      case Surface::kWallX0:
        x = {0.0, uniform(rng, 0.0, e), uniform(rng, 0.0, h)};
        n = Point3::UnitX();
        break;
      case Surface::kWallY0:
        x = {uniform(rng, 0.0, e), 0.0, uniform(rng, 0.0, h)};
        n = Point3::UnitY();
        break;
      case Surface::kWallX1:
        x = {e, uniform(rng, 0.0, e), uniform(rng, 0.0, h)};
        n = -Point3::UnitX();
        break;
      case Surface::kBlob: {
        const auto& b = blobs[s.blob];
        const Point3 d = random_unit(rng);
        x = b.center + b.axes.cwiseProduct(d);
        if (x.z() < 0.0) continue;
        n = d.cwiseQuotient(b.axes).normalized();
        break;
      }
    }
    out.push_back(x + (relief(x) + spec.surface_roughness * gauss(rng)) * n);
  }
  return out;
}

FeatureSet noisy_descriptor(const PointCloud& cloud, const SceneSpec& spec, Rng& rng) {
  FeatureSet f = compute_descriptor(estimate_normals(cloud, spec.descriptor.normal_radius),
                                    spec.descriptor);
  if (spec.feature_noise_sigma > 0.0) {
    for (auto& v : f.values) v += spec.feature_noise_sigma * gauss(rng);
  }
  return f;
}

}  // namespace

void SceneSpec::validate() const {
  if (point_count == 0) throw InvalidArgument("point_count must be positive");
  if (visual_match_count == 0) throw InvalidArgument("visual_match_count must be positive");
  if (!(extent > 0.0)) throw InvalidArgument("extent must be positive");
  if (!(overlap_fraction > 0.0 && overlap_fraction <= 1.0)) {
    throw InvalidArgument("overlap_fraction must be in (0, 1]");
  }
  if (!(visual_inlier_ratio >= 0.0 && visual_inlier_ratio <= 1.0)) {
    throw InvalidArgument("visual_inlier_ratio must be in [0, 1]");
  }
  if (!(match_noise_sigma >= 0.0) || !(feature_noise_sigma >= 0.0) ||
      !(point_jitter_sigma >= 0.0) || !(surface_roughness >= 0.0) ||
      !(relief_amplitude >= 0.0)) {
    throw InvalidArgument("noise terms must be nonnegative");
  }
  const auto inliers = static_cast<std::size_t>(
      std::llround(visual_inlier_ratio * static_cast<double>(visual_match_count)));
  if (inliers > static_cast<std::size_t>(
                    std::llround(overlap_fraction * static_cast<double>(point_count)))) {
    throw InvalidArgument("more visual inliers than overlapping points");
  }
  if (ambiguity_cluster) {
    if (ambiguity_cluster->size == 0) throw InvalidArgument("ambiguity cluster must be nonempty");
    if (ambiguity_cluster->size > visual_match_count - inliers) {
      throw InvalidArgument("ambiguity cluster exceeds the outlier budget");
    }
    if (ambiguity_cluster->size > point_count) {
      throw InvalidArgument("ambiguity cluster exceeds the point count");
    }
  }
  descriptor.validate();
}

SceneSpec SceneSpec::noiseless() {
  SceneSpec s;
  s.overlap_fraction = 1.0;
  s.visual_inlier_ratio = 1.0;
  return s;
}

SceneSpec SceneSpec::standard() {
  SceneSpec s;
  s.match_noise_sigma = 0.025;
  s.point_jitter_sigma = 0.002;
  s.feature_noise_sigma = 0.5;
  return s;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Scene scene;
  scene.spec = spec;

  const std::size_t n = spec.point_count;
  const auto shared = static_cast<std::size_t>(
      std::llround(spec.overlap_fraction * static_cast<double>(n)));
  const std::size_t world_count = 2 * n - shared;
  auto world = room_points(world_count, spec, rng);

  // Split along a random horizontal direction: P takes the first n points, Q
  // the last n, and the middle `shared` points belong to both.
  const double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const Point3 dir(std::cos(heading), std::sin(heading), 0.0);
  std::vector<std::size_t> order(world_count);
  for (std::size_t i = 0; i < world_count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return world[a].dot(dir) < world[b].dot(dir);
  });
  std::vector<std::size_t> p_world(order.begin(), order.begin() + n);
  std::vector<std::size_t> q_world(order.end() - n, order.end());
  shuffle(p_world, rng);
  shuffle(q_world, rng);

  scene.truth = random_transform(rng, spec.extent);
  std::vector<std::ptrdiff_t> world_to_q(world_count, -1);
  scene.q.points.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    world_to_q[q_world[j]] = static_cast<std::ptrdiff_t>(j);
    const Point3 jitter = gauss3(rng);
    scene.q.points.push_back(scene.truth.apply(world[q_world[j]] + spec.point_jitter_sigma * jitter));
  }
  scene.p.points.reserve(n);
  scene.counterpart.resize(n);
  std::vector<std::size_t> shared_p;
  for (std::size_t i = 0; i < n; ++i) {
    scene.p.points.push_back(world[p_world[i]]);
    scene.counterpart[i] = world_to_q[p_world[i]];
    if (scene.counterpart[i] >= 0) shared_p.push_back(i);
  }

  // Visual matches: inliers on distinct shared points, then the optional
  // coherent false cluster, then uniform outliers.
  const std::size_t m = spec.visual_match_count;
  const auto n_in = static_cast<std::size_t>(
      std::llround(spec.visual_inlier_ratio * static_cast<double>(m)));
  std::vector<std::pair<Correspondence, bool>> matches;
  matches.reserve(m);
  shuffle(shared_p, rng);
  for (std::size_t k = 0; k < n_in; ++k) {
    const std::size_t i = shared_p[k];
    const Point3 noise = gauss3(rng);
    Correspondence c{scene.p.points[i],
                     scene.q.points[static_cast<std::size_t>(scene.counterpart[i])] +
                         spec.match_noise_sigma * noise,
                     uniform(rng, 0.3, 1.0), Provenance::kVisual};
    matches.emplace_back(c, true);
  }
  if (spec.ambiguity_cluster) {
    const RigidTransform wrong = spec.ambiguity_cluster->offset * scene.truth;
    const SpatialIndex3 p_index(scene.p.points);
    const std::size_t seed_point = pick(rng, n);
    for (const auto& nb : p_index.knn_query(scene.p.points[seed_point], spec.ambiguity_cluster->size)) {
      const Point3& x = scene.p.points[nb.index];
      const Point3 noise = gauss3(rng);
      Correspondence c{x, wrong.apply(x) + spec.match_noise_sigma * noise, uniform(rng, 0.3, 1.0),
                       Provenance::kVisual};
      matches.emplace_back(c, false);
    }
  }
  while (matches.size() < m) {
    const std::size_t i = pick(rng, n);
    const std::size_t j = pick(rng, n);
    Correspondence c{scene.p.points[i], scene.q.points[j], uniform(rng, 0.3, 1.0),
                     Provenance::kVisual};
    matches.emplace_back(c, false);
  }
  shuffle(matches, rng);
  for (auto& [c, inlier] : matches) {
    scene.c_vis.push_back(c);
    scene.visual_inlier.push_back(inlier);
  }

  scene.fp = noisy_descriptor(scene.p, spec, rng);
  scene.fq = noisy_descriptor(scene.q, spec, rng);
  return scene;
}

double inlier_ratio(std::span<const Correspondence> c, const RigidTransform& truth, double t_inlier) {
  if (c.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& x : c) {
    if ((truth.apply(x.src) - x.dst).norm() <= t_inlier) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(c.size());
}

AmbiguityScenario generate_ambiguity_scenario(const AmbiguitySpec& spec) {
  if (!(spec.extent > 0.0)) throw InvalidArgument("extent must be positive");
  if (!(spec.geo_inlier_ratio >= 0.0 && spec.geo_inlier_ratio <= 1.0)) {
    throw InvalidArgument("geo_inlier_ratio must be in [0, 1]");
  }
  Rng rng(spec.seed);
  AmbiguityScenario s;
  s.truth = random_transform(rng, spec.extent);
  s.wrong = AmbiguityCluster{}.offset * s.truth;
  auto box_point = [&] {
    Point3 x;
    for (int k = 0; k < 3; ++k) x[k] = uniform(rng, 0.0, spec.extent);
    return x;
  };

  std::vector<std::pair<Correspondence, bool>> vis;
  for (std::size_t k = 0; k < spec.true_inliers + spec.false_cluster; ++k) {
    const bool inlier = k < spec.true_inliers;
    const Point3 x = box_point();
    const Point3 noise = gauss3(rng);
    const Point3 y = (inlier ? s.truth : s.wrong).apply(x) + spec.match_noise_sigma * noise;
    vis.emplace_back(Correspondence{x, y, uniform(rng, 0.3, 1.0), Provenance::kVisual}, inlier);
  }
  shuffle(vis, rng);
  for (auto& [c, inlier] : vis) {
    s.c_vis.push_back(c);
    s.visual_inlier.push_back(inlier);
  }

  const auto geo_in = static_cast<std::size_t>(
      std::llround(spec.geo_inlier_ratio * static_cast<double>(spec.geo_count)));
  for (std::size_t k = 0; k < spec.geo_count; ++k) {
    const Point3 x = box_point();
    Point3 y;
    if (k < geo_in) {
      y = s.truth.apply(x) + spec.match_noise_sigma * gauss3(rng);
    } else {
      y = s.truth.apply(box_point());
    }
    s.c_geo.push_back({x, y, 1.0, Provenance::kGeometric});
  }
  shuffle(s.c_geo, rng);
  return s;
}

void EvalThresholds::validate() const {
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) return false;
    }
    return true;
  };
  if (!increasing(rotation_deg) || !increasing(translation_m)) {
    throw InvalidArgument("accuracy thresholds must strictly increase");
  }
  if (!(rr_rotation_deg > 0.0) || !(rr_translation_m > 0.0)) {
    throw InvalidArgument("recall thresholds must be positive");
  }
}

PairOutcome evaluate(const RegistrationResult& r, const RigidTransform& truth) {
  if (!r.ok()) return {r.status, kFailedRotationDeg, std::numeric_limits<double>::infinity()};
  return {r.status, rotation_error(r.transform, truth), translation_error(r.transform, truth)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("median of an empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + mid);
  if (std::isinf(hi)) return hi;
  return 0.5 * (lo + hi);
}

MetricsReport compute_metrics(std::span<const PairOutcome> pairs, const EvalThresholds& thresholds) {
  if (pairs.empty()) throw EmptyInput("no registration results");
  thresholds.validate();
  MetricsReport m;
  m.pairs.assign(pairs.begin(), pairs.end());
  m.rotation_acc.assign(thresholds.rotation_deg.size(), 0.0);
  m.translation_acc.assign(thresholds.translation_m.size(), 0.0);
  std::vector<double> re, te;
  std::size_t recalled = 0;
  for (const auto& p : pairs) {
    const bool ok = p.status == RegistrationStatus::kOk;
    if (!ok) ++m.failed;
    for (std::size_t k = 0; k < thresholds.rotation_deg.size(); ++k) {
      if (ok && p.re_deg <= thresholds.rotation_deg[k]) m.rotation_acc[k] += 1.0;
    }
    for (std::size_t k = 0; k < thresholds.translation_m.size(); ++k) {
      if (ok && p.te_m <= thresholds.translation_m[k]) m.translation_acc[k] += 1.0;
    }
    if (ok && p.re_deg <= thresholds.rr_rotation_deg && p.te_m <= thresholds.rr_translation_m) {
      ++recalled;
    }
    re.push_back(ok ? p.re_deg : kFailedRotationDeg);
    te.push_back(ok ? p.te_m : std::numeric_limits<double>::infinity());
  }
  const auto n = static_cast<double>(pairs.size());
  for (auto& a : m.rotation_acc) a /= n;
  for (auto& a : m.translation_acc) a /= n;
  m.recall = static_cast<double>(recalled) / n;
  m.median_re_deg = median(std::move(re));
  m.median_te_m = median(std::move(te));
  return m;
}

std::string_view to_string(AblationSuite s) {
  switch (s) {
    case AblationSuite::kIterations:
      return "iterations";
    case AblationSuite::kGuidance:
      return "guidance";
    case AblationSuite::kNoise:
      return "noise";
    case AblationSuite::kGammaSweep:
      return "gamma_sweep";
    case AblationSuite::kZoneFixedVsDynamic:
      return "zone_fixed_vs_dynamic";
  }
  return "unknown";
}

AblationSuite parse_suite(std::string_view name) {
  for (auto s : {AblationSuite::kIterations, AblationSuite::kGuidance, AblationSuite::kNoise,
                 AblationSuite::kGammaSweep, AblationSuite::kZoneFixedVsDynamic}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown ablation suite '" + std::string(name) + "'");
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

PairOutcome failed_outcome(RegistrationStatus s) {
  return {s, kFailedRotationDeg, std::numeric_limits<double>::infinity()};
}

PairOutcome outcome_of(const RigidTransform& t, const RigidTransform& truth) {
  return {RegistrationStatus::kOk, rotation_error(t, truth), translation_error(t, truth)};
}

std::vector<std::string> cell_names(AblationSuite suite, const PipelineConfig& cfg) {
  switch (suite) {
    case AblationSuite::kIterations:
      return {"iters=0", "iters=3", "iters=5"};
    case AblationSuite::kGuidance:
      return {"guided", "unguided"};
    case AblationSuite::kNoise:
      return {"vigg sigma=0",      "clique_only sigma=0",     "vigg sigma=0.01",
              "clique_only sigma=0.01", "vigg sigma=0.025", "clique_only sigma=0.025"};
    case AblationSuite::kGammaSweep:
      return {"gamma_sq=2", "gamma_sq=5", "gamma_sq=10", "gamma_sq=20"};
    case AblationSuite::kZoneFixedVsDynamic:
      return {"dynamic", "fixed r=" + format_number(0.5 * cfg.t_inlier),
              "fixed r=" + format_number(cfg.t_inlier), "fixed r=" + format_number(2.0 * cfg.t_inlier)};
  }
  return {};
}

// Prior plus `iterations` refinement steps with the given matcher; the
// outcome after every step count listed in `checkpoints` is appended.
struct Refined {
  PairOutcome prior;
  std::vector<PairOutcome> at;
};

Refined refine_checkpoints(const VgmMatcher& matcher, const CorrespondenceSet& c_vis,
                           const std::optional<RigidTransform>& prior, RegistrationStatus prior_status,
                           const RigidTransform& truth, const std::vector<int>& checkpoints) {
  Refined r;
  if (!prior) {
    r.prior = failed_outcome(prior_status);
    r.at.assign(checkpoints.size(), r.prior);
    return r;
  }
  r.prior = outcome_of(*prior, truth);
  RigidTransform t = *prior;
  std::optional<RegistrationStatus> failure;
  int done = 0;
  for (int target : checkpoints) {
    while (!failure && done < target) {
      try {
        t = refine_step(matcher, c_vis, t).transform;
      } catch (const NoCorrespondences&) {
        failure = RegistrationStatus::kFailedNoCorrespondences;
      } catch (const DegenerateInput&) {
        failure = RegistrationStatus::kFailedNoCorrespondences;
      }
      ++done;
    }
    r.at.push_back(failure ? failed_outcome(*failure) : outcome_of(t, truth));
  }
  return r;
}

struct PriorRun {
  std::optional<RigidTransform> transform;
  RegistrationStatus status = RegistrationStatus::kOk;
};

PriorRun run_prior(const RegistrationSession& session) {
  if (session.visual().size() < 3) return {std::nullopt, RegistrationStatus::kFailedNoHypothesis};
  try {
    return {session.estimate_prior().prior, RegistrationStatus::kOk};
  } catch (const NoValidHypothesis&) {
    return {std::nullopt, RegistrationStatus::kFailedNoHypothesis};
  }
}

std::vector<AblationRow> run_seed(AblationSuite suite, const SceneSpec& base,
                                  const PipelineConfig& cfg, std::uint64_t seed) {
  const auto names = cell_names(suite, cfg);
  std::vector<AblationRow> rows;
  auto emit = [&](std::size_t cell, const PairOutcome& out, const PairOutcome& prior) {
    rows.push_back({names[cell], seed, out, prior});
  };

  SceneSpec spec = base;
  spec.seed = seed;
  PipelineConfig run_cfg = cfg;
  run_cfg.seed = seed;

  if (suite == AblationSuite::kNoise) {
    const double sigmas[] = {0.0, 0.01, 0.025};
    for (std::size_t k = 0; k < 3; ++k) {
      spec.match_noise_sigma = sigmas[k];
      const Scene scene = generate_scene(spec);
      const RegistrationSession session(scene.p, scene.q, scene.fp, scene.fq, scene.c_vis, run_cfg);
      const PriorRun prior = run_prior(session);
      const auto full = refine_checkpoints(session.matcher(), scene.c_vis, prior.transform,
                                           prior.status, scene.truth, {run_cfg.iterations});
      emit(2 * k, full.at[0], full.prior);

      PipelineConfig clique_cfg = run_cfg;
      clique_cfg.use_guidance = false;
      clique_cfg.iterations = 0;
      const RegistrationSession bare(scene.p, scene.q, scene.fp, scene.fq, scene.c_vis, clique_cfg);
      const PriorRun bare_prior = run_prior(bare);
      const PairOutcome b = bare_prior.transform ? outcome_of(*bare_prior.transform, scene.truth)
                                                 : failed_outcome(bare_prior.status);
      emit(2 * k + 1, b, b);
    }
    return rows;
  }

  const Scene scene = generate_scene(spec);
  switch (suite) {
    case AblationSuite::kIterations: {
      const RegistrationSession session(scene.p, scene.q, scene.fp, scene.fq, scene.c_vis, run_cfg);
      const PriorRun prior = run_prior(session);
      const auto r = refine_checkpoints(session.matcher(), scene.c_vis, prior.transform,
                                        prior.status, scene.truth, {0, 3, 5});
      for (std::size_t k = 0; k < 3; ++k) emit(k, r.at[k], r.prior);
      break;
    }
    case AblationSuite::kGuidance: {
      for (std::size_t k = 0; k < 2; ++k) {
        PipelineConfig c = run_cfg;
        c.use_guidance = k == 0;
        const RegistrationSession session(scene.p, scene.q, scene.fp, scene.fq, scene.c_vis, c);
        const PriorRun prior = run_prior(session);
        const auto r = refine_checkpoints(session.matcher(), scene.c_vis, prior.transform,
                                          prior.status, scene.truth, {c.iterations});
        emit(k, r.at[0], r.prior);
      }
      break;
    }
    case AblationSuite::kGammaSweep:
    case AblationSuite::kZoneFixedVsDynamic: {
      const RegistrationSession session(scene.p, scene.q, scene.fp, scene.fq, scene.c_vis, run_cfg);
      const PriorRun prior = run_prior(session);
      std::vector<VgmConfig> variants;
      if (suite == AblationSuite::kGammaSweep) {
        for (double g : {2.0, 5.0, 10.0, 20.0}) {
          VgmConfig v = run_cfg.vgm();
          v.gamma_sq = g;
          variants.push_back(v);
        }
      } else {
        variants.push_back(run_cfg.vgm());
        for (double f : {0.5, 1.0, 2.0}) {
          VgmConfig v = run_cfg.vgm();
          v.fixed_radius = f * run_cfg.t_inlier;
          variants.push_back(v);
        }
      }
      for (std::size_t k = 0; k < variants.size(); ++k) {
        const VgmMatcher matcher(scene.p, scene.q, scene.fp, scene.fq, variants[k], seed);
        const auto r = refine_checkpoints(matcher, scene.c_vis, prior.transform, prior.status,
                                          scene.truth, {run_cfg.iterations});
        emit(k, r.at[0], r.prior);
      }
      break;
    }
    case AblationSuite::kNoise:
      break;
  }
  return rows;
}

}  // namespace

AblationTable run_ablation(AblationSuite suite, const SceneSpec& base, const PipelineConfig& cfg,
                           std::size_t seeds, const EvalThresholds& thresholds, std::size_t workers) {
  if (seeds == 0) throw InvalidArgument("at least one seed is required");
  base.validate();
  cfg.validate();
  thresholds.validate();

  std::vector<std::vector<AblationRow>> per_seed(seeds);
  std::vector<std::exception_ptr> errors(seeds);
  std::size_t next = 0;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard lock(mu);
        if (next == seeds) return;
        k = next++;
      }
      try {
        per_seed[k] = run_seed(suite, base, cfg, base.seed + k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, seeds);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AblationTable table;
  table.suite = suite;
  const auto names = cell_names(suite, cfg);
  for (auto& rows : per_seed) {
    for (auto& r : rows) table.rows.push_back(std::move(r));
  }
  for (const auto& name : names) {
    std::vector<PairOutcome> outs, priors;
    for (const auto& r : table.rows) {
      if (r.cell != name) continue;
      outs.push_back(r.outcome);
      priors.push_back(r.prior);
    }
    table.cells.push_back({name, compute_metrics(outs, thresholds), compute_metrics(priors, thresholds)});
  }
  return table;
}

std::string ablation_csv(const AblationTable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "suite,cell,seed,status,re_deg,te_m,prior_re_deg,prior_te_m\n";
  for (const auto& r : table.rows) {
    os << to_string(table.suite) << ',' << r.cell << ',' << r.seed << ','
       << to_string(r.outcome.status) << ',' << r.outcome.re_deg << ',' << r.outcome.te_m << ','
       << r.prior.re_deg << ',' << r.prior.te_m << '\n';
  }
  return os.str();
}

}  // namespace vigg
