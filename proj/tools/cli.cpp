#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "vigg/io.hpp"
#include "vigg/lift.hpp"
#include "vigg/synth.hpp"

namespace vigg::cli {

namespace {

using nlohmann::json;

json parse_json(std::string_view text, std::string_view name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(name) + ": invalid JSON at byte " + std::to_string(e.byte));
  }
}

json matrix_json(const RigidTransform& t) {
  const Matrix4 m = t.matrix();
  json a = json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a.push_back(m(r, c));
  }
  return a;
}

void apply_preset(PipelineConfig& cfg, std::string_view preset) {
  PipelineConfig p;
  if (preset == "indoor") {
    p = PipelineConfig::indoor();
  } else if (preset == "outdoor") {
    p = PipelineConfig::outdoor();
  } else {
    throw InvalidArgument("unknown preset '" + std::string(preset) + "'");
  }
  cfg.voxel_size = p.voxel_size;
  cfg.t_inlier = p.t_inlier;
}

void init_logging() {
  auto logger = spdlog::get("vigg");
  if (!logger) {
    logger = spdlog::stderr_logger_st("vigg");
    spdlog::set_default_logger(logger);
  }
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("VIGG_LOG")) {
    const std::string s = env;
    level = spdlog::level::from_str(s);
    if (level == spdlog::level::off && s != "off") {
      level = spdlog::level::warn;
      logger->set_level(level);
      spdlog::warn("unknown VIGG_LOG level '{}', using warn", s);
    }
  }
  logger->set_level(level);
}

struct CommonOptions {
  std::string preset;
  std::optional<double> gamma_sq;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_source_points;
  std::string report;
  std::optional<std::size_t> workers;
  std::string config;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--preset", o.preset, "Parameter preset")->check(CLI::IsMember({"indoor", "outdoor"}));
  app->add_option("--gamma-sq", o.gamma_sq, "Chi-square search zone bound");
  app->add_option("--iterations", o.iterations, "Refinement iterations")
      ->check(CLI::Range(0, PipelineConfig::kMaxIterations));
  app->add_option("--seed", o.seed, "Run seed");
  app->add_option("--max-source-points", o.max_source_points, "Source sample size for local matching");
  app->add_option("--report", o.report, "Write the JSON report to this path");
  app->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--config", o.config, "JSON config file");
}

// Built-in defaults < config file < manifest overrides < flags.
PipelineConfig resolve_config(const CommonOptions& o, const std::string& manifest_config = {}) {
  PipelineConfig cfg;
  if (!o.config.empty()) cfg = apply_config_json(io::read_file(o.config), cfg, o.config);
  if (!manifest_config.empty()) cfg = apply_config_json(manifest_config, cfg, "manifest config");
  if (!o.preset.empty()) apply_preset(cfg, o.preset);
  if (o.gamma_sq) cfg.gamma_sq = *o.gamma_sq;
  if (o.iterations) cfg.iterations = *o.iterations;
  if (o.seed) cfg.seed = *o.seed;
  if (o.max_source_points) cfg.max_source_points = *o.max_source_points;
  cfg.validate();
  return cfg;
}

std::size_t worker_count(const CommonOptions& o) {
  if (o.workers) return *o.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

FeatureSet descriptor_of(const PointCloud& cloud, const DescriptorParams& params) {
  if (cloud.has_normals()) return compute_descriptor(cloud, params);
  return compute_descriptor(estimate_normals(cloud, params.normal_radius), params);
}

CorrespondenceSet lift_pixel_matches(const io::MatchFile& m, const PairEntry& e,
                                     const PairInputs& in) {
  if (e.cameras.empty()) {
    throw FormatError(e.matches.string() + ": pixel matches need a cameras file");
  }
  const auto [cam_p, cam_q] = io::read_cameras(e.cameras);
  const bool depth = !e.depth_p.empty() || !e.depth_q.empty();
  CorrespondenceSet c;
  if (depth) {
    if (e.depth_p.empty() || e.depth_q.empty()) {
      throw FormatError(e.matches.string() + ": depth lifting needs depth images for both frames");
    }
    const DepthImage dp = io::read_depth(e.depth_p);
    const DepthImage dq = io::read_depth(e.depth_q);
    c = lift_matches(m.pixels, DepthSource{&dp, cam_p.intrinsics}, DepthSource{&dq, cam_q.intrinsics});
    // Depth lifting yields camera-frame points; move them into the cloud frames.
    const RigidTransform to_p = cam_p.extrinsic.inverse();
    const RigidTransform to_q = cam_q.extrinsic.inverse();
    for (auto& x : c) {
      x.src = to_p.apply(x.src);
      x.dst = to_q.apply(x.dst);
    }
  } else {
    const ProjectionMap mp = build_projection_map(in.p, cam_p.extrinsic, cam_p.intrinsics);
    const ProjectionMap mq = build_projection_map(in.q, cam_q.extrinsic, cam_q.intrinsics);
    c = lift_matches(m.pixels, ProjectionSource{&mp, &in.p}, ProjectionSource{&mq, &in.q});
  }
  spdlog::info("lifted {} of {} pixel matches", c.size(), m.pixels.size());
  return c;
}

json metrics_json(const MetricsReport& m, const EvalThresholds& t) {
  json j = {{"pairs", m.pairs.size()},
            {"failed", m.failed},
            {"recall", m.recall},
            {"median_re_deg", m.median_re_deg},
            {"median_te_m", m.median_te_m},
            {"rotation_acc", json::array()},
            {"translation_acc", json::array()}};
  for (std::size_t k = 0; k < t.rotation_deg.size(); ++k) {
    j["rotation_acc"].push_back({{"threshold_deg", t.rotation_deg[k]}, {"acc", m.rotation_acc[k]}});
  }
  for (std::size_t k = 0; k < t.translation_m.size(); ++k) {
    j["translation_acc"].push_back({{"threshold_m", t.translation_m[k]}, {"acc", m.translation_acc[k]}});
  }
  return j;
}

json config_json(const PipelineConfig& c) {
  json j = {{"voxel_size", c.voxel_size},
            {"t_inlier", c.t_inlier},
            {"gamma_sq", c.gamma_sq},
            {"iterations", c.iterations},
            {"max_source_points", c.max_source_points},
            {"c_geo_cap", c.c_geo_cap},
            {"seed", c.seed},
            {"weight_bandwidth", c.weight_bandwidth},
            {"min_clique_size", c.min_clique_size},
            {"max_cliques", c.max_cliques},
            {"use_guidance", c.use_guidance},
            {"keep_all_visual", c.keep_all_visual}};
  j["fixed_radius"] = c.fixed_radius ? json(*c.fixed_radius) : json(nullptr);
  return j;
}

EvalThresholds thresholds_for(const CommonOptions& o) {
  return o.preset == "outdoor" ? EvalThresholds::outdoor() : EvalThresholds::indoor();
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ------------------------------------------------------------ commands

struct RegisterOptions {
  CommonOptions common;
  std::string bundle;
  std::string cloud_p, cloud_q, features_p, features_q, matches, cameras, depth_p, depth_q, truth;
  bool compute_features = false;
  bool timings = false;
};

int cmd_register(const RegisterOptions& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(o.common);
  PairEntry e = o.bundle.empty() ? PairEntry{} : bundle_entry(o.bundle);
  auto set = [](fs::path& slot, const std::string& v) {
    if (!v.empty()) slot = v;
  };
  set(e.cloud_p, o.cloud_p);
  set(e.cloud_q, o.cloud_q);
  set(e.features_p, o.features_p);
  set(e.features_q, o.features_q);
  set(e.matches, o.matches);
  set(e.cameras, o.cameras);
  set(e.depth_p, o.depth_p);
  set(e.depth_q, o.depth_q);
  set(e.truth, o.truth);
  if (o.compute_features) e.features_p = e.features_q = fs::path();
  if (e.cloud_p.empty() || e.cloud_q.empty() || e.matches.empty()) {
    err << "register: need both clouds and a match file (or a bundle directory)\n";
    return 1;
  }

  const PairInputs in = load_pair(e, cfg.voxel_size);
  const RegistrationResult r = register_pair(in.p, in.q, in.fp, in.fq, in.c_vis, cfg);
  spdlog::info("status {} after {} iterations", to_string(r.status), r.trace.size());
  emit(report_json(r, cfg, in.truth, o.timings), o.common.report, out);
  if (!r.ok()) {
    err << "registration failed: " << to_string(r.status) << "\n";
    return 2;
  }
  return 0;
}

struct BenchOptions {
  CommonOptions common;
  std::string suite;
  std::size_t seeds = 20;
  std::string scene = "standard";
  std::string spec;
  std::string csv;
  std::string manifest;
};

int bench_manifest(const BenchOptions& o, std::ostream& out) {
  const fs::path mpath(o.manifest);
  const RunManifest m = parse_manifest(io::read_file(mpath), mpath.parent_path(), mpath.string());
  const PipelineConfig cfg = resolve_config(o.common, m.config_json);
  const EvalThresholds thresholds = thresholds_for(o.common);

  struct Row {
    std::string status;
    std::optional<PairOutcome> outcome;
  };
  std::vector<Row> rows(m.pairs.size());
  std::size_t next = 0;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard lock(mu);
        if (next == rows.size()) return;
        k = next++;
      }
      try {
        const PairInputs in = load_pair(m.pairs[k], cfg.voxel_size);
        const auto r = register_pair(in.p, in.q, in.fp, in.fq, in.c_vis, cfg);
        rows[k].status = std::string(to_string(r.status));
        if (in.truth) rows[k].outcome = evaluate(r, *in.truth);
      } catch (const Error& ex) {
        spdlog::warn("pair '{}': {}", m.pairs[k].name, ex.what());
        rows[k].status = "io_error";
      }
    }
  };
  const std::size_t workers = std::min(worker_count(o.common), std::max<std::size_t>(1, rows.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::string csv = "pair,status,re_deg,te_m\n";
  std::vector<PairOutcome> evaluated;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    csv += m.pairs[k].name + "," + rows[k].status + ",";
    if (rows[k].outcome) {
      csv += csv_number(rows[k].outcome->re_deg) + "," + csv_number(rows[k].outcome->te_m);
      evaluated.push_back(*rows[k].outcome);
    } else {
      csv += ",";
    }
    csv += "\n";
  }
  emit(csv, o.csv, out);
  if (!o.common.report.empty()) {
    json s = {{"manifest", o.manifest}, {"pairs", rows.size()}, {"config", config_json(cfg)}};
    std::size_t io_errors = 0;
    for (const auto& r : rows) io_errors += r.status == "io_error";
    s["io_errors"] = io_errors;
    s["metrics"] = evaluated.empty() ? json(nullptr) : metrics_json(compute_metrics(evaluated, thresholds), thresholds);
    io::write_file(o.common.report, s.dump(2) + "\n");
  }
  return 0;
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  if (!o.manifest.empty()) return bench_manifest(o, out);
  if (o.suite.empty()) {
    err << "bench: need --suite or --manifest\n";
    return 1;
  }
  const AblationSuite suite = parse_suite(o.suite);
  const PipelineConfig cfg = resolve_config(o.common);
  SceneSpec base = o.scene == "noiseless" ? SceneSpec::noiseless() : SceneSpec::standard();
  if (!o.spec.empty()) base = io::parse_spec(io::read_file(o.spec), base, o.spec);
  if (o.common.seed) base.seed = *o.common.seed;
  const EvalThresholds thresholds = thresholds_for(o.common);

  spdlog::info("suite {} on {} seeds from {}", o.suite, o.seeds, base.seed);
  const AblationTable table = run_ablation(suite, base, cfg, o.seeds, thresholds, worker_count(o.common));
  emit(ablation_csv(table), o.csv, out);

  if (!o.common.report.empty()) {
    json s = {{"suite", o.suite},
              {"seeds", o.seeds},
              {"base_seed", base.seed},
              {"spec", json::parse(io::spec_to_json(base))},
              {"config", config_json(cfg)},
              {"cells", json::array()}};
    for (const auto& c : table.cells) {
      json cell = metrics_json(c.metrics, thresholds);
      cell["name"] = c.name;
      cell["prior_median_re_deg"] = c.prior_metrics.median_re_deg;
      cell["prior_median_te_m"] = c.prior_metrics.median_te_m;
      s["cells"].push_back(std::move(cell));
    }
    if (suite == AblationSuite::kNoise) {
      json levels = json::array();
      for (std::size_t k = 0; k + 1 < table.cells.size(); k += 2) {
        const std::string& name = table.cells[k].name;
        levels.push_back({{"sigma", std::stod(name.substr(name.find('=') + 1))},
                          {"vigg_median_re_deg", table.cells[k].metrics.median_re_deg},
                          {"vigg_median_te_m", table.cells[k].metrics.median_te_m},
                          {"clique_only_median_re_deg", table.cells[k + 1].metrics.median_re_deg},
                          {"clique_only_median_te_m", table.cells[k + 1].metrics.median_te_m}});
      }
      s["medians_by_sigma"] = std::move(levels);
    }
    io::write_file(o.common.report, s.dump(2) + "\n");
  }
  return 0;
}

struct FeaturesOptions {
  CommonOptions common;
  std::string input, output, cloud_out;
  std::optional<double> voxel, normal_radius, feature_radius;
  std::optional<int> bins;
};

int cmd_features(const FeaturesOptions& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(o.common);
  PointCloud cloud = io::read_ply(o.input);
  double voxel = cfg.voxel_size;
  if (o.voxel) {
    voxel = *o.voxel;
    cloud = voxel_downsample(cloud, voxel);
    fs::path echo = o.cloud_out.empty() ? fs::path(o.output).replace_extension(".ply") : fs::path(o.cloud_out);
    io::write_ply(echo, cloud);
    spdlog::info("downsampled to {} points, written to {}", cloud.size(), echo.string());
  }
  DescriptorParams params = DescriptorParams::for_voxel(voxel);
  if (o.normal_radius) params.normal_radius = *o.normal_radius;
  if (o.feature_radius) params.feature_radius = *o.feature_radius;
  if (o.bins) params.bins_per_angle = *o.bins;
  params.validate();
  if (cloud.empty()) {
    err << "features: " << o.input << " has no points\n";
    return 1;
  }
  io::write_features(o.output, descriptor_of(cloud, params));
  if (!o.common.report.empty()) {
    json r = {{"input", o.input},
              {"output", o.output},
              {"count", cloud.size()},
              {"dim", params.dim()},
              {"normal_radius", params.normal_radius},
              {"feature_radius", params.feature_radius}};
    io::write_file(o.common.report, r.dump(2) + "\n");
  }
  (void)out;
  return 0;
}

struct GenSceneOptions {
  CommonOptions common;
  std::string dir;
  std::string scene = "standard";
  std::string spec;
  std::optional<std::size_t> points, matches;
  std::optional<double> inlier_ratio, match_noise, overlap;
};

int cmd_gen_scene(const GenSceneOptions& o, std::ostream& out) {
  SceneSpec spec = o.scene == "noiseless" ? SceneSpec::noiseless() : SceneSpec::standard();
  if (!o.spec.empty()) spec = io::parse_spec(io::read_file(o.spec), spec, o.spec);
  if (o.common.seed) spec.seed = *o.common.seed;
  if (o.points) spec.point_count = *o.points;
  if (o.matches) spec.visual_match_count = *o.matches;
  if (o.inlier_ratio) spec.visual_inlier_ratio = *o.inlier_ratio;
  if (o.match_noise) spec.match_noise_sigma = *o.match_noise;
  if (o.overlap) spec.overlap_fraction = *o.overlap;
  const Scene scene = generate_scene(spec);
  io::write_scene_bundle(o.dir, scene);
  if (!o.common.report.empty()) {
    json r = {{"dir", o.dir},
              {"points_p", scene.p.size()},
              {"points_q", scene.q.size()},
              {"visual_matches", scene.c_vis.size()},
              {"spec", json::parse(io::spec_to_json(spec))}};
    io::write_file(o.common.report, r.dump(2) + "\n");
  }
  (void)out;
  return 0;
}

}  // namespace

RunManifest parse_manifest(std::string_view text, const fs::path& base_dir, std::string_view name) {
  const json j = parse_json(text, name);
  if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array()) {
    throw FormatError(std::string(name) + ": manifest needs a 'pairs' array");
  }
  RunManifest m;
  std::size_t k = 0;
  for (const auto& p : j["pairs"]) {
    if (!p.is_object()) throw FormatError(std::string(name) + ": pair " + std::to_string(k) + " is not an object");
    auto str = [&](const char* key) -> std::string {
      if (!p.contains(key)) return {};
      if (!p[key].is_string()) {
        throw FormatError(std::string(name) + ": pair " + std::to_string(k) + " field '" + key + "' must be a string");
      }
      return p[key].get<std::string>();
    };
    PairEntry e;
    e.name = p.contains("name") ? str("name") : "pair" + std::to_string(k);
    e.cloud_p = resolve(base_dir, str("cloud_p"));
    e.cloud_q = resolve(base_dir, str("cloud_q"));
    e.features_p = resolve(base_dir, str("features_p"));
    e.features_q = resolve(base_dir, str("features_q"));
    e.matches = resolve(base_dir, str("matches"));
    e.cameras = resolve(base_dir, str("intrinsics"));
    e.truth = resolve(base_dir, str("truth"));
    if (p.contains("depth")) {
      const auto& d = p["depth"];
      if (!d.is_array() || d.size() != 2 || !d[0].is_string() || !d[1].is_string()) {
        throw FormatError(std::string(name) + ": pair " + std::to_string(k) + " 'depth' must list two files");
      }
      e.depth_p = resolve(base_dir, d[0].get<std::string>());
      e.depth_q = resolve(base_dir, d[1].get<std::string>());
    }
    if (e.cloud_p.empty() || e.cloud_q.empty() || e.matches.empty()) {
      throw FormatError(std::string(name) + ": pair " + std::to_string(k) + " needs cloud_p, cloud_q and matches");
    }
    m.pairs.push_back(std::move(e));
    ++k;
  }
  if (j.contains("config")) m.config_json = j["config"].dump();
  return m;
}

PipelineConfig apply_config_json(std::string_view text, PipelineConfig cfg, std::string_view name) {
  const json j = parse_json(text, name);
  if (!j.is_object()) throw FormatError(std::string(name) + ": config must be a JSON object");
  try {
    if (j.contains("preset")) apply_preset(cfg, j["preset"].get<std::string>());
    auto opt = [&](const char* key, auto& slot) {
      if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
    };
    opt("voxel_size", cfg.voxel_size);
    opt("t_inlier", cfg.t_inlier);
    opt("gamma_sq", cfg.gamma_sq);
    opt("iterations", cfg.iterations);
    opt("max_source_points", cfg.max_source_points);
    opt("c_geo_cap", cfg.c_geo_cap);
    opt("seed", cfg.seed);
    opt("weight_bandwidth", cfg.weight_bandwidth);
    opt("min_clique_size", cfg.min_clique_size);
    opt("max_cliques", cfg.max_cliques);
    opt("use_guidance", cfg.use_guidance);
    opt("keep_all_visual", cfg.keep_all_visual);
    if (j.contains("fixed_radius")) {
      if (j["fixed_radius"].is_null()) {
        cfg.fixed_radius.reset();
      } else {
        cfg.fixed_radius = j["fixed_radius"].get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  }
  return cfg;
}

PairEntry bundle_entry(const fs::path& dir) {
  PairEntry e;
  e.name = dir.filename().string();
  e.cloud_p = dir / "cloud_p.ply";
  e.cloud_q = dir / "cloud_q.ply";
  e.features_p = dir / "features_p.vgf";
  e.features_q = dir / "features_q.vgf";
  e.matches = dir / "matches.vgm";
  if (fs::exists(dir / "truth.json")) e.truth = dir / "truth.json";
  return e;
}

PairInputs load_pair(const PairEntry& e, double voxel) {
  PairInputs in;
  in.p = io::read_ply(e.cloud_p);
  in.q = io::read_ply(e.cloud_q);
  if (e.features_p.empty() != e.features_q.empty()) {
    throw IoError("feature files must be given for both clouds or neither");
  }
  if (e.features_p.empty()) {
    const auto params = DescriptorParams::for_voxel(voxel);
    spdlog::info("computing descriptors (normal radius {}, feature radius {})", params.normal_radius,
                 params.feature_radius);
    in.fp = descriptor_of(in.p, params);
    in.fq = descriptor_of(in.q, params);
  } else {
    in.fp = io::read_features(e.features_p);
    in.fq = io::read_features(e.features_q);
    if (in.fp.size() != in.p.size()) {
      throw FormatError(e.features_p.string() + ": " + std::to_string(in.fp.size()) +
                        " features for " + std::to_string(in.p.size()) + " points");
    }
    if (in.fq.size() != in.q.size()) {
      throw FormatError(e.features_q.string() + ": " + std::to_string(in.fq.size()) +
                        " features for " + std::to_string(in.q.size()) + " points");
    }
  }
  const io::MatchFile m = io::read_matches(e.matches);
  in.c_vis = m.mode == io::MatchMode::kLifted ? m.lifted : lift_pixel_matches(m, e, in);
  if (!e.truth.empty()) in.truth = io::read_truth(e.truth).transform;
  return in;
}

std::string report_json(const RegistrationResult& r, const PipelineConfig& cfg,
                        const std::optional<RigidTransform>& truth, bool timings) {
  json j;
  j["status"] = std::string(to_string(r.status));
  j["transform"] = matrix_json(r.transform);
  j["prior"] = matrix_json(r.prior);
  j["visual_count"] = r.visual_count;
  j["guidance_count"] = r.guidance_count;
  j["gvca"] = {{"clique_count", r.gvca.clique_count},
               {"hypothesis_count", r.gvca.hypothesis_count},
               {"truncated", r.gvca.truncated},
               {"best_score", r.gvca.best_score},
               {"runner_up_score", r.gvca.runner_up_score},
               {"winning_clique_size", r.gvca.winning_clique_size}};
  json iters = json::array();
  for (const auto& it : r.trace) {
    iters.push_back({{"sigma_sq", it.model.sigma_sq},
                     {"radius", it.model.radius()},
                     {"inlier_count", it.model.inlier_count},
                     {"fallback", it.model.fallback},
                     {"correspondence_count", it.correspondence_count},
                     {"geometric_count", it.geometric_count},
                     {"visual_count", it.visual_count}});
  }
  j["iterations"] = std::move(iters);
  j["config"] = config_json(cfg);
  if (truth) {
    const PairOutcome o = evaluate(r, *truth);
    j["evaluation"] = {{"re_deg", o.re_deg}, {"te_m", o.te_m}};
  }
  if (timings) {
    j["timings_ms"] = {{"global_match", r.timings.global_match_ms},
                       {"gvca", r.timings.gvca_ms},
                       {"refine", r.timings.refine_ms},
                       {"total", r.timings.total_ms}};
  }
  return j.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  init_logging();
  CLI::App app{"Visual-guided point cloud registration"};
  app.name("vigg");
  app.require_subcommand(1);

  RegisterOptions reg;
  auto* r = app.add_subcommand("register", "Register one pair and print a JSON report");
  add_common(r, reg.common);
  r->add_option("bundle", reg.bundle, "Scene bundle directory");
  r->add_option("--cloud-p", reg.cloud_p, "Source cloud (PLY)");
  r->add_option("--cloud-q", reg.cloud_q, "Target cloud (PLY)");
  r->add_option("--features-p", reg.features_p, "Source features (VGF1)");
  r->add_option("--features-q", reg.features_q, "Target features (VGF1)");
  r->add_option("--matches", reg.matches, "Visual matches (VGM1)");
  r->add_option("--cameras", reg.cameras, "Camera JSON for pixel matches");
  r->add_option("--depth-p", reg.depth_p, "Source depth image");
  r->add_option("--depth-q", reg.depth_q, "Target depth image");
  r->add_option("--truth", reg.truth, "Ground-truth JSON; adds RE/TE to the report");
  r->add_flag("--compute-features", reg.compute_features, "Ignore feature files and compute FPFH");
  r->add_flag("--timings", reg.timings, "Include stage timings in the report");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Run an ablation suite or a manifest of pairs");
  add_common(b, bench.common);
  b->add_option("--suite", bench.suite, "iterations|guidance|noise|gamma_sweep|zone_fixed_vs_dynamic");
  b->add_option("--seeds", bench.seeds, "Number of seeded scenes")->check(CLI::PositiveNumber);
  b->add_option("--scene", bench.scene, "Base scene")->check(CLI::IsMember({"standard", "noiseless"}));
  b->add_option("--spec", bench.spec, "Scene spec JSON overriding the base scene");
  b->add_option("--csv", bench.csv, "Write the CSV table here instead of stdout");
  b->add_option("--manifest", bench.manifest, "Manifest of registration pairs");

  FeaturesOptions feat;
  auto* f = app.add_subcommand("features", "Compute FPFH descriptors of a cloud");
  add_common(f, feat.common);
  f->add_option("cloud", feat.input, "Input cloud (PLY)")->required();
  f->add_option("-o,--output", feat.output, "Output feature file (VGF1)")->required();
  f->add_option("--voxel", feat.voxel, "Downsample first; the cloud is echoed to --cloud-out")
      ->check(CLI::PositiveNumber);
  f->add_option("--cloud-out", feat.cloud_out, "Path of the downsampled cloud");
  f->add_option("--normal-radius", feat.normal_radius, "Normal estimation radius");
  f->add_option("--feature-radius", feat.feature_radius, "Descriptor radius");
  f->add_option("--bins", feat.bins, "Bins per angle");

  GenSceneOptions gen;
  auto* g = app.add_subcommand("gen-scene", "Write a synthetic scene bundle");
  add_common(g, gen.common);
  g->add_option("dir", gen.dir, "Output directory")->required();
  g->add_option("--scene", gen.scene, "Base scene")->check(CLI::IsMember({"standard", "noiseless"}));
  g->add_option("--spec", gen.spec, "Scene spec JSON overriding the base scene");
  g->add_option("--points", gen.points, "Points per cloud");
  g->add_option("--matches", gen.matches, "Visual match count");
  g->add_option("--inlier-ratio", gen.inlier_ratio, "Visual inlier ratio");
  g->add_option("--match-noise", gen.match_noise, "Visual match noise sigma (m)");
  g->add_option("--overlap", gen.overlap, "Overlap fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (r->parsed()) return cmd_register(reg, out, err);
    if (b->parsed()) return cmd_bench(bench, out, err);
    if (f->parsed()) return cmd_features(feat, out, err);
    if (g->parsed()) return cmd_gen_scene(gen, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace vigg::cli
