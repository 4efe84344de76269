// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "test_support.hpp"
#include "vigg/io.hpp"
#include "vigg/synth.hpp"

namespace {

using namespace vigg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Verdict exact_recovery() {
  constexpr int kScenes = 100;
  int failures = 0;
  double worst_re = 0, worst_te = 0, worst_ms = 0;
  for (int seed = 0; seed < kScenes; ++seed) {
    SceneSpec spec = SceneSpec::noiseless();
    spec.seed = seed;
    const Scene s = generate_scene(spec);
    const auto start = Clock::now();
    const auto r = register_pair(s.p, s.q, s.fp, s.fq, s.c_vis, PipelineConfig{});
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    const double re = r.ok() ? rotation_error(r.transform, s.truth) : kFailedRotationDeg;
    const double te = r.ok() ? translation_error(r.transform, s.truth) : 1e9;
    worst_re = std::max(worst_re, re);
    worst_te = std::max(worst_te, te);
    worst_ms = std::max(worst_ms, ms);
    failures += !(re < 1e-4 && te < 1e-6 && ms < 2000.0);
  }
  return {failures == 0, fmt("%d scenes, %d failing; worst RE %.3g deg, TE %.3g m, runtime %.0f ms",
                             kScenes, failures, worst_re, worst_te, worst_ms)};
}

Verdict clique_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 15);
  const double probs[] = {0.2, 0.5, 0.8};
  int discrepancies = 0;
  for (int k = 0; k < 200; ++k) {
    std::bernoulli_distribution edge(probs[k % 3]);
    CompatGraph g(size(rng));
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        if (edge(rng)) g.add_edge(i, j);
    const auto got = enumerate_maximal_cliques(g, 3, 1'000'000);
    discrepancies += got.truncated || got.cliques != oracle::brute_force_cliques(g, 3);
  }
  return {discrepancies == 0, fmt("200 graphs, %d discrepancies", discrepancies)};
}

Verdict umeyama_oracle() {
  std::mt19937_64 rng(3030);
  std::uniform_int_distribution<std::size_t> count(3, 200);
  std::uniform_real_distribution<double> weight(0.01, 5.0), noise(0.0, 0.1);
  double worst_r = 0, worst_t = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto truth = test::random_transform(rng, 5.0);
    std::normal_distribution<double> g(0.0, noise(rng));
    CorrespondenceSet cs;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const Point3 s = test::random_point(rng, -2.0, 2.0);
      cs.push_back({s, truth.apply(s) + Point3(g(rng), g(rng), g(rng)), weight(rng)});
    }
    const auto fit = fit_weighted(cs);
    const auto ref = oracle::horn_fit(cs);
    worst_r = std::max(worst_r, (fit.rotation() - ref.rotation()).norm());
    worst_t = std::max(worst_t, (fit.translation() - ref.translation()).norm());
  }
  return {worst_r <= 1e-9 && worst_t <= 1e-9,
          fmt("1000 instances; max rotation Frobenius %.3g, translation %.3g", worst_r, worst_t)};
}

Verdict chi_square_coverage() {
  // Q is P under the truth plus Gaussian noise; the visual matches carry
  // independent noise of the same law. Zones come from the estimated sigma.
  constexpr std::size_t kTrials = 10'000;
  constexpr double kSigma = 0.01;
  std::mt19937_64 rng(4040);
  std::normal_distribution<double> g(0.0, kSigma);
  const auto truth = test::random_transform(rng);
  PointCloud p, q;
  CorrespondenceSet c_vis;
  for (std::size_t i = 0; i < kTrials; ++i) {
    const Point3 x = test::random_point(rng, 0.0, 10.0);
    p.points.push_back(x);
    q.points.push_back(truth.apply(x) + Point3(g(rng), g(rng), g(rng)));
    c_vis.push_back({x, truth.apply(x) + Point3(g(rng), g(rng), g(rng))});
  }
  VgmConfig cfg;
  cfg.sigma_floor = 1e-12;
  const auto model = estimate_sigma(select_pseudo_inliers(c_vis, truth, cfg.t_inlier), truth, cfg);
  std::vector<std::size_t> all(kTrials);
  for (std::size_t i = 0; i < kTrials; ++i) all[i] = i;
  const auto zones = build_search_zones(all, p, truth, SpatialIndex3(q.points), model);
  std::size_t covered = 0;
  for (const auto& z : zones) {
    covered += std::binary_search(z.candidates.begin(), z.candidates.end(), z.source);
  }
  const double frac = static_cast<double>(covered) / kTrials;
  const double analytic = oracle::chi2_3_cdf(10.0);
  return {frac >= 0.95, fmt("coverage %.4f over %zu trials (analytic %.4f, library %.4f)", frac, kTrials,
                            analytic, chi_square_confidence(10.0))};
}

Verdict sigma_consistency() {
  constexpr double kSigma = 0.02;
  VgmConfig cfg;
  cfg.t_inlier = 1.0;
  cfg.sigma_floor = 1e-12;
  double worst_large = 0, worst_small = 0;
  for (int seed = 0; seed < 50; ++seed) {
    for (std::size_t n : {std::size_t{10'000}, std::size_t{100}}) {
      std::mt19937_64 rng(5000 + seed * 2 + (n == 100));
      std::normal_distribution<double> g(0.0, kSigma);
      const auto t = test::random_transform(rng);
      CorrespondenceSet c;
      for (std::size_t i = 0; i < n; ++i) {
        const Point3 s = test::random_point(rng);
        c.push_back({s, t.apply(s) + Point3(g(rng), g(rng), g(rng))});
      }
      const auto m = estimate_sigma(select_pseudo_inliers(c, t, cfg.t_inlier), t, cfg);
      const double rel = std::abs(m.sigma_sq / (kSigma * kSigma) - 1.0);
      (n == 100 ? worst_small : worst_large) = std::max(n == 100 ? worst_small : worst_large, rel);
    }
  }
  return {worst_large <= 0.10 && worst_small <= 0.30,
          fmt("worst relative error %.3f at n=10^4 (limit 0.10), %.3f at n=10^2 (limit 0.30)", worst_large,
              worst_small)};
}

const AblationCell& cell(const AblationTable& t, const std::string& name) {
  for (const auto& c : t.cells)
    if (c.name == name) return c;
  throw std::runtime_error("missing cell " + name);
}

Verdict iteration_trend() {
  const auto t = run_ablation(AblationSuite::kIterations, SceneSpec::standard(), PipelineConfig{}, 100, {}, workers());
  const double re0 = cell(t, "iters=0").metrics.median_re_deg;
  const double re3 = cell(t, "iters=3").metrics.median_re_deg;
  const double re5 = cell(t, "iters=5").metrics.median_re_deg;
  return {re3 <= re0 && std::abs(re5 - re3) <= 0.05 * re3,
          fmt("median RE iters=0 %.4f, iters=3 %.4f, iters=5 %.4f deg", re0, re3, re5)};
}

double win_rate(double geo_ratio, bool guided) {
  int wins = 0;
  GvcaConfig cfg;
  for (int seed = 0; seed < 100; ++seed) {
    AmbiguitySpec spec;
    spec.geo_inlier_ratio = geo_ratio;
    spec.seed = 7000 + seed;
    const auto s = generate_ambiguity_scenario(spec);
    const auto r = gvca_estimate(s.c_vis, guided ? s.c_geo : CorrespondenceSet{}, cfg);
    wins += rotation_error(r.prior, s.truth) <= 5.0 && translation_error(r.prior, s.truth) <= cfg.inlier_threshold;
  }
  return wins / 100.0;
}

Verdict guidance_trend() {
  const double g40 = win_rate(0.4, true), u40 = win_rate(0.4, false);
  const double g0 = win_rate(0.0, true), u0 = win_rate(0.0, false);
  return {g40 >= u40 + 0.20 && g0 >= u0 - 0.02,
          fmt("win rate at 40%% geo inliers: guided %.2f vs unguided %.2f; at 0%%: guided %.2f vs unguided %.2f",
              g40, u40, g0, u0)};
}

Verdict noise_trend() {
  const auto t = run_ablation(AblationSuite::kNoise, SceneSpec::standard(), PipelineConfig{}, 100, {}, workers());
  const double v0 = cell(t, "vigg sigma=0").metrics.median_re_deg;
  const double v25 = cell(t, "vigg sigma=0.025").metrics.median_re_deg;
  const double c0 = cell(t, "clique_only sigma=0").metrics.median_re_deg;
  const double c25 = cell(t, "clique_only sigma=0.025").metrics.median_re_deg;
  return {v25 <= 1.5 * v0 && c25 >= 2.0 * c0,
          fmt("median RE vigg %.4f -> %.4f deg (x%.2f, limit 1.5); clique-only %.4f -> %.4f deg (x%.2f, need 2)",
              v0, v25, v25 / v0, c0, c25, c25 / c0)};
}

Verdict gamma_sweep() {
  const auto t = run_ablation(AblationSuite::kGammaSweep, SceneSpec::standard(), PipelineConfig{}, 100, {}, workers());
  const double g2 = cell(t, "gamma_sq=2").metrics.median_re_deg;
  const double g5 = cell(t, "gamma_sq=5").metrics.median_re_deg;
  const double g10 = cell(t, "gamma_sq=10").metrics.median_re_deg;
  const double g20 = cell(t, "gamma_sq=20").metrics.median_re_deg;
  const double lo = std::min({g5, g10, g20}), hi = std::max({g5, g10, g20});
  return {g2 > g10 && hi <= 1.10 * lo,
          fmt("median RE gamma_sq=2 %.4f, 5 %.4f, 10 %.4f, 20 %.4f deg", g2, g5, g10, g20)};
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "vigg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "vigg_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::write_file(dir / "spec.json", R"({"point_count": 2000})");
  const std::string spec = (dir / "spec.json").string();
  std::vector<std::string> mismatches;
  auto same_files = [&](const std::string& what, const fs::path& a, const fs::path& b) {
    if (io::read_file(a) != io::read_file(b)) mismatches.push_back(what);
  };

  bool ok = cli({"gen-scene", (dir / "s1").string(), "--spec", spec, "--seed", "11"}) == 0 &&
            cli({"gen-scene", (dir / "s2").string(), "--spec", spec, "--seed", "11"}) == 0;
  for (const char* f : {"cloud_p.ply", "cloud_q.ply", "features_p.vgf", "features_q.vgf", "matches.vgm", "truth.json"}) {
    same_files(std::string("gen-scene ") + f, dir / "s1" / f, dir / "s2" / f);
  }
  std::string out1, out2;
  ok = ok && cli({"register", (dir / "s1").string(), "--seed", "5"}, &out1) == 0 &&
       cli({"register", (dir / "s1").string(), "--seed", "5"}, &out2) == 0;
  if (out1 != out2) mismatches.push_back("register");
  ok = ok && cli({"features", (dir / "s1" / "cloud_q.ply").string(), "-o", (dir / "f1.vgf").string(), "--voxel", "0.05"}) == 0 &&
       cli({"features", (dir / "s1" / "cloud_q.ply").string(), "-o", (dir / "f2.vgf").string(), "--voxel", "0.05"}) == 0;
  same_files("features", dir / "f1.vgf", dir / "f2.vgf");
  same_files("features cloud echo", dir / "f1.ply", dir / "f2.ply");
  ok = ok && cli({"bench", "--suite", "guidance", "--seeds", "3", "--spec", spec, "--seed", "9", "--csv",
                  (dir / "b1.csv").string(), "--report", (dir / "b1.json").string()}) == 0 &&
       cli({"bench", "--suite", "guidance", "--seeds", "3", "--spec", spec, "--seed", "9", "--csv",
            (dir / "b2.csv").string(), "--report", (dir / "b2.json").string(), "--workers", "1"}) == 0;
  same_files("bench csv", dir / "b1.csv", dir / "b2.csv");
  same_files("bench summary", dir / "b1.json", dir / "b2.json");
  fs::remove_all(dir);

  std::string detail = ok ? "gen-scene, register, features and bench reruns" : "a command failed";
  for (const auto& m : mismatches) detail += "; differs: " + m;
  return {ok && mismatches.empty(), detail};
}

Verdict round_trips() {
  std::mt19937_64 rng(1111);
  std::uniform_int_distribution<int> count(0, 500);
  std::uniform_real_distribution<double> mag(-20, 20), unit(0, 1);
  std::uniform_real_distribution<float> fval(-1e4f, 1e4f);
  int bad = 0;
  constexpr int kCases = 200;
  for (int k = 0; k < kCases; ++k) {
    PointCloud c;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      c.points.push_back(test::random_point(rng) * std::pow(10.0, mag(rng)));
      if (k % 2) c.normals.push_back(test::random_point(rng).normalized());
    }
    const auto c2 = io::parse_ply(io::encode_ply(c));
    bad += c2.points != c.points || c2.normals != c.normals;

    FeatureSet f(1 + k % 64, static_cast<std::size_t>(n));
    for (auto& v : f.values) v = fval(rng);
    const auto f2 = io::parse_features(io::encode_features(f));
    bad += f2.dim != f.dim || f2.values != f.values;

    io::MatchFile m;
    m.mode = k % 2 ? io::MatchMode::kLifted : io::MatchMode::kPixel;
    for (int i = 0; i < n / 4; ++i) {
      if (m.mode == io::MatchMode::kPixel) {
        m.pixels.push_back({1e3 * unit(rng), 1e3 * unit(rng), 1e3 * unit(rng), 1e3 * unit(rng), unit(rng)});
      } else {
        m.lifted.push_back({test::random_point(rng, -1e3, 1e3), test::random_point(rng, -1e3, 1e3), unit(rng)});
      }
    }
    const auto m2 = io::parse_matches(io::format_matches(m));
    bool same = m2.mode == m.mode && m2.pixels.size() == m.pixels.size() && m2.lifted.size() == m.lifted.size();
    for (std::size_t i = 0; same && i < m.pixels.size(); ++i) {
      const auto &a = m.pixels[i], &b = m2.pixels[i];
      same = a.u1 == b.u1 && a.v1 == b.v1 && a.u2 == b.u2 && a.v2 == b.v2 && a.score == b.score;
    }
    for (std::size_t i = 0; same && i < m.lifted.size(); ++i) {
      const auto &a = m.lifted[i], &b = m2.lifted[i];
      same = a.src == b.src && a.dst == b.dst && a.weight == b.weight;
    }
    bad += !same;

    const auto t = test::random_transform(rng, 100.0);
    SceneSpec spec;
    spec.seed = rng();
    spec.match_noise_sigma = unit(rng) * 0.1;
    const auto tr = io::parse_truth(io::format_truth(t, &spec));
    bad += !(tr.transform == t) || io::spec_to_json(io::parse_spec(tr.spec_json)) != io::spec_to_json(spec);
  }
  return {bad == 0, fmt("%d fuzzed instances per format, %d mismatches", kCases, bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"exact recovery on noiseless scenes", exact_recovery},
      {"clique enumeration vs brute force", clique_oracle},
      {"weighted fit vs quaternion closed form", umeyama_oracle},
      {"chi-square zone coverage", chi_square_coverage},
      {"sigma estimate consistency", sigma_consistency},
      {"iteration trend", iteration_trend},
      {"guidance trend", guidance_trend},
      {"noise robustness trend", noise_trend},
      {"gamma_sq sweep", gamma_sweep},
      {"CLI determinism", determinism},
      {"format round-trips", round_trips},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s %zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                v.detail.c_str(), s);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
