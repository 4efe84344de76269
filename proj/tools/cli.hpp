#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigg/pipeline.hpp"

namespace vigg::cli {

namespace fs = std::filesystem;

/// One registration pair of a manifest. Paths are absolute or relative to the
/// manifest's directory; optional entries are empty.
struct PairEntry {
  std::string name;
  fs::path cloud_p, cloud_q;
  fs::path features_p, features_q;
  fs::path matches;
  fs::path cameras;
  fs::path depth_p, depth_q;
  fs::path truth;
};

struct RunManifest {
  std::vector<PairEntry> pairs;
  /// Raw JSON object of config overrides, or empty.
  std::string config_json;
};

/// Throws FormatError.
RunManifest parse_manifest(std::string_view json, const fs::path& base_dir,
                           std::string_view name = "<memory>");

/// Applies the fields of a JSON config object over `base`. Throws FormatError.
PipelineConfig apply_config_json(std::string_view json, PipelineConfig base,
                                 std::string_view name = "<memory>");

/// Loaded inputs of one pair, ready for register_pair.
struct PairInputs {
  PointCloud p, q;
  FeatureSet fp, fq;
  CorrespondenceSet c_vis;
  std::optional<RigidTransform> truth;
};

/// Reads every file of the pair. Feature files that are named must exist;
/// when none are named, FPFH descriptors are computed for `voxel`. Throws
/// IoError or FormatError.
PairInputs load_pair(const PairEntry& entry, double voxel);

/// Standard file names of a scene bundle directory.
PairEntry bundle_entry(const fs::path& dir);

/// JSON registration report. Timings are included only on request so that
/// reports of identical runs are byte-identical.
std::string report_json(const RegistrationResult& r, const PipelineConfig& cfg,
                        const std::optional<RigidTransform>& truth, bool timings);

/// Entry point of the command-line tool. Returns the process exit code: 0 on
/// success, 2 on a registration failure, 1 on I/O or format errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vigg::cli
