#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vigg/features.hpp"
#include "vigg/geometry.hpp"
#include "vigg/lift.hpp"
#include "vigg/synth.hpp"

namespace vigg::io {

namespace fs = std::filesystem;

/// Whole file as bytes. Throws IoError.
std::string read_file(const fs::path& path);
/// Throws IoError.
void write_file(const fs::path& path, std::string_view bytes);

// PLY. The reader accepts ascii and binary_little_endian files whose vertex
// element carries float or double x/y/z (and optionally nx/ny/nz). Other
// elements are skipped. The writer emits binary little-endian doubles so a
// write-read cycle is exact.

PointCloud parse_ply(std::string_view bytes, std::string_view name = "<memory>");
std::string encode_ply(const PointCloud& cloud);
PointCloud read_ply(const fs::path& path);
void write_ply(const fs::path& path, const PointCloud& cloud);

// VGF1 feature files: "VGF1", u32 count, u32 dim, then count * dim float32
// values, all little-endian and row-major.

FeatureSet parse_features(std::string_view bytes, std::string_view name = "<memory>");
std::string encode_features(const FeatureSet& f);
FeatureSet read_features(const fs::path& path);
void write_features(const fs::path& path, const FeatureSet& f);

// VGM1 match files: a "# vigg-matches v1 mode=pixel|lifted" header, then one
// match per line, "u1 v1 u2 v2 score" or "x1 y1 z1 x2 y2 z2 score". Blank
// lines and further '#' lines are ignored.

enum class MatchMode { kPixel, kLifted };

struct MatchFile {
  MatchMode mode = MatchMode::kLifted;
  std::vector<PixelMatch> pixels;  // kPixel
  CorrespondenceSet lifted;        // kLifted, visual provenance, weight = score
};

MatchFile parse_matches(std::string_view text, std::string_view name = "<memory>");
std::string format_matches(const MatchFile& m);
MatchFile read_matches(const fs::path& path);
void write_matches(const fs::path& path, const MatchFile& m);

// Depth images: an ascii "width height scale" line, then width * height
// little-endian u16 values row by row. Depth in meters is raw / scale and a
// raw 0 is invalid.

DepthImage parse_depth(std::string_view bytes, std::string_view name = "<memory>");
/// Throws InvalidArgument when a depth is not representable at `scale`.
std::string encode_depth(const DepthImage& depth, double scale);
DepthImage read_depth(const fs::path& path);

/// Intrinsics plus the cloud-to-camera extrinsic used by projective lifting.
struct Camera {
  CameraIntrinsics intrinsics;
  RigidTransform extrinsic;
};

/// JSON object {fx, fy, cx, cy, width, height, extrinsic?: 16 numbers, row-major}.
Camera parse_camera(std::string_view json, std::string_view name = "<memory>");
std::string format_camera(const Camera& c);

/// JSON {"source": camera, "target": camera}; a single camera object is used
/// for both frames.
std::pair<Camera, Camera> read_cameras(const fs::path& path);

/// truth.json: {"transform": 16 numbers, row-major, "spec": {...}}.
struct Truth {
  RigidTransform transform;
  std::string spec_json;  // compact echo of the generating spec, or "null"
};

Truth parse_truth(std::string_view json, std::string_view name = "<memory>");
std::string format_truth(const RigidTransform& t, const SceneSpec* spec = nullptr);
Truth read_truth(const fs::path& path);

std::string spec_to_json(const SceneSpec& spec);
/// Fields present in the JSON object override those of `base`.
SceneSpec parse_spec(std::string_view json, const SceneSpec& base = {},
                     std::string_view name = "<memory>");

/// Writes cloud_{p,q}.ply, features_{p,q}.vgf, matches.vgm (lifted) and
/// truth.json into `dir`, creating it if needed.
void write_scene_bundle(const fs::path& dir, const Scene& scene);

}  // namespace vigg::io
