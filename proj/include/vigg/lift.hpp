#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vigg/geometry.hpp"

namespace vigg {

/// Pinhole intrinsics. No distortion model.
struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  /// Throws InvalidArgument unless fx, fy > 0 and the principal point lies
  /// inside the image.
  void validate() const;
  bool contains(double u, double v) const { return u >= 0.0 && v >= 0.0 && u < width && v < height; }
};

/// Row-major depth in meters; 0 or NaN marks an invalid pixel.
struct DepthImage {
  int width = 0, height = 0;
  std::vector<double> depth;

  double at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
};

struct PixelMatch {
  double u1 = 0.0, v1 = 0.0;
  double u2 = 0.0, v2 = 0.0;
  double score = 1.0;
};

/// Per-pixel index of the nearest projected cloud point, if one lands within
/// max_residual pixels of the pixel center.
struct ProjectionMap {
  static constexpr int kNone = -1;

  int width = 0, height = 0;
  double max_residual = 2.0;
  std::vector<int> index;        // kNone where unmapped
  std::vector<double> residual;  // pixels; meaningful where mapped

  std::optional<std::size_t> lookup(int x, int y) const {
    const int i = index[static_cast<std::size_t>(y) * width + x];
    if (i == kNone) return std::nullopt;
    return static_cast<std::size_t>(i);
  }
};

/// Nearest integer pixel of a subpixel coordinate, clamped into the image.
std::pair<int, int> nearest_pixel(double u, double v, int width, int height);

/// Back-projects the depth at the nearest integer pixel. Returns nothing for
/// invalid depth; throws OutOfBounds for a pixel outside the image.
std::optional<Point3> backproject(double u, double v, const DepthImage& depth,
                                  const CameraIntrinsics& k);

/// Pixel coordinates of a camera-frame point (z must be positive).
inline std::pair<double, double> project(const Point3& p, const CameraIntrinsics& k) {
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

/// Projects the cloud through `extrinsic` (cloud frame to camera frame) and the
/// intrinsics, culling points behind the camera or outside the image. Each
/// pixel maps to the projected point nearest its center within max_residual;
/// ties go to the smaller camera depth, then the smaller index.
ProjectionMap build_projection_map(const PointCloud& cloud, const RigidTransform& extrinsic,
                                   const CameraIntrinsics& k, double max_residual = 2.0);

struct DepthSource {
  const DepthImage* depth = nullptr;
  CameraIntrinsics intrinsics;
};

struct ProjectionSource {
  const ProjectionMap* map = nullptr;
  const PointCloud* cloud = nullptr;
};

using LiftSource = std::variant<DepthSource, ProjectionSource>;

/// 3D point for a pixel of the given source, if it lifts.
std::optional<Point3> lift_pixel(double u, double v, const LiftSource& source);

/// Visual correspondences for every match whose two endpoints lift; weight is
/// the match score. Input order is preserved and failed lifts are dropped.
CorrespondenceSet lift_matches(std::span<const PixelMatch> matches, const LiftSource& source1,
                               const LiftSource& source2);

}  // namespace vigg
