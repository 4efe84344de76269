#include "vigg/lift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vigg {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidArgument("image dimensions must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw InvalidArgument("principal point lies outside the image");
  }
}

std::pair<int, int> nearest_pixel(double u, double v, int width, int height) {
  const int x = std::clamp(static_cast<int>(std::lround(u)), 0, width - 1);
  const int y = std::clamp(static_cast<int>(std::lround(v)), 0, height - 1);
  return {x, y};
}

std::optional<Point3> backproject(double u, double v, const DepthImage& depth,
                                  const CameraIntrinsics& k) {
  if (!(u >= 0.0 && v >= 0.0 && u < depth.width && v < depth.height)) {
    throw OutOfBounds("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                      ") is outside the depth image");
  }
  const auto [x, y] = nearest_pixel(u, v, depth.width, depth.height);
  const double d = depth.at(x, y);
  if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
  return Point3((u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d);
}

ProjectionMap build_projection_map(const PointCloud& cloud, const RigidTransform& extrinsic,
                                   const CameraIntrinsics& k, double max_residual) {
  k.validate();
  ProjectionMap map;
  map.width = k.width;
  map.height = k.height;
  map.max_residual = max_residual;
  const std::size_t pixels = static_cast<std::size_t>(k.width) * k.height;
  map.index.assign(pixels, ProjectionMap::kNone);
  map.residual.assign(pixels, 0.0);
  std::vector<double> best_z(pixels, 0.0);

  const int reach = static_cast<int>(std::ceil(max_residual));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 pc = extrinsic.apply(cloud.points[i]);
    if (!(pc.z() > 0.0)) continue;
    const auto [u, v] = project(pc, k);
    if (!k.contains(u, v)) continue;

    const int x0 = std::max(0, static_cast<int>(std::floor(u)) - reach);
    const int x1 = std::min(k.width - 1, static_cast<int>(std::ceil(u)) + reach);
    const int y0 = std::max(0, static_cast<int>(std::floor(v)) - reach);
    const int y1 = std::min(k.height - 1, static_cast<int>(std::ceil(v)) + reach);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double r = std::hypot(u - x, v - y);
        if (r > max_residual) continue;
        const std::size_t p = static_cast<std::size_t>(y) * k.width + x;
        const int cur = map.index[p];
        // Points arrive in ascending index order, so strict comparisons keep
        // the smaller index on a full tie.
        const bool better = cur == ProjectionMap::kNone || r < map.residual[p] ||
                            (r == map.residual[p] && pc.z() < best_z[p]);
        if (better) {
          map.index[p] = static_cast<int>(i);
          map.residual[p] = r;
          best_z[p] = pc.z();
        }
      }
    }
  }
  return map;
}

std::optional<Point3> lift_pixel(double u, double v, const LiftSource& source) {
  if (const auto* ds = std::get_if<DepthSource>(&source)) {
    if (!(u >= 0.0 && v >= 0.0 && u < ds->depth->width && v < ds->depth->height)) {
      return std::nullopt;
    }
    return backproject(u, v, *ds->depth, ds->intrinsics);
  }
  const auto& ps = std::get<ProjectionSource>(source);
  if (!(u >= 0.0 && v >= 0.0 && u < ps.map->width && v < ps.map->height)) return std::nullopt;
  const auto [x, y] = nearest_pixel(u, v, ps.map->width, ps.map->height);
  const auto idx = ps.map->lookup(x, y);
  if (!idx) return std::nullopt;
  return ps.cloud->points[*idx];
}

CorrespondenceSet lift_matches(std::span<const PixelMatch> matches, const LiftSource& source1,
                               const LiftSource& source2) {
  CorrespondenceSet out;
  for (const auto& m : matches) {
    const auto a = lift_pixel(m.u1, m.v1, source1);
    if (!a) continue;
    const auto b = lift_pixel(m.u2, m.v2, source2);
    if (!b) continue;
    out.push_back({*a, *b, m.score, Provenance::kVisual});
  }
  return out;
}

}  // namespace vigg
