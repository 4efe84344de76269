#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <span>
#include <vector>

#include "vigg/error.hpp"

namespace vigg {

using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;

struct PointCloud {
  std::vector<Point3> points;
  /// Empty, or one unit normal per point.
  std::vector<Point3> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty() && normals.size() == points.size(); }
};

/// Element of SE(3). The rotation is checked for orthonormality and a
/// positive determinant at construction.
class RigidTransform {
 public:
  static constexpr double kOrthonormalTolerance = 1e-9;

  RigidTransform() : rotation_(Matrix3::Identity()), translation_(Point3::Zero()) {}
  RigidTransform(const Matrix3& rotation, const Point3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Matrix4& m);
  static RigidTransform from_axis_angle(const Point3& axis, double angle_rad,
                                        const Point3& translation = Point3::Zero());
  static RigidTransform from_translation(const Point3& t) { return {Matrix3::Identity(), t}; }

  const Matrix3& rotation() const { return rotation_; }
  const Point3& translation() const { return translation_; }
  Matrix4 matrix() const;

  Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }
  Point3 operator()(const Point3& p) const { return apply(p); }

  RigidTransform inverse() const;
  /// (*this * other)(p) == this->apply(other.apply(p)).
  RigidTransform operator*(const RigidTransform& other) const;

  bool operator==(const RigidTransform& o) const {
    return rotation_ == o.rotation_ && translation_ == o.translation_;
  }

 private:
  Matrix3 rotation_;
  Point3 translation_;
};

inline Point3 apply_transform(const RigidTransform& t, const Point3& p) { return t.apply(p); }
inline RigidTransform invert(const RigidTransform& t) { return t.inverse(); }
inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) { return a * b; }

enum class Provenance { kVisual, kGeometric };

struct Correspondence {
  Point3 src = Point3::Zero();
  Point3 dst = Point3::Zero();
  double weight = 1.0;
  Provenance provenance = Provenance::kVisual;
};

using CorrespondenceSet = std::vector<Correspondence>;

/// Weighted rigid fit: argmin over T of sum w_i |T(src_i) - dst_i|^2.
/// Throws DegenerateInput for fewer than 3 correspondences, zero total weight,
/// or collinear / coincident sources (second singular value below 1e-9 of the
/// first).
RigidTransform fit_weighted(std::span<const Correspondence> correspondences);

/// Same as fit_weighted but reports degeneracy as an empty optional.
std::optional<RigidTransform> try_fit_weighted(std::span<const Correspondence> correspondences);

/// Angle of the relative rotation, in degrees, within [0, 180].
double rotation_error(const RigidTransform& estimate, const RigidTransform& truth);
/// Euclidean distance between the translations.
double translation_error(const RigidTransform& estimate, const RigidTransform& truth);

/// One centroid per occupied voxel cell, in order of first occupancy.
/// Normals are dropped. Throws InvalidArgument when voxel <= 0.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

/// Throws InvalidArgument if normals are present but mismatched in count or
/// not unit length within 1e-6, or if any coordinate is non-finite.
void validate(const PointCloud& cloud);

}  // namespace vigg
