#include "vigg/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

namespace vigg {

namespace {

bool is_rotation(const Matrix3& r) {
  if (!r.allFinite()) return false;
  const Matrix3 gram = r.transpose() * r;
  if ((gram - Matrix3::Identity()).cwiseAbs().maxCoeff() > RigidTransform::kOrthonormalTolerance) {
    return false;
  }
  return std::abs(r.determinant() - 1.0) <= RigidTransform::kOrthonormalTolerance;
}

}  // namespace

RigidTransform::RigidTransform(const Matrix3& rotation, const Point3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation_)) {
    throw InvalidArgument("rotation is not orthonormal with determinant +1");
  }
  if (!translation_.allFinite()) {
    throw InvalidArgument("translation is not finite");
  }
}

RigidTransform RigidTransform::from_matrix(const Matrix4& m) {
  const Eigen::RowVector4d last = m.row(3);
  if (last != Eigen::RowVector4d(0, 0, 0, 1)) {
    throw InvalidArgument("homogeneous matrix must end with row [0 0 0 1]");
  }
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

RigidTransform RigidTransform::from_axis_angle(const Point3& axis, double angle_rad,
                                               const Point3& translation) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw InvalidArgument("rotation axis must be nonzero");
  return {Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix(), translation};
}

Matrix4 RigidTransform::matrix() const {
  Matrix4 m = Matrix4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  const Matrix3 rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
  return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

std::optional<RigidTransform> try_fit_weighted(std::span<const Correspondence> cs) {
  if (cs.size() < 3) return std::nullopt;

  double total = 0.0;
  Point3 src_mean = Point3::Zero();
  Point3 dst_mean = Point3::Zero();
  for (const auto& c : cs) {
    total += c.weight;
    src_mean += c.weight * c.src;
    dst_mean += c.weight * c.dst;
  }
  if (!(total > 0.0)) return std::nullopt;
  src_mean /= total;
  dst_mean /= total;

  Matrix3 cov = Matrix3::Zero();
  for (const auto& c : cs) {
    cov.noalias() += c.weight * (c.src - src_mean) * (c.dst - dst_mean).transpose();
  }

  Eigen::JacobiSVD<Matrix3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Point3& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) < 1e-9 * sv(0)) return std::nullopt;

  const Matrix3& u = svd.matrixU();
  const Matrix3& v = svd.matrixV();
  Matrix3 d = Matrix3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Matrix3 rotation = v * d * u.transpose();
  return RigidTransform(rotation, dst_mean - rotation * src_mean);
}

RigidTransform fit_weighted(std::span<const Correspondence> cs) {
  if (cs.size() < 3) {
    throw DegenerateInput("weighted fit needs at least 3 correspondences, got " +
                          std::to_string(cs.size()));
  }
  auto fit = try_fit_weighted(cs);
  if (!fit) {
    throw DegenerateInput("weighted fit is degenerate (zero weight or collinear sources)");
  }
  return *fit;
}

double rotation_error(const RigidTransform& estimate, const RigidTransform& truth) {
  const double trace = (estimate.rotation().transpose() * truth.rotation()).trace();
  const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

double translation_error(const RigidTransform& estimate, const RigidTransform& truth) {
  return (estimate.translation() - truth.translation()).norm();
}

namespace {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw InvalidArgument("voxel size must be positive");

  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> cell_of;
  std::vector<Point3> sums;
  std::vector<std::size_t> counts;
  for (const auto& p : cloud.points) {
    const VoxelKey key{static_cast<std::int64_t>(std::floor(p.x() / voxel)),
                       static_cast<std::int64_t>(std::floor(p.y() / voxel)),
                       static_cast<std::int64_t>(std::floor(p.z() / voxel))};
    auto [it, inserted] = cell_of.try_emplace(key, sums.size());
    if (inserted) {
      sums.push_back(p);
      counts.push_back(1);
    } else {
      sums[it->second] += p;
      ++counts[it->second];
    }
  }

  PointCloud out;
  out.points.reserve(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    out.points.push_back(sums[i] / static_cast<double>(counts[i]));
  }
  return out;
}

void validate(const PointCloud& cloud) {
  for (const auto& p : cloud.points) {
    if (!p.allFinite()) throw InvalidArgument("point cloud has a non-finite coordinate");
  }
  if (cloud.normals.empty()) return;
  if (cloud.normals.size() != cloud.points.size()) {
    throw InvalidArgument("normal count does not match point count");
  }
  for (const auto& n : cloud.normals) {
    if (std::abs(n.norm() - 1.0) > 1e-6) throw InvalidArgument("normal is not unit length");
  }
}

}  // namespace vigg
