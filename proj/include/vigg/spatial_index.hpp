#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vigg/geometry.hpp"

namespace vigg {

struct Neighbor {
  std::size_t index = 0;
  double distance_sq = 0.0;
};

/// Exact KD tree over fixed-dimension points stored row-major. Results are
/// identical to an exhaustive scan: radius queries are inclusive and return
/// ascending original indices, nearest queries break distance ties by the
/// smaller original index.
class KdTree {
 public:
  static constexpr std::size_t kLeafSize = 8;

  KdTree() = default;
  KdTree(std::vector<double> rows, std::size_t dim);

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return size() == 0; }

  std::vector<std::size_t> radius_sq(std::span<const double> center, double radius_sq) const;
  Neighbor nearest(std::span<const double> query) const;
  /// Up to k neighbors ordered by (distance, index).
  std::vector<Neighbor> knn(std::span<const double> query, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range in order_
    std::size_t split_dim = 0;
    double split_value = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  double dist_sq(std::size_t idx, std::span<const double> q) const;
  void radius_rec(int node, std::span<const double> q, double r2, std::vector<std::size_t>& out) const;
  void nearest_rec(int node, std::span<const double> q, Neighbor& best) const;
  void knn_rec(int node, std::span<const double> q, std::size_t k, std::vector<Neighbor>& heap) const;

  std::vector<double> data_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// KD tree over 3D points.
class SpatialIndex3 {
 public:
  SpatialIndex3() = default;
  explicit SpatialIndex3(std::span<const Point3> points);

  std::size_t size() const { return tree_.size(); }

  /// Indices with squared distance <= radius^2, ascending.
  std::vector<std::size_t> radius_query(const Point3& center, double radius) const;
  /// Indices with squared distance <= radius_sq, ascending.
  std::vector<std::size_t> radius_query_sq(const Point3& center, double radius_sq) const;
  /// Throws EmptyInput on an empty index.
  Neighbor nearest_query(const Point3& center) const;
  std::vector<Neighbor> knn_query(const Point3& center, std::size_t k) const;

 private:
  KdTree tree_;
};

/// Exact L2 nearest neighbor over fixed-dimension feature vectors. Uses a KD
/// tree up to 16 dimensions and a scan with partial-distance early exit above.
class FeatureIndex {
 public:
  static constexpr std::size_t kMaxTreeDim = 16;

  FeatureIndex(std::vector<double> rows, std::size_t dim);

  std::size_t size() const { return dim_ == 0 ? 0 : rows_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  /// Squared L2 distance in distance_sq. Throws EmptyInput on an empty index.
  Neighbor nearest(std::span<const double> query) const;

 private:
  std::vector<double> rows_;
  std::size_t dim_;
  KdTree tree_;
  bool use_tree_;
};

/// Squared L2 distance between equal-length vectors.
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace vigg
