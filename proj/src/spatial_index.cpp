#include "vigg/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vigg {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.distance_sq < b.distance_sq || (a.distance_sq == b.distance_sq && a.index < b.index);
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

KdTree::KdTree(std::vector<double> rows, std::size_t dim) : data_(std::move(rows)), dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("KD tree dimension must be positive");
  if (data_.size() % dim_ != 0) throw InvalidArgument("KD tree data is not a whole number of rows");
  order_.resize(size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) {
    nodes_.reserve(2 * order_.size() / kLeafSize + 1);
    build(0, order_.size());
  }
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = data_[order_[i] * dim_ + d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  auto key_less = [&](std::size_t a, std::size_t b) {
    const double va = data_[a * dim_ + best_dim];
    const double vb = data_[b * dim_ + best_dim];
    return va < vb || (va == vb && a < b);
  };
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), key_less);

  nodes_[id].split_dim = best_dim;
  nodes_[id].split_value = data_[order_[mid] * dim_ + best_dim];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::dist_sq(std::size_t idx, std::span<const double> q) const {
  return squared_distance({data_.data() + idx * dim_, dim_}, q);
}

std::vector<std::size_t> KdTree::radius_sq(std::span<const double> center, double r2) const {
  std::vector<std::size_t> out;
  if (!nodes_.empty() && r2 >= 0.0) radius_rec(0, center, r2, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::radius_rec(int node_id, std::span<const double> q, double r2,
                        std::vector<std::size_t>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      if (dist_sq(order_[i], q) <= r2) out.push_back(order_[i]);
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split_value;
  if (diff <= 0.0 || diff * diff <= r2) radius_rec(node.left, q, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) radius_rec(node.right, q, r2, out);
}

Neighbor KdTree::nearest(std::span<const double> query) const {
  if (empty()) throw EmptyInput("nearest query on an empty index");
  Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  nearest_rec(0, query, best);
  return best;
}

void KdTree::nearest_rec(int node_id, std::span<const double> q, Neighbor& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{order_[i], dist_sq(order_[i], q)};
      if (closer(cand, best)) best = cand;
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split_value;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  nearest_rec(near, q, best);
  if (diff * diff <= best.distance_sq) nearest_rec(far, q, best);
}

std::vector<Neighbor> KdTree::knn(std::span<const double> query, std::size_t k) const {
  std::vector<Neighbor> heap;
  if (k == 0 || empty()) return heap;
  heap.reserve(k + 1);
  knn_rec(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

void KdTree::knn_rec(int node_id, std::span<const double> q, std::size_t k,
                     std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{order_[i], dist_sq(order_[i], q)};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split_value;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  knn_rec(near, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.front().distance_sq) knn_rec(far, q, k, heap);
}

namespace {

std::vector<double> flatten(std::span<const Point3> points) {
  std::vector<double> rows;
  rows.reserve(points.size() * 3);
  for (const auto& p : points) {
    rows.push_back(p.x());
    rows.push_back(p.y());
    rows.push_back(p.z());
  }
  return rows;
}

}  // namespace

SpatialIndex3::SpatialIndex3(std::span<const Point3> points) : tree_(flatten(points), 3) {}

std::vector<std::size_t> SpatialIndex3::radius_query(const Point3& center, double radius) const {
  if (radius < 0.0) return {};
  return radius_query_sq(center, radius * radius);
}

std::vector<std::size_t> SpatialIndex3::radius_query_sq(const Point3& center, double radius_sq) const {
  return tree_.radius_sq({center.data(), 3}, radius_sq);
}

Neighbor SpatialIndex3::nearest_query(const Point3& center) const {
  return tree_.nearest({center.data(), 3});
}

std::vector<Neighbor> SpatialIndex3::knn_query(const Point3& center, std::size_t k) const {
  return tree_.knn({center.data(), 3}, k);
}

FeatureIndex::FeatureIndex(std::vector<double> rows, std::size_t dim)
    : rows_(std::move(rows)), dim_(dim), use_tree_(dim <= kMaxTreeDim) {
  if (dim_ == 0) throw InvalidArgument("feature dimension must be positive");
  if (rows_.size() % dim_ != 0) throw InvalidArgument("feature data is not a whole number of rows");
  if (use_tree_) tree_ = KdTree(rows_, dim_);
}

Neighbor FeatureIndex::nearest(std::span<const double> query) const {
  if (size() == 0) throw EmptyInput("nearest query on an empty feature index");
  if (use_tree_) return tree_.nearest(query);

  // Scan in index order; strict comparisons keep the smallest index on ties.
  constexpr std::size_t kBlock = 8;
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows_.data() + i * dim_;
    double s = 0.0;
    std::size_t k = 0;
    bool pruned = false;
    while (k < dim_) {
      const std::size_t stop = std::min(dim_, k + kBlock);
      for (; k < stop; ++k) {
        const double d = query[k] - row[k];
        s += d * d;
      }
      if (s > best.distance_sq) {
        pruned = true;
        break;
      }
    }
    if (!pruned && s < best.distance_sq) best = {i, s};
  }
  return best;
}

}  // namespace vigg
