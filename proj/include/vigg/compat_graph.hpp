#pragma once

#include <cstdint>
#include <vector>

#include "vigg/geometry.hpp"

namespace vigg {

/// Undirected graph over correspondences (node i is correspondence i) with one
/// packed bitset row per node.
class CompatGraph {
 public:
  CompatGraph() = default;
  explicit CompatGraph(std::size_t node_count);

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_; }
  bool adjacent(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }
  /// Ignores self-loops.
  void add_edge(std::size_t i, std::size_t j);
  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * words_; }

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Edge (i, j) iff | |src_i - src_j| - |dst_i - dst_j| | <= compat_threshold.
/// Throws InvalidArgument when compat_threshold <= 0.
CompatGraph build_graph(const CorrespondenceSet& c, double compat_threshold);

/// Node indices in strictly ascending order.
using Clique = std::vector<std::uint32_t>;

struct CliqueEnumeration {
  /// Maximal cliques ordered by size descending, then lexicographically.
  std::vector<Clique> cliques;
  /// Enumeration stopped after finding more than max_cliques cliques; the
  /// max_cliques largest of those found are kept.
  bool truncated = false;
};

/// Bron-Kerbosch with pivoting over a degeneracy ordering. Only cliques with at
/// least min_size nodes are reported. Throws InvalidArgument when
/// min_size < 3 or max_cliques == 0.
CliqueEnumeration enumerate_maximal_cliques(const CompatGraph& g, std::size_t min_size,
                                            std::size_t max_cliques);

/// Canonical clique order: larger first, then lexicographically smaller.
bool clique_before(const Clique& a, const Clique& b);

}  // namespace vigg
