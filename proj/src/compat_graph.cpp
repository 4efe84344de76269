#include "vigg/compat_graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <queue>

namespace vigg {

CompatGraph::CompatGraph(std::size_t node_count)
    : n_(node_count), words_((node_count + 63) / 64), bits_(n_ * words_, 0) {}

void CompatGraph::add_edge(std::size_t i, std::size_t j) {
  if (i == j) return;
  bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  bits_[j * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
}

std::size_t CompatGraph::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(row(i)[w]));
  return d;
}

std::size_t CompatGraph::edge_count() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n_; ++i) total += degree(i);
  return total / 2;
}

CompatGraph build_graph(const CorrespondenceSet& c, double compat_threshold) {
  if (!(compat_threshold > 0.0)) throw InvalidArgument("compatibility threshold must be positive");
  CompatGraph g(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double ds = (c[i].src - c[j].src).norm();
      const double dd = (c[i].dst - c[j].dst).norm();
      if (std::abs(ds - dd) <= compat_threshold) g.add_edge(i, j);
    }
  }
  return g;
}

bool clique_before(const Clique& a, const Clique& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a < b;
}

namespace {

using Bits = std::vector<std::uint64_t>;

std::vector<std::size_t> degeneracy_order(const CompatGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> degree(n);
  using Entry = std::pair<std::size_t, std::size_t>;  // (degree, node)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = g.degree(v);
    heap.emplace(degree[v], v);
  }
  std::vector<bool> removed(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (removed[v] || d != degree[v]) continue;
    removed[v] = true;
    order.push_back(v);
    for (std::size_t u = 0; u < n; ++u) {
      if (!removed[u] && g.adjacent(v, u)) heap.emplace(--degree[u], u);
    }
  }
  return order;
}

class BronKerbosch {
 public:
  BronKerbosch(const CompatGraph& g, std::size_t min_size, std::size_t limit)
      : g_(g), words_(g.words()), min_size_(min_size), limit_(limit) {}

  CliqueEnumeration run() {
    const std::size_t n = g_.size();
    const auto order = degeneracy_order(g_);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

    for (std::size_t i = 0; i < n && !stop_; ++i) {
      const std::size_t v = order[i];
      Bits p(words_, 0), x(words_, 0);
      for (std::size_t u = 0; u < n; ++u) {
        if (!g_.adjacent(v, u)) continue;
        if (position[u] > i) {
          set(p, u);
        } else {
          set(x, u);
        }
      }
      r_.assign(1, static_cast<std::uint32_t>(v));
      expand(p, x);
    }

    CliqueEnumeration out;
    out.truncated = stop_;
    std::sort(found_.begin(), found_.end(), clique_before);
    if (found_.size() > limit_) found_.resize(limit_);
    out.cliques = std::move(found_);
    return out;
  }

 private:
  static void set(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }
  static void reset(Bits& b, std::size_t i) { b[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

  static std::size_t count(const Bits& b) {
    std::size_t c = 0;
    for (auto w : b) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  static bool none(const Bits& b) {
    return std::all_of(b.begin(), b.end(), [](std::uint64_t w) { return w == 0; });
  }

  void expand(Bits& p, Bits& x) {
    if (none(p)) {
      if (none(x) && r_.size() >= min_size_) report();
      return;
    }
    if (r_.size() + count(p) < min_size_) return;

    // Tomita pivot: the node of P u X covering most of P.
    std::size_t pivot = 0;
    std::size_t best = 0;
    bool have_pivot = false;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = p[w] | x[w];
      while (bits) {
        const std::size_t u = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        const std::uint64_t* nu = g_.row(u);
        std::size_t c = 0;
        for (std::size_t k = 0; k < words_; ++k) c += static_cast<std::size_t>(std::popcount(p[k] & nu[k]));
        if (!have_pivot || c > best) {
          pivot = u;
          best = c;
          have_pivot = true;
        }
      }
    }

    const std::uint64_t* np = g_.row(pivot);
    Bits candidates(words_);
    for (std::size_t k = 0; k < words_; ++k) candidates[k] = p[k] & ~np[k];

    Bits next_p(words_), next_x(words_);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = candidates[w];
      while (bits) {
        const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        const std::uint64_t* nv = g_.row(v);
        for (std::size_t k = 0; k < words_; ++k) {
          next_p[k] = p[k] & nv[k];
          next_x[k] = x[k] & nv[k];
        }
        r_.push_back(static_cast<std::uint32_t>(v));
        expand(next_p, next_x);
        r_.pop_back();
        if (stop_) return;
        reset(p, v);
        set(x, v);
      }
    }
  }

  void report() {
    Clique c = r_;
    std::sort(c.begin(), c.end());
    found_.push_back(std::move(c));
    if (found_.size() > limit_) stop_ = true;
  }

  const CompatGraph& g_;
  std::size_t words_;
  std::size_t min_size_;
  std::size_t limit_;
  Clique r_;
  std::vector<Clique> found_;
  bool stop_ = false;
};

}  // namespace

CliqueEnumeration enumerate_maximal_cliques(const CompatGraph& g, std::size_t min_size,
                                            std::size_t max_cliques) {
  if (min_size < 3) throw InvalidArgument("minimum clique size must be at least 3");
  if (max_cliques == 0) throw InvalidArgument("max_cliques must be positive");
  return BronKerbosch(g, min_size, max_cliques).run();
}

}  // namespace vigg
