#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/errors.hpp"

namespace tb {

/// Simple undirected graph. Edges are stored as (u, v) with u < v, sorted
/// lexicographically; that order fixes the leg encoding of graph tensors.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Graph(std::size_t vertex_count, std::vector<Edge> edges) : n_(vertex_count) {
    detail::require(n_ >= 1, "graph needs at least one vertex");
    for (auto& [u, v] : edges) {
      detail::require(u < n_ && v < n_, "edge endpoint out of range");
      detail::require(u != v, "self-loop (" + std::to_string(u) + "," + std::to_string(v) + ") not allowed");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    detail::require(std::adjacent_find(edges.begin(), edges.end()) == edges.end(), "duplicate edge");
    edges_ = std::move(edges);
  }

  static Graph complete(std::size_t k) {
    std::vector<Edge> e;
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t v = u + 1; v < k; ++v) e.emplace_back(u, v);
    return Graph(k, std::move(e));
  }

  static Graph cycle(std::size_t k) {
    detail::require(k >= 3, "cycle needs at least 3 vertices");
    std::vector<Edge> e;
    for (std::size_t u = 0; u < k; ++u) e.emplace_back(u, (u + 1) % k);
    return Graph(k, std::move(e));
  }

  std::size_t vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Indices into edges() of the edges incident to v, in edge order.
  std::vector<std::size_t> incident(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].first == v || edges_[e].second == v) out.push_back(e);
    return out;
  }

  std::size_t degree(std::size_t v) const { return incident(v).size(); }

  /// Number of edges with exactly one endpoint in the vertex set `side`.
  std::size_t crossing(const std::vector<bool>& side) const {
    std::size_t c = 0;
    for (const auto& [u, v] : edges_) c += side[u] != side[v];
    return c;
  }

  bool operator==(const Graph&) const = default;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

inline constexpr std::size_t kMaxCutVertices = 24;

struct CutValues {
  std::size_t min_cut = 0;
  std::size_t max_cut = 0;
};

/// Exact min and max cut over all 2^(n-1) - 1 bipartitions into two nonempty sides.
inline CutValues cut_values(const Graph& g) {
  const std::size_t n = g.vertex_count();
  detail::require(n >= 2, "cuts need at least two vertices");
  if (n > kMaxCutVertices)
    throw BudgetExceeded("exhaustive cut search limited to " + std::to_string(kMaxCutVertices) + " vertices");
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [u, v] : g.edges()) {
    adj[u] |= 1u << v;
    adj[v] |= 1u << u;
  }
  CutValues out{g.edge_count() + 1, 0};
  // Vertex 0 stays on side A; mask selects side B among vertices 1..n-1.
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t m = 1; m < limit; ++m) {
    const std::uint32_t side_b = m << 1;
    std::size_t cut = 0;
    for (std::uint32_t rest = side_b; rest != 0; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      cut += static_cast<std::size_t>(std::popcount(adj[v] & ~side_b));
    }
    out.min_cut = std::min(out.min_cut, cut);
    out.max_cut = std::max(out.max_cut, cut);
  }
  return out;
}

inline std::size_t max_cut(const Graph& g) { return cut_values(g).max_cut; }
inline std::size_t min_cut(const Graph& g) { return cut_values(g).min_cut; }

}  // namespace tb
