#pragma once

// Brute-force reference implementations used as test oracles. They share no
// code with the library beyond the SparseTensor container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "tensorbounds/linalg.hpp"
#include "tensorbounds/tensor.hpp"

namespace oracle {

using tb::Index;
using tb::Point;

/// Graph tensor by enumerating every edge assignment in [n]^E. Each leg's index
/// is the base-n number formed by the incident edge values in edge order.
inline std::set<Point> graph_support(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                     Index n) {
  auto sorted = edges;
  for (auto& [u, v] : sorted)
    if (u > v) std::swap(u, v);
  std::sort(sorted.begin(), sorted.end());
  std::set<Point> out;
  std::vector<Index> x(sorted.size(), 0);
  while (true) {
    Point p(vertices, 0);
    for (std::size_t v = 0; v < vertices; ++v)
      for (std::size_t e = 0; e < sorted.size(); ++e)
        if (sorted[e].first == v || sorted[e].second == v) p[v] = p[v] * n + x[e];
    out.insert(p);
    std::size_t e = 0;
    while (e < x.size() && ++x[e] == n) x[e++] = 0;
    if (e == x.size()) break;
  }
  return out;
}

/// Points of [n]^k whose symbol counts equal lambda.
inline std::set<Point> dicke_support(const std::vector<std::size_t>& lambda) {
  std::size_t k = 0;
  for (auto v : lambda) k += v;
  const Index n = lambda.size();
  std::set<Point> out;
  Point p(k, 0);
  while (true) {
    std::vector<std::size_t> c(n, 0);
    for (auto s : p) ++c[s];
    if (c == lambda) out.insert(p);
    std::size_t i = 0;
    while (i < k && ++p[i] == n) p[i++] = 0;
    if (i == k) break;
  }
  return out;
}

inline std::set<Point> support(const tb::SparseTensor& t) { return {t.points().begin(), t.points().end()}; }

/// Dense flattening matrix followed by Bareiss elimination.
inline std::size_t flattening_rank(const tb::SparseTensor& t, const std::vector<std::size_t>& left) {
  std::vector<bool> is_left(t.arity(), false);
  for (auto l : left) is_left[l] = true;
  std::map<Point, std::size_t> rows, cols;
  for (const auto& p : t.points()) {
    Point r, c;
    for (std::size_t i = 0; i < t.arity(); ++i) (is_left[i] ? r : c).push_back(p[i]);
    rows.emplace(r, rows.size());
    cols.emplace(c, cols.size());
  }
  std::vector<std::vector<tb::Integer>> m(rows.size(), std::vector<tb::Integer>(cols.size(), 0));
  for (std::size_t n = 0; n < t.size(); ++n) {
    Point r, c;
    for (std::size_t i = 0; i < t.arity(); ++i) (is_left[i] ? r : c).push_back(t.point(n)[i]);
    const auto& q = t.coeff(n);
    // Scale to integers per entry is fine for 0/1 and integer tensors used in tests.
    m[rows[r]][cols[c]] = q.get_num() / q.get_den();
  }
  return tb::rank_bareiss(std::move(m));
}

inline std::size_t max_cut(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << vertices); ++mask) {
    std::size_t c = 0;
    for (auto [u, v] : edges) c += ((mask >> u) & 1) != ((mask >> v) & 1);
    best = std::max(best, c);
  }
  return best;
}

/// Brute-force k-average-free test: all multisets of size k from s.
inline bool average_free(std::size_t k, const std::vector<std::int64_t>& s) {
  std::vector<std::size_t> idx(k, 0);
  std::function<bool(std::size_t, std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::size_t from, std::int64_t sum) {
    if (pos == k) {
      bool all_equal = true;
      for (std::size_t i = 1; i < k; ++i) all_equal = all_equal && s[idx[i]] == s[idx[0]];
      if (all_equal) return true;
      for (auto y : s)
        if (sum == static_cast<std::int64_t>(k) * y) return false;
      return true;
    }
    for (std::size_t i = from; i < s.size(); ++i) {
      idx[pos] = i;
      if (!rec(pos + 1, i, sum + s[i])) return false;
    }
    return true;
  };
  return rec(0, 0, 0);
}

/// Largest k-average-free subset of [1, n] by trying every subset.
inline std::size_t max_average_free(std::size_t k, std::int64_t n) {
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    const auto c = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (c <= best) continue;
    std::vector<std::int64_t> s;
    for (std::int64_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) s.push_back(i + 1);
    if (average_free(k, s)) best = c;
  }
  return best;
}

/// Number of set partitions of `points` refining the partition by coordinate `axis`.
inline std::size_t refining_partitions(const tb::SparseTensor& t, std::size_t axis) {
  const std::size_t n = t.size();
  std::vector<std::size_t> block(n, 0);
  std::size_t count = 0;
  // Restricted growth strings over all n points.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          if (block[a] == block[b] && t.point(a)[axis] != t.point(b)[axis]) return;
      ++count;
      return;
    }
    for (std::size_t b = 0; b <= used; ++b) {
      block[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
  return count;
}

inline double entropy(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log2(x);
  return h;
}

}  // namespace oracle
