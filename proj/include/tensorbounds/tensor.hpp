#pragma once

// Sparse k-leg tensors with exact rational coefficients, the tensor families
// used throughout the library, tensor products, flattenings and block
// (outer) structure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/errors.hpp"
#include "tensorbounds/graph.hpp"
#include "tensorbounds/linalg.hpp"

namespace tb {

using Index = std::uint64_t;
using Point = std::vector<Index>;

/// Largest support materialized by any constructor or product.
inline constexpr std::size_t kMaxSupport = 10'000'000;

namespace detail {

inline Index checked_mul(Index a, Index b, const char* what) {
  if (a != 0 && b > std::numeric_limits<Index>::max() / a) throw BudgetExceeded(std::string(what) + ": index overflow");
  return a * b;
}

}  // namespace detail

class SparseTensor {
 public:
  SparseTensor() = default;

  explicit SparseTensor(std::vector<Index> dims) : dims_(std::move(dims)) {}

  /// Duplicate points are summed; zero coefficients are dropped.
  SparseTensor(std::vector<Index> dims, std::vector<std::pair<Point, Rational>> entries) : dims_(std::move(dims)) {
    for (const auto& [p, c] : entries) check_point(p);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [p, c] : entries) {
      if (!points_.empty() && points_.back() == p) {
        coeffs_.back() += c;
        continue;
      }
      points_.push_back(std::move(p));
      coeffs_.push_back(c);
    }
    std::size_t w = 0;
    for (std::size_t r = 0; r < points_.size(); ++r) {
      if (coeffs_[r] == 0) continue;
      if (w != r) {
        points_[w] = std::move(points_[r]);
        coeffs_[w] = coeffs_[r];
      }
      ++w;
    }
    points_.resize(w);
    coeffs_.resize(w);
  }

  /// 0/1 tensor with the given support.
  static SparseTensor indicator(std::vector<Index> dims, std::vector<Point> points) {
    std::vector<std::pair<Point, Rational>> e;
    e.reserve(points.size());
    for (auto& p : points) e.emplace_back(std::move(p), Rational(1));
    SparseTensor t(std::move(dims), std::move(e));
    // Indicator semantics: duplicates collapse rather than add.
    for (auto& c : t.coeffs_) c = 1;
    return t;
  }

  std::size_t arity() const { return dims_.size(); }
  const std::vector<Index>& dims() const { return dims_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  const Rational& coeff(std::size_t i) const { return coeffs_[i]; }

  std::optional<std::size_t> find(const Point& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - points_.begin());
  }

  /// Indices that occur in the support on the given leg, ascending.
  std::vector<Index> occurring(std::size_t leg) const {
    std::vector<Index> out;
    for (const auto& p : points_) out.push_back(p[leg]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool operator==(const SparseTensor&) const = default;

 private:
  void check_point(const Point& p) const {
    detail::require(p.size() == dims_.size(), "point arity does not match tensor arity");
    for (std::size_t i = 0; i < p.size(); ++i)
      detail::require(p[i] < dims_[i], "coordinate " + std::to_string(p[i]) + " out of range on leg " + std::to_string(i));
  }

  std::vector<Index> dims_;
  std::vector<Point> points_;  // sorted, unique
  std::vector<Rational> coeffs_;
};

/// Graph tensor with edge e ranging over [weights[e]] (weights aligned with
/// g.edges()). Leg v indexes the tuple of symbols on the edges incident to v,
/// in edge order, as a mixed-radix number with the first edge most significant.
inline SparseTensor graph_tensor_weighted(const Graph& g, const std::vector<Index>& weights) {
  detail::require(weights.size() == g.edge_count(), "missing edge weight: need one weight per edge");
  for (auto w : weights) detail::require(w >= 1, "edge weights must be >= 1");
  const std::size_t k = g.vertex_count();
  std::vector<std::vector<std::size_t>> inc(k);
  std::vector<Index> dims(k, 1);
  for (std::size_t v = 0; v < k; ++v) {
    inc[v] = g.incident(v);
    for (auto e : inc[v]) dims[v] = detail::checked_mul(dims[v], weights[e], "graph tensor");
  }
  Index total = 1;
  for (auto w : weights) {
    total = detail::checked_mul(total, w, "graph tensor");
    if (total > kMaxSupport) throw BudgetExceeded("graph tensor support exceeds " + std::to_string(kMaxSupport));
  }
  std::vector<Point> pts;
  pts.reserve(total);
  std::vector<Index> sym(weights.size(), 0);
  for (Index n = 0; n < total; ++n) {
    Point p(k, 0);
    for (std::size_t v = 0; v < k; ++v)
      for (auto e : inc[v]) p[v] = p[v] * weights[e] + sym[e];
    pts.push_back(std::move(p));
    for (std::size_t e = weights.size(); e-- > 0;) {
      if (++sym[e] < weights[e]) break;
      sym[e] = 0;
    }
  }
  return SparseTensor::indicator(std::move(dims), std::move(pts));
}

inline SparseTensor graph_tensor_weighted(const Graph& g, const std::map<Graph::Edge, Index>& weights) {
  std::vector<Index> w;
  for (const auto& e : g.edges()) {
    auto it = weights.find(e);
    if (it == weights.end())
      throw InvalidArgument("missing edge weight for (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
    w.push_back(it->second);
  }
  return graph_tensor_weighted(g, w);
}

inline SparseTensor graph_tensor(const Graph& g, Index n) {
  detail::require(n >= 1, "alphabet size must be >= 1");
  return graph_tensor_weighted(g, std::vector<Index>(g.edge_count(), n));
}

/// Weight-lambda Dicke tensor: symbol j appears lambda[j] times in every support point.
inline SparseTensor dicke_tensor(const std::vector<std::size_t>& lambda) {
  detail::require(!lambda.empty(), "partition must be nonempty");
  Point base;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    detail::require(lambda[j] >= 1, "partition parts must be >= 1");
    base.insert(base.end(), lambda[j], static_cast<Index>(j));
  }
  std::vector<Point> pts;
  do {
    pts.push_back(base);
    if (pts.size() > kMaxSupport) throw BudgetExceeded("Dicke support too large");
  } while (std::next_permutation(base.begin(), base.end()));
  return SparseTensor::indicator(std::vector<Index>(base.size(), lambda.size()), std::move(pts));
}

/// W-state tensor on k legs: one leg carries symbol 1, the rest 0.
inline SparseTensor wstate_tensor(std::size_t k) {
  detail::require(k >= 2, "W-state needs k >= 2");
  return dicke_tensor({k - 1, 1});
}

inline SparseTensor unit_tensor(Index r, std::size_t k) {
  detail::require(r >= 1 && k >= 1, "unit tensor needs r >= 1 and k >= 1");
  detail::require(r <= kMaxSupport, "unit tensor too large");
  std::vector<Point> pts;
  for (Index i = 0; i < r; ++i) pts.emplace_back(k, i);
  return SparseTensor::indicator(std::vector<Index>(k, r), std::move(pts));
}

/// Generalized Coppersmith-Winograd tensor: exactly two legs carry the same
/// nonzero symbol in 1..q, all other legs carry 0.
inline SparseTensor cw_tensor(Index q, std::size_t k) {
  detail::require(q >= 1 && k >= 2, "CW tensor needs q >= 1 and k >= 2");
  std::vector<Point> pts;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      for (Index s = 1; s <= q; ++s) {
        Point p(k, 0);
        p[a] = p[b] = s;
        pts.push_back(std::move(p));
      }
  return SparseTensor::indicator(std::vector<Index>(k, q + 1), std::move(pts));
}

/// Leg-wise Kronecker product: on leg i the combined index is a_i * dim_b_i + b_i.
inline SparseTensor tensor_product(const SparseTensor& a, const SparseTensor& b) {
  detail::require(a.arity() == b.arity(), "tensor product needs equal arity");
  if (a.size() != 0 && b.size() > kMaxSupport / a.size())
    throw BudgetExceeded("tensor product support exceeds " + std::to_string(kMaxSupport));
  const std::size_t k = a.arity();
  std::vector<Index> dims(k);
  for (std::size_t i = 0; i < k; ++i) dims[i] = detail::checked_mul(a.dims()[i], b.dims()[i], "tensor product");
  std::vector<std::pair<Point, Rational>> e;
  e.reserve(a.size() * b.size());
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < b.size(); ++y) {
      Point p(k);
      for (std::size_t i = 0; i < k; ++i) p[i] = a.point(x)[i] * b.dims()[i] + b.point(y)[i];
      e.emplace_back(std::move(p), a.coeff(x) * b.coeff(y));
    }
  return SparseTensor(std::move(dims), std::move(e));
}

inline SparseTensor tensor_power(const SparseTensor& a, std::size_t n) {
  double est = 1;
  for (std::size_t i = 0; i < n; ++i) est *= static_cast<double>(a.size());
  if (est > static_cast<double>(kMaxSupport))
    throw BudgetExceeded("tensor power support |supp|^N exceeds " + std::to_string(kMaxSupport));
  SparseTensor out = unit_tensor(1, a.arity());
  for (std::size_t i = 0; i < n; ++i) out = tensor_product(out, a);
  return out;
}

/// Exact rank over Q of the matrix grouping `legs_left` into rows and the
/// remaining legs into columns.
inline std::size_t flattening_rank(const SparseTensor& t, const std::vector<std::size_t>& legs_left) {
  const std::size_t k = t.arity();
  std::vector<bool> left(k, false);
  for (auto l : legs_left) {
    detail::require(l < k, "flattening leg out of range");
    detail::require(!left[l], "duplicate leg in flattening");
    left[l] = true;
  }
  detail::require(!legs_left.empty() && legs_left.size() < k, "flattening needs a nonempty proper subset of legs");
  std::map<Point, std::size_t> row_id, col_id;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
  for (std::size_t n = 0; n < t.size(); ++n) {
    Point r, c;
    for (std::size_t i = 0; i < k; ++i) (left[i] ? r : c).push_back(t.point(n)[i]);
    auto [rit, rnew] = row_id.try_emplace(std::move(r), rows.size());
    if (rnew) rows.emplace_back();
    auto [cit, cnew] = col_id.try_emplace(std::move(c), col_id.size());
    rows[rit->second].emplace_back(cit->second, t.coeff(n));
  }
  std::vector<SparseRow> int_rows;
  int_rows.reserve(rows.size());
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    Integer lcm = 1;
    for (const auto& [c, v] : row) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
    SparseRow sr;
    for (const auto& [c, v] : row) sr.emplace_back(c, v.get_num() * (lcm / v.get_den()));
    int_rows.push_back(std::move(sr));
  }
  return rank_sparse(std::move(int_rows));
}

/// Per-leg partitions of each leg's index set into disjoint nonempty blocks.
class ProductPartition {
 public:
  using Block = std::vector<Index>;

  explicit ProductPartition(std::vector<std::vector<Block>> legs) : legs_(std::move(legs)) {}

  static ProductPartition singletons(const std::vector<Index>& dims) {
    std::vector<std::vector<Block>> legs;
    for (auto d : dims) {
      std::vector<Block> blocks;
      for (Index i = 0; i < d; ++i) blocks.push_back({i});
      legs.push_back(std::move(blocks));
    }
    return ProductPartition(std::move(legs));
  }

  static ProductPartition one_block(const std::vector<Index>& dims) {
    std::vector<std::vector<Block>> legs;
    for (auto d : dims) {
      Block b;
      for (Index i = 0; i < d; ++i) b.push_back(i);
      legs.push_back({b});
    }
    return ProductPartition(std::move(legs));
  }

  /// {{0}, {1, ..., dim-1}} on every leg.
  static ProductPartition zero_vs_rest(const std::vector<Index>& dims) {
    std::vector<std::vector<Block>> legs;
    for (auto d : dims) {
      Block rest;
      for (Index i = 1; i < d; ++i) rest.push_back(i);
      std::vector<Block> blocks{{0}};
      if (!rest.empty()) blocks.push_back(rest);
      legs.push_back(std::move(blocks));
    }
    return ProductPartition(std::move(legs));
  }

  /// Partition of the product basis: block (I, J) = {i * dim_b + j}, numbered I * |blocks_b| + J.
  static ProductPartition product(const ProductPartition& a, const ProductPartition& b, const std::vector<Index>& b_dims) {
    detail::require(a.arity() == b.arity() && b_dims.size() == b.arity(), "partition product arity mismatch");
    std::vector<std::vector<Block>> legs(a.arity());
    for (std::size_t l = 0; l < a.arity(); ++l)
      for (const auto& bi : a.legs_[l])
        for (const auto& bj : b.legs_[l]) {
          Block blk;
          for (auto i : bi)
            for (auto j : bj) blk.push_back(i * b_dims[l] + j);
          legs[l].push_back(std::move(blk));
        }
    return ProductPartition(std::move(legs));
  }

  std::size_t arity() const { return legs_.size(); }
  const std::vector<std::vector<Block>>& legs() const { return legs_; }

  /// block_of[leg][index] for a tensor of the given dims; throws when incompatible.
  std::vector<std::vector<std::size_t>> block_map(const std::vector<Index>& dims) const {
    detail::require(dims.size() == legs_.size(), "partition arity does not match tensor");
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<std::size_t>> out(dims.size());
    for (std::size_t l = 0; l < dims.size(); ++l) {
      out[l].assign(dims[l], unset);
      for (std::size_t b = 0; b < legs_[l].size(); ++b) {
        detail::require(!legs_[l][b].empty(), "empty block in partition");
        for (auto i : legs_[l][b]) {
          detail::require(i < dims[l], "partition index out of range on leg " + std::to_string(l));
          detail::require(out[l][i] == unset, "blocks overlap on leg " + std::to_string(l));
          out[l][i] = b;
        }
      }
      for (auto b : out[l]) detail::require(b != unset, "partition does not cover leg " + std::to_string(l));
    }
    return out;
  }

 private:
  std::vector<std::vector<Block>> legs_;
};

/// 0/1 tensor over blocks: entry 1 iff the projection of t onto that block
/// combination is nonzero.
inline SparseTensor outer_structure(const SparseTensor& t, const ProductPartition& p) {
  const auto map = p.block_map(t.dims());
  std::vector<Index> dims;
  for (const auto& blocks : p.legs()) dims.push_back(blocks.size());
  std::vector<Point> pts;
  for (const auto& x : t.points()) {
    Point b(x.size());
    for (std::size_t l = 0; l < x.size(); ++l) b[l] = map[l][x[l]];
    pts.push_back(std::move(b));
  }
  return SparseTensor::indicator(std::move(dims), std::move(pts));
}

/// Minimum over all nontrivial flattenings of log2(rank); an upper bound on
/// the asymptotic subrank exponent.
inline double min_log2_flattening_rank(const SparseTensor& t) {
  const std::size_t k = t.arity();
  detail::require(k >= 2, "flattenings need arity >= 2");
  double best = std::numeric_limits<double>::infinity();
  // Leg k-1 always on the right; complements give the same rank.
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << (k - 1)); ++m) {
    std::vector<std::size_t> left;
    for (std::size_t i = 0; i + 1 < k; ++i)
      if (m >> i & 1) left.push_back(i);
    const auto r = flattening_rank(t, left);
    best = std::min(best, r == 0 ? -std::numeric_limits<double>::infinity() : std::log2(static_cast<double>(r)));
  }
  return best;
}

}  // namespace tb
