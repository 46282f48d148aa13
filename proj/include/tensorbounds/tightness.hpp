#pragma once

// Tightness: per-leg injective integer labelings that sum to zero on every
// support point, their synthesis, and ranks of labeled difference matrices.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/errors.hpp"
#include "tensorbounds/linalg.hpp"
#include "tensorbounds/tensor.hpp"

namespace tb {

/// labeling[leg][index]; entries for indices absent from the support are ignored.
using Labeling = std::vector<std::vector<std::int64_t>>;

/// Partition of the support (by point index) into classes lying inside
/// fibers {x : x_axis = v}. Canonical form: classes sorted internally and by
/// first element; singletons included.
struct EquivRelation {
  std::size_t axis = 0;
  std::vector<std::vector<std::size_t>> classes;

  bool operator==(const EquivRelation&) const = default;
  bool operator<(const EquivRelation& o) const {
    return axis != o.axis ? axis < o.axis : classes < o.classes;
  }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.size() * c.size();
    return n;
  }
};

inline void canonicalize(EquivRelation& r) {
  for (auto& c : r.classes) std::sort(c.begin(), c.end());
  std::sort(r.classes.begin(), r.classes.end());
}

/// Validates and canonicalizes. Missing points are added as singletons.
inline EquivRelation make_relation(const SparseTensor& t, std::size_t axis, std::vector<std::vector<std::size_t>> classes) {
  detail::require(axis < t.arity(), "relation axis out of range");
  std::vector<bool> seen(t.size(), false);
  bool nontrivial = false;
  for (const auto& c : classes) {
    detail::require(!c.empty(), "empty relation class");
    nontrivial |= c.size() >= 2;
    for (auto p : c) {
      detail::require(p < t.size(), "relation point index out of range");
      detail::require(!seen[p], "relation classes overlap");
      seen[p] = true;
      detail::require(t.point(p)[axis] == t.point(c.front())[axis], "relation class crosses fibers of its axis");
    }
  }
  detail::require(nontrivial, "relation is contained in the diagonal");
  for (std::size_t p = 0; p < t.size(); ++p)
    if (!seen[p]) classes.push_back({p});
  EquivRelation r{axis, std::move(classes)};
  canonicalize(r);
  return r;
}

inline bool check_tight(const SparseTensor& t, const Labeling& a) {
  detail::require(a.size() == t.arity(), "labeling has wrong number of legs");
  for (std::size_t i = 0; i < t.arity(); ++i)
    detail::require(a[i].size() == t.dims()[i], "labeling size does not match leg " + std::to_string(i));
  for (const auto& x : t.points()) {
    __int128 s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += a[i][x[i]];
    if (s != 0) return false;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    std::vector<std::int64_t> vals;
    for (auto v : t.occurring(i)) vals.push_back(a[i][v]);
    std::sort(vals.begin(), vals.end());
    if (std::adjacent_find(vals.begin(), vals.end()) != vals.end()) return false;
  }
  return true;
}

/// All labelings (injective or not) satisfying the sum-zero constraints,
/// as a basis over variables (leg, occurring index).
struct LabelingSpace {
  std::vector<Index> dims;
  std::vector<std::vector<std::size_t>> var_of;  // [leg][index] -> variable or npos
  std::size_t var_count = 0;
  std::vector<std::vector<Integer>> basis;        // each of length var_count

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// Labeling sum_j c_j basis_j; nullopt if some value leaves int64.
  std::optional<Labeling> specialize(const std::vector<std::int64_t>& c) const {
    detail::require(c.size() == basis.size(), "coefficient count does not match basis");
    std::vector<Integer> v(var_count, Integer(0));
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (std::size_t x = 0; x < var_count; ++x) v[x] += Integer(static_cast<long>(c[j])) * basis[j][x];
    Labeling out(dims.size());
    for (std::size_t l = 0; l < dims.size(); ++l) {
      out[l].assign(dims[l], 0);
      for (Index i = 0; i < dims[l]; ++i) {
        const auto x = var_of[l][i];
        if (x == npos) continue;
        if (!v[x].fits_slong_p()) return std::nullopt;
        out[l][i] = v[x].get_si();
      }
    }
    return out;
  }
};

inline LabelingSpace labeling_space(const SparseTensor& t) {
  detail::require(!t.empty(), "support must be nonempty");
  LabelingSpace s;
  s.dims = t.dims();
  s.var_of.resize(t.arity());
  for (std::size_t l = 0; l < t.arity(); ++l) {
    s.var_of[l].assign(t.dims()[l], LabelingSpace::npos);
    for (auto v : t.occurring(l)) s.var_of[l][v] = s.var_count++;
  }
  DenseMatrix a;
  a.reserve(t.size());
  for (const auto& x : t.points()) {
    std::vector<Rational> row(s.var_count, Rational(0));
    for (std::size_t l = 0; l < x.size(); ++l) row[s.var_of[l][x[l]]] += 1;
    a.push_back(std::move(row));
  }
  for (const auto& b : nullspace(std::move(a), s.var_count)) s.basis.push_back(primitive_integer(b));
  return s;
}

/// Evidence that no injective labeling exists: on `leg`, indices a and b
/// receive the same value under every labeling in the space.
struct NotTightWitness {
  std::size_t leg = 0;
  Index a = 0;
  Index b = 0;
};

struct LabelingResult {
  enum class Status { Tight, NotTight, Undetermined };
  Status status = Status::Undetermined;
  Labeling labeling;
  std::optional<NotTightWitness> witness;
};

inline constexpr int kLabelingRetries = 64;
inline constexpr std::int64_t kLabelingBox = 1'000'000;

inline std::optional<NotTightWitness> identical_functional(const LabelingSpace& s) {
  for (std::size_t l = 0; l < s.dims.size(); ++l) {
    std::map<std::vector<Integer>, Index> seen;
    for (Index i = 0; i < s.dims[l]; ++i) {
      const auto x = s.var_of[l][i];
      if (x == LabelingSpace::npos) continue;
      std::vector<Integer> col;
      for (const auto& b : s.basis) col.push_back(b[x]);
      auto [it, fresh] = seen.emplace(std::move(col), i);
      if (!fresh) return NotTightWitness{l, it->second, i};
    }
  }
  return std::nullopt;
}

inline LabelingResult find_labeling(const SparseTensor& t, std::uint64_t seed) {
  const auto space = labeling_space(t);
  LabelingResult res;
  if (auto w = identical_functional(space)) {
    res.status = LabelingResult::Status::NotTight;
    res.witness = w;
    return res;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> coef(-kLabelingBox, kLabelingBox);
  for (int attempt = 0; attempt < kLabelingRetries; ++attempt) {
    std::vector<std::int64_t> c(space.basis.size());
    for (auto& v : c) v = coef(rng);
    auto lab = space.specialize(c);
    if (lab && check_tight(t, *lab)) {
      res.status = LabelingResult::Status::Tight;
      res.labeling = std::move(*lab);
      return res;
    }
  }
  return res;
}

/// Labeling or throw NotTightError.
inline Labeling require_labeling(const SparseTensor& t, std::uint64_t seed) {
  auto r = find_labeling(t, seed);
  if (r.status == LabelingResult::Status::Tight) return r.labeling;
  if (r.witness)
    throw NotTightError("support is not tight: leg " + std::to_string(r.witness->leg) + " indices " +
                        std::to_string(r.witness->a) + " and " + std::to_string(r.witness->b) +
                        " receive equal labels under every sum-zero labeling");
  throw NotTightError("no injective labeling found within the retry budget");
}

/// alpha(x) as a k-vector.
inline std::vector<std::int64_t> labeled(const Labeling& a, const Point& x) {
  std::vector<std::int64_t> v(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) v[l] = a[l][x[l]];
  return v;
}

namespace detail {

inline SparseRow difference_row(const Labeling& a, const Point& x, const Point& y) {
  SparseRow r;
  for (std::size_t l = 0; l < x.size(); ++l) {
    const std::int64_t d = a[l][x[l]] - a[l][y[l]];
    if (d != 0) r.emplace_back(l, Integer(static_cast<long>(d)));
  }
  return r;
}

inline void check_relation(const SparseTensor& t, const EquivRelation& r) {
  detail::require(r.axis < t.arity(), "relation axis out of range");
  for (const auto& c : r.classes)
    for (auto p : c) detail::require(p < t.size(), "relation does not match support");
}

}  // namespace detail

/// Rank over Q of the rows alpha(x) - alpha(y), (x, y) in r. Differences to a
/// class representative span the same row space as all ordered pairs.
inline std::size_t relation_rank(const SparseTensor& t, const Labeling& a, const EquivRelation& r) {
  detail::check_relation(t, r);
  detail::require(a.size() == t.arity(), "labeling has wrong number of legs");
  RowEchelon e;
  for (const auto& c : r.classes)
    for (std::size_t j = 1; j < c.size(); ++j) e.insert(detail::difference_row(a, t.point(c[j]), t.point(c[0])));
  return e.rank();
}

struct GenericRank {
  std::size_t rank = 0;
  bool certified = false;  // rank equals the proven upper bound
};

/// Maximal relation rank over all labelings in the space, via random
/// specialization checked against an exact upper bound.
inline GenericRank relation_rank(const SparseTensor& t, const LabelingSpace& s, const EquivRelation& r,
                                 std::uint64_t seed = 1, int retries = 16) {
  detail::check_relation(t, r);
  const std::size_t k = t.arity();
  const std::size_t m = s.basis.size();
  // M(c) = sum_j c_j M_j; rank M(c) <= rank [M_1 ... M_m] and <= rank of the stacked M_j.
  std::vector<SparseRow> wide, tall;
  auto value = [&](std::size_t j, std::size_t leg, Index i) -> const Integer& { return s.basis[j][s.var_of[leg][i]]; };
  for (const auto& c : r.classes)
    for (std::size_t n = 1; n < c.size(); ++n) {
      const auto& x = t.point(c[n]);
      const auto& y = t.point(c[0]);
      SparseRow w;
      for (std::size_t j = 0; j < m; ++j) {
        SparseRow h;
        for (std::size_t l = 0; l < k; ++l) {
          Integer d = value(j, l, x[l]) - value(j, l, y[l]);
          if (d != 0) {
            w.emplace_back(j * k + l, d);
            h.emplace_back(l, std::move(d));
          }
        }
        tall.push_back(std::move(h));
      }
      wide.push_back(std::move(w));
    }
  const std::size_t bound = std::min(rank_sparse(std::move(wide)), rank_sparse(std::move(tall)));
  GenericRank out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> coef(-kLabelingBox, kLabelingBox);
  for (int attempt = 0; attempt < retries && out.rank < bound; ++attempt) {
    std::vector<std::int64_t> c(m);
    for (auto& v : c) v = coef(rng);
    if (auto lab = s.specialize(c)) out.rank = std::max(out.rank, relation_rank(t, *lab, r));
  }
  out.certified = out.rank == bound;
  return out;
}

}  // namespace tb
