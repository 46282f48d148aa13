#pragma once

// Fiber-respecting equivalence relations on a support: closure of pair sets,
// exhaustive enumeration via set partitions, enumeration of rank-closed
// relations ("flats"), and symmetry reduction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/entropy.hpp"
#include "tensorbounds/errors.hpp"
#include "tensorbounds/linalg.hpp"
#include "tensorbounds/tensor.hpp"
#include "tensorbounds/tightness.hpp"

namespace tb {

/// Point indices grouped by their coordinate on `axis`, in ascending coordinate order.
inline std::vector<std::vector<std::size_t>> fibers(const SparseTensor& t, std::size_t axis) {
  std::map<Index, std::vector<std::size_t>> by;
  for (std::size_t n = 0; n < t.size(); ++n) by[t.point(n)[axis]].push_back(n);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [v, pts] : by) out.push_back(std::move(pts));
  return out;
}

/// Reflexive-symmetric-transitive closure of a set of pairs (point indices)
/// that all agree on some coordinate; the smallest such axis is used.
inline EquivRelation closure(const SparseTensor& t, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  for (const auto& [a, b] : pairs) detail::require(a < t.size() && b < t.size(), "pair index out of range");
  std::size_t axis = t.arity();
  for (std::size_t ax = 0; ax < t.arity() && axis == t.arity(); ++ax) {
    bool ok = true;
    for (const auto& [a, b] : pairs) ok = ok && t.point(a)[ax] == t.point(b)[ax];
    if (ok) axis = ax;
  }
  detail::require(axis < t.arity(), "pairs have no common agreeing coordinate");
  std::vector<std::size_t> parent(t.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& [a, b] : pairs) parent[find(a)] = find(b);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t n = 0; n < t.size(); ++n) groups[find(n)].push_back(n);
  std::vector<std::vector<std::size_t>> classes;
  for (auto& [r, c] : groups) classes.push_back(std::move(c));
  return make_relation(t, axis, std::move(classes));
}

/// Bell numbers as doubles (saturating to infinity).
inline double bell_number(std::size_t n) {
  std::vector<double> row{1.0};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> next{row.back()};
    for (double v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

/// Number of nontrivial relations the exhaustive enumeration visits.
inline double exhaustive_relation_count(const SparseTensor& t) {
  double total = 0;
  for (std::size_t ax = 0; ax < t.arity(); ++ax) {
    double prod = 1;
    for (const auto& f : fibers(t, ax)) prod *= bell_number(f.size());
    total += prod - 1;
  }
  return total;
}

/// Calls f(rgs) for every restricted growth string of length n (set partitions of [n]).
inline void for_each_set_partition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (n == 0) {
    f({});
    return;
  }
  std::vector<std::size_t> a(n, 0), mx(n, 0);  // mx[i] = max(a[0..i])
  while (true) {
    f(a);
    std::size_t i = n - 1;
    while (i > 0 && a[i] > mx[i - 1]) --i;
    if (i == 0) return;
    ++a[i];
    mx[i] = std::max(mx[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      mx[j] = mx[i];
    }
  }
}

/// A group acting on the support: leg permutation plus per-leg symbol maps,
/// (g x)[leg_perm[i]] = symbol_maps[i][x[i]]. Empty symbol_maps means identity.
struct SymmetryGenerator {
  std::vector<std::size_t> leg_perm;
  std::vector<std::vector<Index>> symbol_maps;
};

/// All leg permutations, plus symbol swaps between parts of equal size.
inline std::vector<SymmetryGenerator> dicke_generators(const std::vector<std::size_t>& lambda) {
  std::size_t k = 0;
  for (auto v : lambda) k += v;
  const std::size_t n = lambda.size();
  std::vector<std::size_t> id(k);
  std::iota(id.begin(), id.end(), 0);
  std::vector<SymmetryGenerator> gens;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    auto p = id;
    std::swap(p[i], p[i + 1]);
    gens.push_back({p, {}});
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (lambda[a] == lambda[b]) {
        std::vector<Index> m(n);
        std::iota(m.begin(), m.end(), 0);
        std::swap(m[a], m[b]);
        gens.push_back({id, std::vector<std::vector<Index>>(k, m)});
      }
  return gens;
}

inline constexpr std::size_t kMaxGroupOrder = 100'000;

/// Finite group of support permutations generated by SymmetryGenerators.
class SymmetryGroup {
 public:
  SymmetryGroup() = default;

  /// Throws InvalidArgument when a generator does not map the support onto itself.
  SymmetryGroup(const SparseTensor& t, const std::vector<SymmetryGenerator>& gens) {
    const std::size_t k = t.arity();
    for (const auto& g : gens) {
      detail::require(g.leg_perm.size() == k, "symmetry generator has wrong leg count");
      std::vector<bool> hit(k, false);
      for (auto v : g.leg_perm) {
        detail::require(v < k && !hit[v], "leg permutation is not a permutation");
        hit[v] = true;
      }
      detail::require(g.symbol_maps.empty() || g.symbol_maps.size() == k, "symbol maps have wrong leg count");
      std::vector<std::size_t> pp(t.size()), ap(g.leg_perm);
      for (std::size_t n = 0; n < t.size(); ++n) {
        Point y(k);
        for (std::size_t i = 0; i < k; ++i) {
          Index s = t.point(n)[i];
          if (!g.symbol_maps.empty()) {
            detail::require(s < g.symbol_maps[i].size(), "symbol map too short");
            s = g.symbol_maps[i][s];
          }
          y[g.leg_perm[i]] = s;
        }
        auto idx = t.find(y);
        if (!idx) throw InvalidArgument("symmetry generator does not fix the support");
        pp[n] = *idx;
      }
      std::vector<std::size_t> sorted = pp;
      std::sort(sorted.begin(), sorted.end());
      detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                      "symmetry generator is not injective on the support");
      gen_points_.push_back(std::move(pp));
      gen_axes_.push_back(std::move(ap));
    }
    // Closure by breadth-first products with generators.
    std::vector<std::size_t> id_p(t.size()), id_a(k);
    std::iota(id_p.begin(), id_p.end(), 0);
    std::iota(id_a.begin(), id_a.end(), 0);
    std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen{{id_p, id_a}};
    points_.push_back(id_p);
    axes_.push_back(id_a);
    for (std::size_t e = 0; e < points_.size(); ++e)
      for (std::size_t g = 0; g < gen_points_.size(); ++g) {
        std::vector<std::size_t> p(t.size()), a(k);
        for (std::size_t n = 0; n < t.size(); ++n) p[n] = gen_points_[g][points_[e][n]];
        for (std::size_t i = 0; i < k; ++i) a[i] = gen_axes_[g][axes_[e][i]];
        if (seen.insert({p, a}).second) {
          if (points_.size() >= kMaxGroupOrder) throw BudgetExceeded("symmetry group too large");
          points_.push_back(std::move(p));
          axes_.push_back(std::move(a));
        }
      }
  }

  std::size_t order() const { return points_.size(); }
  bool trivial() const { return points_.size() <= 1; }
  const std::vector<std::vector<std::size_t>>& generator_points() const { return gen_points_; }
  const std::vector<std::vector<std::size_t>>& generator_axes() const { return gen_axes_; }

  bool fixes(const Distribution& p, double tol = 1e-12) const {
    for (const auto& g : gen_points_)
      for (std::size_t n = 0; n < p.size(); ++n)
        if (std::abs(p[g[n]] - p[n]) > tol) return false;
    return true;
  }

  /// Orbit average of p.
  Distribution symmetrize(const Distribution& p) const {
    Distribution out(p.size(), 0.0);
    for (const auto& g : points_)
      for (std::size_t n = 0; n < p.size(); ++n) out[g[n]] += p[n];
    for (auto& v : out) v /= static_cast<double>(points_.size());
    return out;
  }

  EquivRelation image(const EquivRelation& r, std::size_t e) const {
    EquivRelation out{axes_[e][r.axis], {}};
    out.classes.reserve(r.classes.size());
    for (const auto& c : r.classes) {
      std::vector<std::size_t> m;
      m.reserve(c.size());
      for (auto x : c) m.push_back(points_[e][x]);
      out.classes.push_back(std::move(m));
    }
    canonicalize(out);
    return out;
  }

  /// Smallest image of r over the group.
  EquivRelation canonical(const EquivRelation& r) const {
    EquivRelation best = r;
    for (std::size_t e = 1; e < points_.size(); ++e) {
      auto im = image(r, e);
      if (im < best) best = std::move(im);
    }
    return best;
  }

 private:
  std::vector<std::vector<std::size_t>> gen_points_, gen_axes_;
  std::vector<std::vector<std::size_t>> points_, axes_;  // all elements
};

/// True when every generator g admits an injective linear map L on the span
/// of labeled differences with alpha(gx) - alpha(gy) = L(alpha(x) - alpha(y)).
/// Then group images of a relation have the same rank and rank-closed
/// relations map to rank-closed relations.
inline bool labeling_equivariant(const SparseTensor& t, const Labeling& a, const SymmetryGroup& g) {
  if (t.empty()) return true;
  const std::size_t k = t.arity();
  const auto base = labeled(a, t.point(0));
  for (const auto& perm : g.generator_points()) {
    const auto gbase = labeled(a, t.point(perm[0]));
    RowEchelon src, img, both;
    for (std::size_t n = 1; n < t.size(); ++n) {
      const auto x = labeled(a, t.point(n));
      const auto y = labeled(a, t.point(perm[n]));
      std::vector<std::int64_t> d(k), e(k), de(2 * k);
      for (std::size_t i = 0; i < k; ++i) {
        d[i] = x[i] - base[i];
        e[i] = y[i] - gbase[i];
        de[i] = d[i];
        de[k + i] = e[i];
      }
      src.insert(RowEchelon::to_sparse(d));
      img.insert(RowEchelon::to_sparse(e));
      both.insert(RowEchelon::to_sparse(de));
    }
    // Well-defined: rank [D | E] = rank D; injective: rank E = rank D.
    if (both.rank() != src.rank() || img.rank() != src.rank()) return false;
  }
  return true;
}

/// Every nontrivial relation, axis by axis, as combinations of set partitions
/// of the fibers. With a group, only canonical orbit representatives are kept.
inline std::vector<EquivRelation> enumerate_relations(const SparseTensor& t, const SymmetryGroup* group = nullptr,
                                                      double budget = 1e6) {
  const double count = exhaustive_relation_count(t);
  if (count > budget)
    throw BudgetExceeded("exhaustive relation enumeration needs " + std::to_string(static_cast<long double>(count)) +
                         " relations, budget " + std::to_string(static_cast<long double>(budget)));
  std::vector<EquivRelation> out;
  std::set<EquivRelation> seen;
  for (std::size_t ax = 0; ax < t.arity(); ++ax) {
    const auto fs = fibers(t, ax);
    std::vector<std::vector<std::vector<std::size_t>>> choices(fs.size());
    for (std::size_t f = 0; f < fs.size(); ++f)
      for_each_set_partition(fs[f].size(), [&](const std::vector<std::size_t>& rgs) { choices[f].push_back(rgs); });
    std::vector<std::size_t> pos(fs.size(), 0);
    while (true) {
      std::vector<std::vector<std::size_t>> classes;
      bool nontrivial = false;
      for (std::size_t f = 0; f < fs.size(); ++f) {
        const auto& rgs = choices[f][pos[f]];
        const std::size_t base = classes.size();
        for (std::size_t j = 0; j < rgs.size(); ++j) {
          if (base + rgs[j] >= classes.size()) classes.resize(base + rgs[j] + 1);
          classes[base + rgs[j]].push_back(fs[f][j]);
        }
        for (std::size_t c = base; c < classes.size(); ++c) nontrivial |= classes[c].size() >= 2;
      }
      if (nontrivial) {
        EquivRelation r{ax, std::move(classes)};
        canonicalize(r);
        if (group == nullptr || group->trivial()) {
          out.push_back(std::move(r));
        } else if (auto c = group->canonical(r); seen.insert(c).second) {
          out.push_back(std::move(c));
        }
      }
      std::size_t f = fs.size();
      while (f-- > 0) {
        if (++pos[f] < choices[f].size()) break;
        pos[f] = 0;
      }
      if (f == static_cast<std::size_t>(-1)) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

struct Flat {
  EquivRelation relation;
  RowEchelon span;
};

// R_V on one axis: x ~ y iff they share the fiber and alpha(x) - alpha(y) lies in V.
inline Flat build_flat(const SparseTensor& t, const Labeling& a, std::size_t axis,
                       const std::vector<std::vector<std::size_t>>& fs, const RowEchelon& v) {
  Flat out;
  out.relation.axis = axis;
  for (const auto& f : fs) {
    std::vector<std::vector<std::size_t>> cls;
    for (auto x : f) {
      bool placed = false;
      for (auto& c : cls)
        if (v.contains(difference_row(a, t.point(x), t.point(c.front())))) {
          c.push_back(x);
          placed = true;
          break;
        }
      if (!placed) cls.push_back({x});
    }
    for (auto& c : cls) {
      for (std::size_t j = 1; j < c.size(); ++j) out.span.insert(difference_row(a, t.point(c[j]), t.point(c[0])));
      out.relation.classes.push_back(std::move(c));
    }
  }
  canonicalize(out.relation);
  return out;
}

}  // namespace detail

/// Rank-closed relations R_V = {(x, y) : x_i = y_i, alpha(x) - alpha(y) in V}
/// for subspaces V spanned by their own differences. Any relation R is
/// contained in the flat of its difference span with the same rank, so these
/// dominate every relation in the penalty maximization. Built level by level:
/// each flat is extended by one more pair and closed again.
inline std::vector<EquivRelation> enumerate_flats(const SparseTensor& t, const Labeling& a,
                                                  const SymmetryGroup* group = nullptr, double budget = 1e6) {
  const bool reduce = group != nullptr && !group->trivial();
  const std::size_t k = t.arity();
  std::vector<std::vector<std::vector<std::size_t>>> fs(k);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(k);
  std::vector<std::vector<SparseRow>> diffs(k);
  for (std::size_t ax = 0; ax < k; ++ax) {
    fs[ax] = fibers(t, ax);
    for (const auto& f : fs[ax])
      for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) {
          pairs[ax].emplace_back(f[i], f[j]);
          diffs[ax].push_back(detail::difference_row(a, t.point(f[j]), t.point(f[i])));
        }
  }
  std::set<EquivRelation> seen;
  std::vector<EquivRelation> out;
  std::vector<detail::Flat> level, next;
  // Only orbit representatives are kept and extended; under an equivariant
  // labeling the extensions of other orbit members are images of theirs.
  auto admit = [&](detail::Flat&& fl, std::vector<detail::Flat>& into) {
    EquivRelation key = reduce ? group->canonical(fl.relation) : fl.relation;
    if (!seen.insert(key).second) return;
    if (static_cast<double>(seen.size()) > budget)
      throw BudgetExceeded("rank-closed relation enumeration exceeded budget " +
                           std::to_string(static_cast<long double>(budget)));
    if (key != fl.relation) {
      fl.relation = key;
      fl.span = RowEchelon();
      for (const auto& c : key.classes)
        for (std::size_t j = 1; j < c.size(); ++j) fl.span.insert(detail::difference_row(a, t.point(c[j]), t.point(c[0])));
    }
    out.push_back(key);
    into.push_back(std::move(fl));
  };
  for (std::size_t ax = 0; ax < k; ++ax)
    for (const auto& d : diffs[ax]) {
      RowEchelon v;
      v.insert(d);
      admit(detail::build_flat(t, a, ax, fs[ax], v), level);
    }
  while (!level.empty()) {
    next.clear();
    for (const auto& fl : level) {
      const std::size_t ax = fl.relation.axis;
      std::vector<std::size_t> cls_of(t.size());
      for (std::size_t c = 0; c < fl.relation.classes.size(); ++c)
        for (auto x : fl.relation.classes[c]) cls_of[x] = c;
      for (std::size_t p = 0; p < pairs[ax].size(); ++p) {
        if (cls_of[pairs[ax][p].first] == cls_of[pairs[ax][p].second]) continue;
        RowEchelon v = fl.span;
        if (!v.insert(diffs[ax][p])) continue;
        admit(detail::build_flat(t, a, ax, fs[ax], v), next);
      }
    }
    std::swap(level, next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tb
