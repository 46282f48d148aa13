#pragma once

// Lower bounds on the monomial subexponent of tight tensors:
//   H(P) - (k-2) * max_R (max_Q H(Q) - H(P)) / r_alpha(R)
// over fiber-respecting equivalence relations R, plus the tripartite
// maximin bound and closed forms used as cross-checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/entropy.hpp"
#include "tensorbounds/errors.hpp"
#include "tensorbounds/parallel.hpp"
#include "tensorbounds/relations.hpp"
#include "tensorbounds/tensor.hpp"
#include "tensorbounds/tightness.hpp"

namespace tb {

enum class Enumeration { Auto, Exhaustive, RankClosed };
enum class PStrategy { Uniform, User, Ascent };

inline const char* to_string(Enumeration e) {
  switch (e) {
    case Enumeration::Exhaustive: return "exhaustive";
    case Enumeration::RankClosed: return "rank-closed";
    default: return "auto";
  }
}

inline const char* to_string(PStrategy s) {
  switch (s) {
    case PStrategy::User: return "user";
    case PStrategy::Ascent: return "ascent";
    default: return "uniform";
  }
}

struct BoundOptions {
  std::optional<Labeling> labeling;
  PStrategy strategy = PStrategy::Uniform;
  std::optional<Distribution> user_p;
  std::optional<std::vector<SymmetryGenerator>> symmetry;
  Enumeration enumeration = Enumeration::Auto;
  double budget = 1e6;
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::size_t workers = 1;
  std::size_t restarts = 8;
  std::size_t ascent_steps = 40;
};

struct RelationEval {
  EquivRelation relation;
  std::size_t rank = 0;
  double max_hq = 0;    // H of the fitted coupling
  double dual_gap = 0;  // max_hq + dual_gap bounds the true maximum from above
  double penalty = 0;   // (max_hq + dual_gap - H(P)) / rank, rounded up
};

struct BoundCertificate {
  double value = 0;
  std::size_t arity = 0;
  Distribution p;
  double h_p = 0;
  Labeling labeling;
  std::vector<RelationEval> evaluations;  // penalty descending, then canonical order
  std::optional<std::size_t> worst;       // index into evaluations
  double max_penalty = 0;
  std::size_t relation_count = 0;
  Enumeration enumeration = Enumeration::Auto;
  std::size_t symmetry_order = 1;
  bool symmetry_applied = false;
  std::string strategy = "uniform";
};

namespace detail {

inline double round_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
inline double round_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }

}  // namespace detail

/// Penalty of r at the distribution p (on t's support). Uses the coupling's
/// dual upper bound, clamps at zero (the diagonal coupling is feasible) and
/// rounds up so the final bound errs low.
inline RelationEval penalty_at(const SparseTensor& t, const Distribution& p, const Labeling& a, const EquivRelation& r,
                               double tol = kDefaultTol) {
  RelationEval ev;
  ev.relation = r;
  ev.rank = relation_rank(t, a, r);
  if (ev.rank == 0) throw NotTightError("relation has rank zero under the labeling; labeling is not injective");
  const auto coupling = max_entropy_coupling(t, r, marginals(t, p), tol);
  ev.max_hq = coupling.fit.entropy;
  ev.dual_gap = coupling.fit.dual_gap;
  const double raw = (coupling.fit.upper - entropy(p)) / static_cast<double>(ev.rank);
  ev.penalty = detail::round_up(std::max(0.0, raw));
  return ev;
}

/// Penalty for a marginal family: the marginals are first lifted to the
/// max-entropy distribution on the support, which is then used throughout.
inline RelationEval penalty(const SparseTensor& t, const MarginalFamily& m, const Labeling& a, const EquivRelation& r,
                            double tol = kDefaultTol) {
  const auto lift = max_entropy_on_support(t, m, tol);
  return penalty_at(t, lift.q, a, r, tol);
}

/// H(P) - (k-2) * max penalty, recomputed from the stored witnesses.
inline double recompute_bound(const BoundCertificate& c) {
  double mx = 0;
  for (const auto& e : c.evaluations) mx = std::max(mx, e.penalty);
  const double k2 = c.arity >= 2 ? static_cast<double>(c.arity - 2) : 0.0;
  return entropy(c.p) - k2 * mx;
}

inline constexpr double kTieTolerance = 1e-12;

/// Evaluates the bound at a fixed P over the given relations.
inline BoundCertificate evaluate_bound(const SparseTensor& t, const Distribution& p, const Labeling& a,
                                       const std::vector<EquivRelation>& relations, std::size_t workers = 1,
                                       double tol = kDefaultTol) {
  detail::require(p.size() == t.size(), "distribution does not match support size");
  BoundCertificate c;
  c.arity = t.arity();
  c.p = p;
  c.h_p = entropy(p);
  c.labeling = a;
  c.relation_count = relations.size();
  c.evaluations.resize(relations.size());
  parallel_for(relations.size(), workers, [&](std::size_t i) { c.evaluations[i] = penalty_at(t, p, a, relations[i], tol); });
  std::sort(c.evaluations.begin(), c.evaluations.end(), [](const RelationEval& x, const RelationEval& y) {
    if (x.penalty != y.penalty) return x.penalty > y.penalty;
    return x.relation < y.relation;
  });
  if (!c.evaluations.empty()) {
    c.max_penalty = c.evaluations.front().penalty;
    // Among near-ties for the maximum, the canonically smallest relation is reported.
    std::size_t w = 0;
    for (std::size_t i = 1; i < c.evaluations.size() && c.evaluations[i].penalty >= c.max_penalty - kTieTolerance; ++i)
      if (c.evaluations[i].relation < c.evaluations[w].relation) w = i;
    c.worst = w;
  }
  const double k2 = t.arity() >= 2 ? static_cast<double>(t.arity() - 2) : 0.0;
  c.value = c.h_p - k2 * c.max_penalty;
  return c;
}

namespace detail {

struct Setup {
  Labeling labeling;
  std::optional<SymmetryGroup> group;  // set only when usable for reduction
  std::size_t group_order = 1;
};

inline Setup prepare(const SparseTensor& t, const BoundOptions& o) {
  Setup s;
  if (o.labeling) {
    if (!check_tight(t, *o.labeling)) throw NotTightError("supplied labeling does not witness tightness");
    s.labeling = *o.labeling;
  } else {
    s.labeling = require_labeling(t, o.seed);
  }
  if (o.symmetry) {
    SymmetryGroup g(t, *o.symmetry);
    s.group_order = g.order();
    if (!g.trivial() && labeling_equivariant(t, s.labeling, g)) s.group = std::move(g);
  }
  return s;
}

inline std::vector<EquivRelation> relations_for(const SparseTensor& t, const BoundOptions& o, const Setup& s,
                                                const SymmetryGroup* g, Enumeration& used) {
  Enumeration mode = o.enumeration;
  if (mode == Enumeration::Auto)
    mode = exhaustive_relation_count(t) <= o.budget ? Enumeration::Exhaustive : Enumeration::RankClosed;
  used = mode;
  if (mode == Enumeration::Exhaustive) return enumerate_relations(t, g, o.budget);
  return enumerate_flats(t, s.labeling, g, o.budget);
}

}  // namespace detail

/// Best certificate over the chosen P strategy. Uniform P is always evaluated
/// as a baseline; every candidate yields a valid bound, the largest is kept.
inline BoundCertificate main_lower_bound(const SparseTensor& t, const BoundOptions& o = {}) {
  detail::require(!t.empty(), "support must be nonempty");
  detail::require(t.arity() >= 2, "bound needs arity >= 2");
  const auto setup = detail::prepare(t, o);
  const SymmetryGroup* group = setup.group ? &*setup.group : nullptr;

  Enumeration used_sym = Enumeration::Auto, used_full = Enumeration::Auto;
  std::optional<std::vector<EquivRelation>> reduced, full;
  auto relations_for_p = [&](const Distribution& p, bool& applied) -> const std::vector<EquivRelation>& {
    applied = group != nullptr && group->fixes(p, 1e-12);
    if (applied) {
      if (!reduced) reduced = detail::relations_for(t, o, setup, group, used_sym);
      return *reduced;
    }
    if (!full) full = detail::relations_for(t, o, setup, nullptr, used_full);
    return *full;
  };

  auto evaluate = [&](const Distribution& p, const char* strategy) {
    bool applied = false;
    const auto& rels = relations_for_p(p, applied);
    auto c = evaluate_bound(t, p, setup.labeling, rels, o.workers, o.tol);
    c.enumeration = applied ? used_sym : used_full;
    c.symmetry_applied = applied;
    c.symmetry_order = setup.group_order;
    c.strategy = strategy;
    return c;
  };

  // Max-entropy lift keeps the marginals and can only raise H(P).
  auto lift = [&](const Distribution& p) {
    auto q = max_entropy_on_support(t, marginals(t, p), o.tol).q;
    if (group) q = group->symmetrize(q);
    return entropy(q) > entropy(p) + 1e-12 ? q : p;
  };

  BoundCertificate best = evaluate(lift(uniform_distribution(t.size())), "uniform");
  if (o.strategy == PStrategy::User) {
    detail::require(o.user_p.has_value(), "user strategy needs a distribution");
    auto c = evaluate(lift(normalized(*o.user_p)), "user");
    if (c.value > best.value) best = std::move(c);
  } else if (o.strategy == PStrategy::Ascent) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    for (std::size_t r = 0; r < o.restarts; ++r) {
      Distribution p(t.size());
      if (r == 0) {
        p = best.p;
      } else {
        for (auto& v : p) v = expo(rng);
        p = normalized(std::move(p));
      }
      if (group) p = group->symmetrize(p);
      auto cur = evaluate(lift(p), "ascent");
      double sigma = 0.5;
      for (std::size_t s = 0; s < o.ascent_steps; ++s) {
        Distribution cand = cur.p;
        for (auto& v : cand) v *= std::exp(sigma * gauss(rng));
        cand = normalized(std::move(cand));
        if (group) cand = group->symmetrize(cand);
        auto c = evaluate(lift(cand), "ascent");
        if (c.value > cur.value) {
          cur = std::move(c);
        } else {
          sigma *= 0.9;
        }
      }
      if (cur.value > best.value) best = std::move(cur);
    }
  }
  return best;
}

/// Tripartite bound max_P min_i H(P_i), exact for tight 3-tensors.
inline BoundCertificate strassen_bound(const SparseTensor& t, const BoundOptions& o = {}) {
  detail::require(t.arity() == 3, "tripartite bound needs a 3-tensor");
  const auto setup = detail::prepare(t, o);
  const auto mm = maximin_marginal_entropy(t, 16, 10'000, o.seed);
  BoundCertificate c;
  c.arity = 3;
  c.p = mm.p;
  c.h_p = entropy(mm.p);
  c.labeling = setup.labeling;
  c.value = mm.value;
  c.strategy = "maximin";
  return c;
}

inline double wstate_closed_form(std::size_t k) {
  detail::require(k >= 2, "W-state needs k >= 2");
  return binary_entropy(1.0 / static_cast<double>(k));
}

/// min over flattenings of log2 rank: an upper bound on any subexponent.
inline double flattening_upper_bound(const SparseTensor& t) { return min_log2_flattening_rank(t); }

}  // namespace tb
