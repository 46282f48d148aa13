#pragma once

// Shannon entropy, marginals, and maximum-entropy distributions with
// prescribed marginals via cyclic iterative proportional fitting (IPF).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/errors.hpp"
#include "tensorbounds/tensor.hpp"
#include "tensorbounds/tightness.hpp"

namespace tb {

/// Probability vector aligned with some declared ordering (support points or pairs).
using Distribution = std::vector<double>;

/// marginals[leg][index], sized to the leg dimension.
using MarginalFamily = std::vector<std::vector<double>>;

inline double entropy(const Distribution& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

inline double binary_entropy(double x) {
  detail::require(x >= 0 && x <= 1, "binary entropy argument outside [0, 1]");
  if (x == 0 || x == 1) return 0;
  return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

/// Rescales to total mass 1; rejects negative or all-zero input.
inline Distribution normalized(Distribution p) {
  double s = 0;
  for (double v : p) {
    detail::require(v >= 0 && std::isfinite(v), "distribution has a negative or non-finite entry");
    s += v;
  }
  detail::require(s > 0, "distribution has zero mass");
  for (double& v : p) v /= s;
  return p;
}

inline Distribution uniform_distribution(std::size_t n) {
  detail::require(n > 0, "uniform distribution on empty set");
  return Distribution(n, 1.0 / static_cast<double>(n));
}

inline MarginalFamily marginals(const SparseTensor& t, const Distribution& p) {
  detail::require(p.size() == t.size(), "distribution does not match support size");
  MarginalFamily m(t.arity());
  for (std::size_t l = 0; l < t.arity(); ++l) m[l].assign(t.dims()[l], 0.0);
  for (std::size_t n = 0; n < t.size(); ++n)
    for (std::size_t l = 0; l < t.arity(); ++l) m[l][t.point(n)[l]] += p[n];
  return m;
}

inline double total_variation(const Distribution& a, const Distribution& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / 2;
}

inline constexpr double kDefaultTol = 1e-10;
inline constexpr std::size_t kMaxIpfIterations = 100'000;

/// A max-entropy problem: cells, each belonging to one group per family;
/// targets[f][g] is the required mass of group g in family f.
struct IpfProblem {
  std::size_t cell_count = 0;
  std::vector<std::vector<std::size_t>> group_of;  // [family][cell]
  std::vector<std::vector<double>> targets;        // [family][group]
};

struct IpfResult {
  Distribution q;        // over the original cells (dropped cells get 0)
  double entropy = 0;    // H(q)
  double upper = 0;      // certified upper bound on the constrained maximum
  double dual_gap = 0;   // max(0, upper - entropy)
  double residual = 0;   // largest total-variation marginal violation of q
  std::size_t iterations = 0;
  bool converged = false;
};

/// Cyclic IPF from the uniform distribution. The cumulative scaling factors
/// give Lagrange multipliers, and weak duality turns them into an upper bound
///   U = log2 sum_c 2^{sum_f lambda_f(g_f(c))} - sum_f sum_g t_f(g) lambda_f(g)
/// valid whatever the convergence state.
inline IpfResult solve_ipf(const IpfProblem& prob, double tol = kDefaultTol, std::size_t max_iter = kMaxIpfIterations) {
  const std::size_t families = prob.group_of.size();
  detail::require(prob.targets.size() == families, "IPF: targets do not match families");
  // Cells in a zero-target group must carry no mass.
  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < prob.cell_count; ++c) {
    bool ok = true;
    for (std::size_t f = 0; f < families && ok; ++f) ok = prob.targets[f][prob.group_of[f][c]] > 0;
    if (ok) live.push_back(c);
  }
  for (std::size_t f = 0; f < families; ++f) {
    std::vector<bool> covered(prob.targets[f].size(), false);
    for (auto c : live) covered[prob.group_of[f][c]] = true;
    for (std::size_t g = 0; g < covered.size(); ++g)
      if (prob.targets[f][g] > 0 && !covered[g])
        throw InfeasibleError("required marginal mass on an index no admissible cell reaches");
  }
  const std::size_t n = live.size();
  if (n == 0) throw InfeasibleError("no admissible cells");

  std::vector<double> q(n, 1.0 / static_cast<double>(n));
  std::vector<std::vector<double>> lambda(families);
  for (std::size_t f = 0; f < families; ++f) lambda[f].assign(prob.targets[f].size(), 0.0);
  std::vector<double> mass;
  IpfResult res;
  std::vector<double> prev = q;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    for (std::size_t f = 0; f < families; ++f) {
      const auto& grp = prob.group_of[f];
      mass.assign(prob.targets[f].size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) mass[grp[live[i]]] += q[i];
      for (std::size_t g = 0; g < mass.size(); ++g)
        if (prob.targets[f][g] > 0) lambda[f][g] += std::log2(prob.targets[f][g] / mass[g]);
      for (std::size_t i = 0; i < n; ++i) {
        const auto g = grp[live[i]];
        q[i] *= prob.targets[f][g] / mass[g];
      }
    }
    if (total_variation(q, prev) < tol) {
      res.converged = true;
      ++res.iterations;
      break;
    }
    prev = q;
  }

  // q is proportional to 2^{sum of multipliers}; evaluate the dual bound from them directly.
  std::vector<double> expo(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < families; ++f) expo[i] += lambda[f][prob.group_of[f][live[i]]];
  const double mx = *std::max_element(expo.begin(), expo.end());
  double z = 0;
  for (double e : expo) z += std::exp2(e - mx);
  const double log_sum = mx + std::log2(z);
  double linear = 0;
  for (std::size_t f = 0; f < families; ++f)
    for (std::size_t g = 0; g < prob.targets[f].size(); ++g)
      if (prob.targets[f][g] > 0) linear += prob.targets[f][g] * lambda[f][g];
  res.upper = log_sum - linear;

  res.q.assign(prob.cell_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) res.q[live[i]] = q[i];
  res.entropy = entropy(res.q);
  res.dual_gap = std::max(0.0, res.upper - res.entropy);
  res.upper = std::max(res.upper, res.entropy);
  for (std::size_t f = 0; f < families; ++f) {
    mass.assign(prob.targets[f].size(), 0.0);
    for (std::size_t c = 0; c < prob.cell_count; ++c) mass[prob.group_of[f][c]] += res.q[c];
    double tv = 0;
    for (std::size_t g = 0; g < mass.size(); ++g) tv += std::abs(mass[g] - prob.targets[f][g]);
    res.residual = std::max(res.residual, tv / 2);
  }
  return res;
}

/// Max-entropy distribution on the support with the given per-leg marginals.
inline IpfResult max_entropy_on_support(const SparseTensor& t, const MarginalFamily& m, double tol = kDefaultTol) {
  detail::require(m.size() == t.arity(), "marginal family has wrong number of legs");
  IpfProblem prob;
  prob.cell_count = t.size();
  for (std::size_t l = 0; l < t.arity(); ++l) {
    detail::require(m[l].size() == t.dims()[l], "marginal size does not match leg dimension");
    std::vector<std::size_t> g(t.size());
    for (std::size_t n = 0; n < t.size(); ++n) g[n] = t.point(n)[l];
    prob.group_of.push_back(std::move(g));
    prob.targets.push_back(m[l]);
  }
  return solve_ipf(prob, tol);
}

/// Ordered pairs (x, y) of point indices making up a relation, diagonal included.
inline std::vector<std::pair<std::size_t, std::size_t>> relation_pairs(const EquivRelation& r) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& c : r.classes)
    for (auto x : c)
      for (auto y : c) out.emplace_back(x, y);
  std::sort(out.begin(), out.end());
  return out;
}

struct Coupling {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  IpfResult fit;  // fit.q aligned with pairs
};

/// Max-entropy Q on the pairs of r whose 2k component marginals (x-side and
/// y-side of every leg) all equal the given marginals.
inline Coupling max_entropy_coupling(const SparseTensor& t, const EquivRelation& r, const MarginalFamily& m,
                                     double tol = kDefaultTol) {
  detail::require(m.size() == t.arity(), "marginal family has wrong number of legs");
  Coupling out;
  out.pairs = relation_pairs(r);
  IpfProblem prob;
  prob.cell_count = out.pairs.size();
  for (std::size_t l = 0; l < t.arity(); ++l) {
    detail::require(m[l].size() == t.dims()[l], "marginal size does not match leg dimension");
    for (int side = 0; side < 2; ++side) {
      std::vector<std::size_t> g(out.pairs.size());
      for (std::size_t c = 0; c < out.pairs.size(); ++c) {
        const auto idx = side == 0 ? out.pairs[c].first : out.pairs[c].second;
        g[c] = t.point(idx)[l];
      }
      prob.group_of.push_back(std::move(g));
      prob.targets.push_back(m[l]);
    }
  }
  out.fit = solve_ipf(prob, tol);
  return out;
}

struct MaximinResult {
  double value = 0;
  Distribution p;
};

inline double min_marginal_entropy(const SparseTensor& t, const Distribution& p) {
  const auto m = marginals(t, p);
  double v = std::numeric_limits<double>::infinity();
  for (const auto& leg : m) v = std::min(v, entropy(leg));
  return v;
}

/// max over P on the support of min_i H(P_i): exponentiated-gradient
/// supergradient ascent from the uniform start plus random restarts. The
/// value is recomputed from the returned witness.
inline MaximinResult maximin_marginal_entropy(const SparseTensor& t, std::size_t restarts = 16, std::size_t steps = 10'000,
                                              std::uint64_t seed = 1) {
  detail::require(t.arity() == 3, "maximin marginal entropy needs a 3-tensor");
  detail::require(!t.empty(), "support must be nonempty");
  const std::size_t n = t.size();
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  MaximinResult best{-1.0, {}};
  for (std::size_t r = 0; r <= restarts; ++r) {
    Distribution p(n);
    if (r == 0) {
      p = uniform_distribution(n);
    } else {
      for (auto& v : p) v = expo(rng);
      p = normalized(std::move(p));
    }
    for (std::size_t s = 1; s <= steps; ++s) {
      const auto m = marginals(t, p);
      std::size_t worst = 0;
      double wv = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < 3; ++l) {
        const double h = entropy(m[l]);
        if (h < wv) {
          wv = h;
          worst = l;
        }
      }
      if (wv > best.value) best = {wv, p};
      const double eta = 1.0 / std::sqrt(static_cast<double>(s));
      // dH(P_l)/dP_x = -log2 P_l(x_l) - 1/ln 2; the constant cancels on normalization.
      double mx = -std::numeric_limits<double>::infinity();
      std::vector<double> g(n);
      for (std::size_t x = 0; x < n; ++x) {
        const double ml = m[worst][t.point(x)[worst]];
        g[x] = ml > 0 ? -std::log2(ml) : 0.0;
        mx = std::max(mx, g[x]);
      }
      double z = 0;
      for (std::size_t x = 0; x < n; ++x) {
        p[x] *= std::exp(eta * (g[x] - mx));
        z += p[x];
      }
      for (auto& v : p) v /= z;
    }
    const double last = min_marginal_entropy(t, p);
    if (last > best.value) best = {last, p};
  }
  best.value = min_marginal_entropy(t, best.p);
  return best;
}

}  // namespace tb
