#pragma once

// Upper-bound calculators for exponents of graph tensors: the asymptotic sum
// inequality, the CW construction bound, border-rank-to-rank factors, the
// CW border-rank identity check, cut-based lower bounds and the complete
// graph table.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tensorbounds/errors.hpp"
#include "tensorbounds/graph.hpp"
#include "tensorbounds/linalg.hpp"
#include "tensorbounds/poly_tensor.hpp"
#include "tensorbounds/tensor.hpp"

namespace tb {

/// Literature constants; callers may override them.
struct ExponentConstants {
  double omega_mm = 2.3728639;
  double alpha_dual = 0.3029805;
};

/// The unique tau with sum_i products[i]^tau = r (bisection to 1e-12).
inline double tau_from_sum_inequality(const std::vector<double>& products, double r) {
  detail::require(!products.empty(), "need at least one product");
  double lo_n = std::numeric_limits<double>::infinity(), hi_n = 0;
  for (double v : products) {
    detail::require(v >= 2, "each product must be >= 2");
    lo_n = std::min(lo_n, v);
    hi_n = std::max(hi_n, v);
  }
  const double p = static_cast<double>(products.size());
  detail::require(r > p, "need r > number of products");
  auto f = [&](double tau) {
    double s = 0;
    for (double v : products) s += std::pow(v, tau);
    return s;
  };
  // p * min^tau <= f(tau) <= p * max^tau brackets the root.
  double lo = std::log(r / p) / std::log(hi_n);
  double hi = std::log(r / p) / std::log(lo_n);
  while (hi - lo > 1e-12) {
    const double mid = (lo + hi) / 2;
    (f(mid) < r ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

struct CwTau {
  std::uint64_t q = 0;
  double tau = 0;
};

/// log_q((q + 2) / 2^qM), the CW construction value at a fixed q.
inline double cw_tau_value(std::uint64_t q, double qm) {
  return (std::log2(static_cast<double>(q) + 2) - qm) / std::log2(static_cast<double>(q));
}

/// Minimizes cw_tau_value over q in [q_lo, q_hi] by full scan (smallest q on ties).
inline CwTau cw_tau_bound(std::size_t k, double qm, std::uint64_t q_lo = 2, std::uint64_t q_hi = 10'000) {
  detail::require(k >= 3, "CW bound needs k >= 3");
  detail::require(q_lo >= 2, "q range must start at >= 2");
  detail::require(q_lo <= q_hi, "empty q range");
  CwTau best{q_lo, cw_tau_value(q_lo, qm)};
  for (std::uint64_t q = q_lo + 1; q <= q_hi; ++q) {
    const double v = cw_tau_value(q, qm);
    if (v < best.tau) best = {q, v};
  }
  return best;
}

/// C(h + k - 1, k - 1).
inline Integer border_to_rank_factor(std::size_t k, std::size_t h) {
  detail::require(k >= 1, "k must be >= 1");
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), h + k - 1, k - 1);
  return out;
}

/// ceil(b / a)^s * a.
inline Integer power_trick(std::uint64_t a, std::uint64_t b, std::uint64_t s) {
  detail::require(a >= 1 && b >= 1, "a and b must be >= 1");
  Integer c = (b + a - 1) / a;
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), c.get_mpz_t(), s);
  return out * Integer(static_cast<unsigned long>(a));
}

struct CwBorderResult {
  bool pass = false;
  std::optional<std::size_t> failing_order;  // lowest eps power that breaks the identity
  SparseTensor leading;                      // eps^5 coefficient
  std::size_t terms = 0;                     // number of rank-one summands
};

inline constexpr double kCwBorderBudget = 1e6;

/// Expands sum_i eps (b0 + eps^2 b_i)^{(x)k} - (b0 + eps^3 sum_i b_i)^{(x)k} + (1 + c eps) b0^{(x)k}
/// with c = b0_linear (c = -q in the genuine identity) and checks that
/// eps^0..eps^4 vanish and eps^5 equals CW_q^k.
inline CwBorderResult check_cw_border_certificate(std::uint64_t q, std::size_t k, const Rational& b0_linear) {
  detail::require(q >= 1 && k >= 2, "CW border check needs q >= 1 and k >= 2");
  const double work = static_cast<double>(q + 2) * std::pow(static_cast<double>(q + 1), static_cast<double>(k));
  if (work > kCwBorderBudget) throw BudgetExceeded("CW border expansion exceeds budget");
  constexpr std::size_t deg = 5;
  const Index d = q + 1;
  PolyTensor acc(std::vector<Index>(k, d), deg);
  const auto one = TruncatedPoly::constant(1, deg);
  const auto zero = TruncatedPoly(deg);
  for (Index i = 1; i <= q; ++i) {
    std::vector<TruncatedPoly> v(d, zero);
    v[0] = one;
    v[i] = TruncatedPoly::monomial(1, 2, deg);
    acc.add_product(TruncatedPoly::monomial(1, 1, deg), std::vector<std::vector<TruncatedPoly>>(k, v));
  }
  {
    std::vector<TruncatedPoly> v(d, TruncatedPoly::monomial(1, 3, deg));
    v[0] = one;
    acc.add_product(TruncatedPoly::constant(-1, deg), std::vector<std::vector<TruncatedPoly>>(k, v));
  }
  {
    std::vector<TruncatedPoly> v(d, zero);
    v[0] = one;
    auto scale = one;
    scale += TruncatedPoly::monomial(b0_linear, 1, deg);
    acc.add_product(scale, std::vector<std::vector<TruncatedPoly>>(k, v));
  }
  CwBorderResult res;
  res.terms = q + 2;
  for (std::size_t e = 0; e < deg; ++e)
    if (!acc.coefficient(e).empty()) {
      res.failing_order = e;
      break;
    }
  res.leading = acc.coefficient(deg);
  if (!res.failing_order && !(res.leading == cw_tensor(q, k))) res.failing_order = deg;
  res.pass = !res.failing_order;
  return res;
}

inline CwBorderResult check_cw_border_certificate(std::uint64_t q, std::size_t k) {
  return check_cw_border_certificate(q, k, Rational(-static_cast<long>(q)));
}

struct CutBounds {
  std::size_t min_cut = 0;    // g(G)
  std::size_t max_cut = 0;    // f(G)
  double omega_lower = 0;     // f(G)
  double tau_lower = 0;       // f(G) / |E|
};

inline CutBounds flattening_lower_bounds(const Graph& g) {
  detail::require(g.edge_count() > 0, "graph has no edges");
  const auto cv = cut_values(g);
  return {cv.min_cut, cv.max_cut, static_cast<double>(cv.max_cut),
          static_cast<double>(cv.max_cut) / static_cast<double>(g.edge_count())};
}

struct CycleBound {
  double value = 0;       // k - alpha (1 + (1 - alpha) / (k - 1 + alpha))
  double omega_form = 0;  // (k - 1) / 2 * omega_mm
};

inline CycleBound cycle_bound(std::size_t k, double alpha, double omega_mm = ExponentConstants{}.omega_mm) {
  detail::require(k >= 3 && k % 2 == 1, "cycle bound formula needs odd k >= 3");
  detail::require(alpha > 0 && alpha <= 1, "alpha must lie in (0, 1]");
  const double kk = static_cast<double>(k);
  return {kk - alpha * (1 + (1 - alpha) / (kk - 1 + alpha)), (kk - 1) / 2 * omega_mm};
}

struct TableRow {
  std::size_t k = 0;
  double omega_lower = 0;
  double omega_upper = 0;
  std::size_t edges = 0;
  double tau_lower = 0;
  double tau_upper = 0;
  std::string lower_source;
  std::string upper_source;
};

/// Bounds on omega(T(K_k)) for k = 3..k_max. Lower: max-cut flattening.
/// Upper: the matrix multiplication exponent for k = 3; for k >= 4 the best of
/// the CW construction value (qM(D_(2,2)) = 1) propagated per edge, the
/// triangle cover omega_mm / 3 per edge, and the trivial |E|.
inline std::vector<TableRow> complete_graph_table(std::size_t k_max, const ExponentConstants& c = {}) {
  detail::require(k_max >= 3 && k_max <= kMaxCutVertices, "k_max must lie in [3, 24]");
  const double tau_cw = cw_tau_bound(4, 1.0).tau;
  std::vector<TableRow> rows;
  for (std::size_t k = 3; k <= k_max; ++k) {
    TableRow r;
    r.k = k;
    r.edges = k * (k - 1) / 2;
    const double e = static_cast<double>(r.edges);
    r.omega_lower = static_cast<double>(max_cut(Graph::complete(k)));
    r.lower_source = "max-cut";
    if (k == 3) {
      r.omega_upper = c.omega_mm;
      r.upper_source = "matrix-multiplication";
    } else {
      r.omega_upper = e;
      r.upper_source = "trivial";
      if (e * c.omega_mm / 3 < r.omega_upper) {
        r.omega_upper = e * c.omega_mm / 3;
        r.upper_source = "triangle-cover";
      }
      if (e * tau_cw < r.omega_upper) {
        r.omega_upper = e * tau_cw;
        r.upper_source = "cw";
      }
    }
    r.tau_lower = r.omega_lower / e;
    r.tau_upper = r.omega_upper / e;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tb
