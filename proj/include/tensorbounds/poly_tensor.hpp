#pragma once

// Tensors whose entries are polynomials in a degeneration parameter eps,
// truncated at a fixed degree. Used to check border-rank identities exactly.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/errors.hpp"
#include "tensorbounds/linalg.hpp"
#include "tensorbounds/tensor.hpp"

namespace tb {

/// Polynomial in eps with rational coefficients; terms above max_degree are dropped.
class TruncatedPoly {
 public:
  explicit TruncatedPoly(std::size_t max_degree = 0) : c_(max_degree + 1, Rational(0)) {}

  static TruncatedPoly constant(const Rational& v, std::size_t max_degree) {
    TruncatedPoly p(max_degree);
    p.c_[0] = v;
    return p;
  }

  /// coeff * eps^degree (zero if degree exceeds the truncation).
  static TruncatedPoly monomial(const Rational& coeff, std::size_t degree, std::size_t max_degree) {
    TruncatedPoly p(max_degree);
    if (degree <= max_degree) p.c_[degree] = coeff;
    return p;
  }

  std::size_t max_degree() const { return c_.size() - 1; }
  const Rational& operator[](std::size_t d) const { return c_[d]; }
  Rational& operator[](std::size_t d) { return c_[d]; }

  bool is_zero() const {
    for (const auto& v : c_)
      if (v != 0) return false;
    return true;
  }

  TruncatedPoly& operator+=(const TruncatedPoly& o) {
    check(o);
    for (std::size_t d = 0; d < c_.size(); ++d) c_[d] += o.c_[d];
    return *this;
  }

  TruncatedPoly& operator-=(const TruncatedPoly& o) {
    check(o);
    for (std::size_t d = 0; d < c_.size(); ++d) c_[d] -= o.c_[d];
    return *this;
  }

  friend TruncatedPoly operator*(const TruncatedPoly& a, const TruncatedPoly& b) {
    a.check(b);
    TruncatedPoly out(a.max_degree());
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; i + j < a.c_.size(); ++j)
        if (b.c_[j] != 0) out.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return out;
  }

  bool operator==(const TruncatedPoly& o) const { return c_ == o.c_; }

 private:
  void check(const TruncatedPoly& o) const {
    detail::require(o.c_.size() == c_.size(), "truncated polynomials of different degree");
  }

  std::vector<Rational> c_;
};

class PolyTensor {
 public:
  PolyTensor(std::vector<Index> dims, std::size_t max_degree) : dims_(std::move(dims)), max_degree_(max_degree) {}

  const std::vector<Index>& dims() const { return dims_; }
  std::size_t max_degree() const { return max_degree_; }
  const std::map<Point, TruncatedPoly>& entries() const { return entries_; }

  /// Adds scale * v_1 (x) ... (x) v_k, where factors[i] has dims()[i] entries.
  void add_product(const TruncatedPoly& scale, const std::vector<std::vector<TruncatedPoly>>& factors) {
    detail::require(factors.size() == dims_.size(), "factor count does not match arity");
    std::vector<std::vector<std::pair<Index, const TruncatedPoly*>>> nz(factors.size());
    for (std::size_t l = 0; l < factors.size(); ++l) {
      detail::require(factors[l].size() == dims_[l], "factor length does not match leg dimension");
      for (Index i = 0; i < dims_[l]; ++i)
        if (!factors[l][i].is_zero()) nz[l].emplace_back(i, &factors[l][i]);
      if (nz[l].empty()) return;
    }
    std::vector<std::size_t> pos(factors.size(), 0);
    Point p(factors.size());
    while (true) {
      TruncatedPoly v = scale;
      for (std::size_t l = 0; l < nz.size(); ++l) {
        p[l] = nz[l][pos[l]].first;
        v = v * *nz[l][pos[l]].second;
      }
      accumulate(p, v);
      std::size_t l = nz.size();
      while (l-- > 0) {
        if (++pos[l] < nz[l].size()) break;
        pos[l] = 0;
      }
      if (l == static_cast<std::size_t>(-1)) break;
    }
  }

  /// Coefficient of eps^d as an ordinary sparse tensor.
  SparseTensor coefficient(std::size_t d) const {
    detail::require(d <= max_degree_, "degree beyond truncation");
    std::vector<std::pair<Point, Rational>> e;
    for (const auto& [p, poly] : entries_)
      if (poly[d] != 0) e.emplace_back(p, poly[d]);
    return SparseTensor(dims_, std::move(e));
  }

 private:
  void accumulate(const Point& p, const TruncatedPoly& v) {
    if (v.is_zero()) return;
    auto it = entries_.find(p);
    if (it == entries_.end()) {
      entries_.emplace(p, v);
      return;
    }
    it->second += v;
    if (it->second.is_zero()) entries_.erase(it);
  }

  std::vector<Index> dims_;
  std::size_t max_degree_;
  std::map<Point, TruncatedPoly> entries_;
};

}  // namespace tb
