#pragma once

// Exact linear algebra over the rationals: fraction-free elimination for rank,
// reduced row echelon form for nullspaces.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tensorbounds/errors.hpp"

namespace tb {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  Rational r;
  if (s.empty() || r.set_str(s, 10) != 0) throw InvalidArgument("malformed rational '" + std::string(text) + "'");
  if (r.get_den() == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

using DenseMatrix = std::vector<std::vector<Rational>>;

/// One row of a sparse integer matrix: strictly increasing column indices.
using SparseRow = std::vector<std::pair<std::size_t, Integer>>;

namespace detail {

inline void make_primitive(SparseRow& row) {
  if (row.empty()) return;
  Integer g = abs(row.front().second);
  for (const auto& [c, v] : row) {
    if (g == 1) break;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g != 1)
    for (auto& [c, v] : row) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  if (row.front().second < 0)
    for (auto& [c, v] : row) v = -v;
}

// row <- a*row - b*pivot, where a, b cancel the shared leading entry.
inline SparseRow eliminate(const SparseRow& row, const SparseRow& pivot) {
  const Integer& a = pivot.front().second;
  const Integer& b = row.front().second;
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  const Integer sa = a / g;
  const Integer sb = b / g;
  SparseRow out;
  out.reserve(row.size() + pivot.size());
  std::size_t i = 1, j = 1;
  while (i < row.size() || j < pivot.size()) {
    if (j >= pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
      out.emplace_back(row[i].first, sa * row[i].second);
      ++i;
    } else if (i >= row.size() || pivot[j].first < row[i].first) {
      out.emplace_back(pivot[j].first, -sb * pivot[j].second);
      ++j;
    } else {
      Integer v = sa * row[i].second - sb * pivot[j].second;
      if (v != 0) out.emplace_back(row[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  make_primitive(out);
  return out;
}

}  // namespace detail

/// Incremental row echelon basis over Q using fraction-free (integer) row
/// operations. Rows are reduced against existing pivots on insertion; the
/// rank is the number of pivots kept.
class RowEchelon {
 public:
  /// Returns true when the row was independent of the rows seen so far.
  bool insert(SparseRow row) {
    std::erase_if(row, [](const auto& e) { return e.second == 0; });
    detail::make_primitive(row);
    while (!row.empty()) {
      auto it = std::lower_bound(pivots_.begin(), pivots_.end(), row.front().first,
                                 [](const SparseRow& p, std::size_t c) { return p.front().first < c; });
      if (it == pivots_.end() || it->front().first != row.front().first) {
        pivots_.insert(it, std::move(row));
        return true;
      }
      row = detail::eliminate(row, *it);
    }
    return false;
  }

  bool insert_dense(const std::vector<Rational>& row) { return insert(to_sparse(row)); }

  /// True when the row lies in the span of the inserted rows.
  bool contains(SparseRow row) const {
    std::erase_if(row, [](const auto& e) { return e.second == 0; });
    detail::make_primitive(row);
    while (!row.empty()) {
      auto it = std::lower_bound(pivots_.begin(), pivots_.end(), row.front().first,
                                 [](const SparseRow& p, std::size_t c) { return p.front().first < c; });
      if (it == pivots_.end() || it->front().first != row.front().first) return false;
      row = detail::eliminate(row, *it);
    }
    return true;
  }

  std::size_t rank() const { return pivots_.size(); }

  static SparseRow to_sparse(const std::vector<Rational>& row) {
    Integer lcm = 1;
    for (const auto& v : row)
      if (v != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
    SparseRow out;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0) continue;
      Integer scaled = row[c].get_num() * (lcm / row[c].get_den());
      out.emplace_back(c, std::move(scaled));
    }
    return out;
  }

  static SparseRow to_sparse(const std::vector<std::int64_t>& row) {
    SparseRow out;
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c] != 0) out.emplace_back(c, Integer(static_cast<long>(row[c])));
    return out;
  }

 private:
  std::vector<SparseRow> pivots_;  // sorted by leading column
};

inline std::size_t rank_sparse(std::vector<SparseRow> rows) {
  // Sparsest rows first keeps fill-in low on block-structured inputs.
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  RowEchelon ech;
  for (auto& r : rows) ech.insert(std::move(r));
  return ech.rank();
}

/// Bareiss fraction-free elimination on a dense integer matrix.
inline std::size_t rank_bareiss(std::vector<std::vector<Integer>> m) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m.front().size();
  Integer prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        m[i][j] = m[r][c] * m[i][j] - m[i][c] * m[r][j];
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
  }
  return r;
}

inline std::size_t rank(const DenseMatrix& m) {
  std::vector<SparseRow> rows;
  rows.reserve(m.size());
  for (const auto& row : m) rows.push_back(RowEchelon::to_sparse(row));
  return rank_sparse(std::move(rows));
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(DenseMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    const Rational inv = 1 / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Basis of {x : A x = 0} for an m x cols matrix A.
inline std::vector<std::vector<Rational>> nullspace(DenseMatrix a, std::size_t cols) {
  for (const auto& row : a) detail::require(row.size() == cols, "nullspace: ragged matrix");
  const auto pivots = rref(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Scales a rational vector to a primitive integer vector with the same direction.
inline std::vector<Integer> primitive_integer(const std::vector<Rational>& v) {
  Integer lcm = 1;
  for (const auto& x : v)
    if (x != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den_mpz_t());
  std::vector<Integer> out(v.size());
  Integer g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i].get_num() * (lcm / v[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
  }
  if (g > 1)
    for (auto& x : out) x /= g;
  return out;
}

}  // namespace tb
