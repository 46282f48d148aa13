#include <gtest/gtest.h>

#include <random>

#include "tensorbounds/linalg.hpp"

using namespace tb;

namespace {

// Random integer matrix of bounded rank: product of an r x inner and inner x cols factor.
std::vector<std::vector<Integer>> random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t inner) {
  std::uniform_int_distribution<int> d(-3, 3);
  std::vector<std::vector<long>> a(rows, std::vector<long>(inner)), b(inner, std::vector<long>(cols));
  for (auto& r : a)
    for (auto& x : r) x = d(rng);
  for (auto& r : b)
    for (auto& x : r) x = d(rng);
  std::vector<std::vector<Integer>> m(rows, std::vector<Integer>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t l = 0; l < inner; ++l) m[i][j] += a[i][l] * b[l][j];
  return m;
}

}  // namespace

TEST(Rational, ParsesFractionsAndIntegers) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational(" -4 "), Rational(-4));
  EXPECT_EQ(to_string(parse_rational("10/4")), "5/2");
}

TEST(Rational, RejectsMalformedInput) {
  EXPECT_THROW(parse_rational("abc"), InvalidArgument);
  EXPECT_THROW(parse_rational("1/0"), InvalidArgument);
  EXPECT_THROW(parse_rational(""), InvalidArgument);
}

TEST(Rank, SparseEliminationMatchesBareiss) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 9, cols = 1 + rng() % 9, inner = rng() % 7;
    const auto m = random_matrix(rng, rows, cols, inner);
    std::vector<SparseRow> sparse;
    DenseMatrix dense;
    for (const auto& r : m) {
      SparseRow s;
      std::vector<Rational> d;
      for (std::size_t j = 0; j < cols; ++j) {
        if (r[j] != 0) s.emplace_back(j, r[j]);
        d.emplace_back(r[j]);
      }
      sparse.push_back(std::move(s));
      dense.push_back(std::move(d));
    }
    const auto expected = rank_bareiss(m);
    EXPECT_LE(expected, std::min<std::size_t>(inner, std::min(rows, cols)));
    EXPECT_EQ(rank_sparse(sparse), expected);
    EXPECT_EQ(rank(dense), expected);
  }
}

TEST(Rank, EchelonMembership) {
  RowEchelon e;
  EXPECT_TRUE(e.insert_dense({1, 2, 3}));
  EXPECT_TRUE(e.insert_dense({0, 1, 1}));
  EXPECT_FALSE(e.insert_dense({2, 5, 7}));
  EXPECT_TRUE(e.contains(RowEchelon::to_sparse(std::vector<Rational>{1, 3, 4})));
  EXPECT_FALSE(e.contains(RowEchelon::to_sparse(std::vector<Rational>{0, 0, 1})));
  EXPECT_EQ(e.rank(), 2u);
}

TEST(Nullspace, BasisIsAnnihilatedAndHasFullDimension) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 7;
    const auto m = random_matrix(rng, rows, cols, rng() % 5);
    DenseMatrix a;
    for (const auto& r : m) a.emplace_back(r.begin(), r.end());
    const auto basis = nullspace(a, cols);
    EXPECT_EQ(basis.size(), cols - rank_bareiss(m));
    for (const auto& v : basis)
      for (const auto& r : a) {
        Rational s = 0;
        for (std::size_t j = 0; j < cols; ++j) s += r[j] * v[j];
        EXPECT_EQ(s, 0);
      }
    DenseMatrix b(basis.begin(), basis.end());
    EXPECT_EQ(rank(b), basis.size());
  }
}

TEST(Nullspace, PrimitiveIntegerScaling) {
  const auto v = primitive_integer({Rational(1, 2), Rational(-3, 4), Rational(0)});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], 2);
  EXPECT_EQ(v[1], -3);
  EXPECT_EQ(v[2], 0);
}
