#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tensorbounds/entropy.hpp"
#include "tensorbounds/relations.hpp"

using namespace tb;

namespace {

Distribution random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  Distribution p(n);
  for (auto& v : p) v = e(rng);
  return normalized(p);
}

double max_marginal_error(const SparseTensor& t, const Distribution& a, const MarginalFamily& m) {
  const auto got = marginals(t, a);
  double err = 0;
  for (std::size_t l = 0; l < m.size(); ++l)
    for (std::size_t i = 0; i < m[l].size(); ++i) err = std::max(err, std::abs(got[l][i] - m[l][i]));
  return err;
}

}  // namespace

TEST(Entropy, Basics) {
  EXPECT_DOUBLE_EQ(entropy({0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(entropy({1.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy(uniform_distribution(6)), std::log2(6.0), 1e-15);
  EXPECT_NEAR(binary_entropy(1.0 / 3), oracle::entropy({1.0 / 3, 2.0 / 3}), 1e-15);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_NEAR(total_variation({0.5, 0.5}, {1.0, 0.0}), 0.5, 1e-15);
}

TEST(Entropy, MarginalsSumToOne) {
  std::mt19937_64 rng(3);
  for (const auto& [name, t] : fixtures::examples()) {
    const auto m = marginals(t, random_distribution(rng, t.size()));
    ASSERT_EQ(m.size(), t.arity());
    for (std::size_t l = 0; l < m.size(); ++l) {
      ASSERT_EQ(m[l].size(), t.dims()[l]) << name;
      double s = 0;
      for (double v : m[l]) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12) << name;
    }
  }
}

TEST(MaxEntropyOnSupport, UniformMarginalsGiveUniform) {
  const auto d22 = dicke_tensor({2, 2});
  const auto r = max_entropy_on_support(d22, marginals(d22, uniform_distribution(6)));
  EXPECT_NEAR(r.entropy, std::log2(6.0), 1e-9);
  EXPECT_LT(r.residual, 1e-9);
  EXPECT_LT(r.dual_gap, 1e-9);

  const auto w3 = wstate_tensor(3);
  const MarginalFamily m(3, {2.0 / 3, 1.0 / 3});
  const auto s = max_entropy_on_support(w3, m);
  EXPECT_NEAR(s.entropy, std::log2(3.0), 1e-9);
  EXPECT_LT(s.dual_gap, 1e-9);
}

TEST(MaxEntropyOnSupport, LiftMatchesMarginalsAndDominates) {
  std::mt19937_64 rng(5);
  for (const auto& [name, t] : fixtures::examples()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = random_distribution(rng, t.size());
      const auto m = marginals(t, p);
      const auto r = max_entropy_on_support(t, m);
      EXPECT_LT(max_marginal_error(t, r.q, m), 1e-7) << name;
      EXPECT_LT(r.residual, 1e-7) << name;
      // P itself is feasible, so both the fit and the dual bound dominate it.
      EXPECT_GE(r.entropy, entropy(p) - 1e-7) << name;
      EXPECT_GE(r.upper, entropy(p) - 1e-12) << name;
      EXPECT_GE(r.upper, r.entropy - 1e-12) << name;
      EXPECT_LT(r.dual_gap, 1e-6) << name;
    }
  }
}

TEST(MaxEntropyCoupling, WholeFiberRelationOnDickeIsUniformOverPairs) {
  const auto t = dicke_tensor({2, 2});
  const auto r = make_relation(t, 0, {{0, 1, 2}, {3, 4, 5}});
  const auto c = max_entropy_coupling(t, r, marginals(t, uniform_distribution(6)));
  EXPECT_EQ(c.pairs.size(), 18u);
  EXPECT_NEAR(c.fit.entropy, std::log2(18.0), 1e-9);
  EXPECT_LT(c.fit.dual_gap, 1e-9);
  EXPECT_LT(c.fit.residual, 1e-9);
}

TEST(MaxEntropyCoupling, DiagonalCouplingIsFeasible) {
  std::mt19937_64 rng(9);
  for (const auto& [name, t] : fixtures::examples()) {
    const auto p = random_distribution(rng, t.size());
    for (std::size_t ax = 0; ax < t.arity(); ++ax) {
      for (const auto& f : fibers(t, ax)) {
        if (f.size() < 2) continue;
        const auto r = make_relation(t, ax, std::vector<std::vector<std::size_t>>{f});
        const auto c = max_entropy_coupling(t, r, marginals(t, p));
        EXPECT_GE(c.fit.upper, entropy(p) - 1e-12) << name;
        EXPECT_LT(c.fit.residual, 1e-6) << name;
        double mass = 0;
        for (double v : c.fit.q) mass += v;
        EXPECT_NEAR(mass, 1.0, 1e-9) << name;
        break;
      }
    }
  }
}

TEST(SolveIpf, IndependentProductForTwoCrossedFamilies) {
  // 2x3 grid with row and column targets: the maximizer is the product.
  IpfProblem prob;
  prob.cell_count = 6;
  prob.group_of = {{0, 0, 0, 1, 1, 1}, {0, 1, 2, 0, 1, 2}};
  prob.targets = {{0.25, 0.75}, {0.5, 0.3, 0.2}};
  const auto r = solve_ipf(prob);
  const double expect = oracle::entropy({0.25, 0.75}) + oracle::entropy({0.5, 0.3, 0.2});
  EXPECT_NEAR(r.entropy, expect, 1e-9);
  EXPECT_LT(r.dual_gap, 1e-9);
  EXPECT_NEAR(r.q[4], 0.75 * 0.3, 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(Maximin, DickeOneOneOneAndTriangle) {
  const auto d = maximin_marginal_entropy(dicke_tensor({1, 1, 1}));
  EXPECT_NEAR(d.value, std::log2(3.0), 1e-6);
  EXPECT_NEAR(d.value, min_marginal_entropy(dicke_tensor({1, 1, 1}), d.p), 1e-15);
  const auto c = maximin_marginal_entropy(graph_tensor(Graph::cycle(3), 2));
  EXPECT_NEAR(c.value, 2.0, 1e-6);
  EXPECT_THROW(maximin_marginal_entropy(wstate_tensor(4)), InvalidArgument);
}

TEST(Maximin, NeverExceedsSmallestLegAlphabet) {
  for (const auto& t : {wstate_tensor(3), cw_tensor(2, 3), dicke_tensor({2, 1})}) {
    const auto r = maximin_marginal_entropy(t, 4, 2000);
    double cap = 64;
    for (std::size_t l = 0; l < 3; ++l) cap = std::min(cap, std::log2(static_cast<double>(t.occurring(l).size())));
    EXPECT_LE(r.value, cap + 1e-12);
    EXPECT_GE(r.value, min_marginal_entropy(t, uniform_distribution(t.size())) - 1e-12);
  }
}
