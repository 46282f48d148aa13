#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tensorbounds/exponent.hpp"

using namespace tb;

TEST(SumInequality, SolvesForTau) {
  EXPECT_NEAR(tau_from_sum_inequality({2}, 2), 1.0, 1e-10);
  EXPECT_NEAR(tau_from_sum_inequality({7, 7}, 9), std::log(4.5) / std::log(7.0), 1e-10);
  EXPECT_NEAR(tau_from_sum_inequality({4}, 16), 2.0, 1e-10);
  const double t = tau_from_sum_inequality({2, 3, 5}, 20);
  EXPECT_NEAR(std::pow(2, t) + std::pow(3, t) + std::pow(5, t), 20.0, 1e-9);
  EXPECT_THROW(tau_from_sum_inequality({}, 3), InvalidArgument);
  EXPECT_THROW(tau_from_sum_inequality({1}, 3), InvalidArgument);
  EXPECT_THROW(tau_from_sum_inequality({2, 2}, 2), InvalidArgument);
}

TEST(CwTau, ScanFindsMinimum) {
  const auto four = cw_tau_bound(4, 1.0);
  EXPECT_EQ(four.q, 7u);
  EXPECT_NEAR(four.tau, std::log(4.5) / std::log(7.0), 1e-12);
  const double h3 = oracle::entropy({1.0 / 3, 2.0 / 3});
  const auto three = cw_tau_bound(3, h3);
  EXPECT_EQ(three.q, 8u);
  EXPECT_NEAR(three.tau, 0.8012107536, 1e-9);
  for (std::uint64_t q = 2; q < 50; ++q) EXPECT_GE(cw_tau_value(q, h3), three.tau);
  EXPECT_THROW(cw_tau_bound(2, 1.0), InvalidArgument);
}

TEST(BorderToRank, BinomialFactor) {
  EXPECT_EQ(border_to_rank_factor(3, 2), 6);
  EXPECT_EQ(border_to_rank_factor(7, 0), 1);
  EXPECT_EQ(border_to_rank_factor(4, 5), 56);
  EXPECT_EQ(power_trick(3, 7, 2), 27);
  EXPECT_EQ(power_trick(4, 4, 5), 4);
}

TEST(CwBorder, IdentityHoldsForSmallCases) {
  for (std::uint64_t q = 1; q <= 4; ++q)
    for (std::size_t k = 2; k <= 5; ++k) {
      const auto r = check_cw_border_certificate(q, k);
      EXPECT_TRUE(r.pass) << "q=" << q << " k=" << k;
      EXPECT_EQ(r.terms, q + 2);
      EXPECT_TRUE(r.leading == cw_tensor(q, k));
    }
}

TEST(CwBorder, WrongLinearTermFails) {
  const auto r = check_cw_border_certificate(2, 4, Rational(-1));
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.failing_order.has_value());
  EXPECT_EQ(*r.failing_order, 1u);
  EXPECT_THROW(check_cw_border_certificate(40, 6), BudgetExceeded);
}

TEST(CycleBound, Values) {
  EXPECT_NEAR(cycle_bound(5, 1).value, 4.0, 1e-12);
  EXPECT_NEAR(cycle_bound(3, 1).value, 2.0, 1e-12);
  EXPECT_NEAR(cycle_bound(5, 0.3029805).value, 4.647941119, 1e-8);
  EXPECT_NEAR(cycle_bound(5, 1, 2.5).omega_form, 5.0, 1e-12);
  EXPECT_THROW(cycle_bound(4, 0.5), InvalidArgument);
  EXPECT_THROW(cycle_bound(5, 0.0), InvalidArgument);
}

TEST(FlatteningLowerBounds, MaxCutOverEdges) {
  const auto k4 = flattening_lower_bounds(Graph::complete(4));
  EXPECT_EQ(k4.max_cut, 4u);
  EXPECT_NEAR(k4.tau_lower, 4.0 / 6, 1e-15);
  EXPECT_EQ(flattening_lower_bounds(Graph::cycle(5)).max_cut, 4u);
  EXPECT_EQ(flattening_lower_bounds(Graph::cycle(6)).max_cut, 6u);
  EXPECT_THROW(flattening_lower_bounds(Graph(3, {})), InvalidArgument);
}

TEST(CompleteGraphTable, MatchesReferenceRows) {
  const std::vector<double> lo{2, 4, 6, 9, 12, 16, 20, 25};
  const std::vector<double> up{2.37287, 4.63766, 7.72943, 11.5942, 16.2319, 21.6425, 27.8260, 34.7825};
  const auto rows = complete_graph_table(10);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t k = i + 3;
    EXPECT_EQ(rows[i].k, k);
    EXPECT_EQ(rows[i].edges, k * (k - 1) / 2);
    EXPECT_NEAR(rows[i].omega_lower, lo[i], 1e-12);
    EXPECT_NEAR(rows[i].omega_upper, up[i], 1e-4) << "k=" << k;
    const double kk = static_cast<double>(k);
    const double tau_lo = k % 2 ? 0.5 + 1 / (2 * kk) : 0.5 + 1 / (2 * (kk - 1));
    EXPECT_NEAR(rows[i].tau_lower, tau_lo, 1e-12);
    EXPECT_NEAR(rows[i].tau_upper, k == 3 ? 0.790955 : 0.772943, 1e-6);
    EXPECT_LE(rows[i].omega_lower, rows[i].omega_upper);
  }
  EXPECT_THROW(complete_graph_table(2), InvalidArgument);
}
