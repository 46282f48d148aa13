#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tensorbounds/subrank.hpp"

using namespace tb;

namespace {

double h(double x) { return oracle::entropy({x, 1 - x}); }

}  // namespace

TEST(MainBound, KnownValues) {
  EXPECT_NEAR(main_lower_bound(dicke_tensor({2, 2})).value, 1.0, 1e-9);
  EXPECT_NEAR(main_lower_bound(dicke_tensor({1, 1, 1})).value, std::log2(3.0), 1e-9);
  EXPECT_NEAR(main_lower_bound(unit_tensor(2, 3)).value, 1.0, 1e-9);
  EXPECT_NEAR(main_lower_bound(unit_tensor(3, 4)).value, std::log2(3.0), 1e-9);
}

TEST(MainBound, WStatesMatchBinaryEntropy) {
  for (std::size_t k = 3; k <= 7; ++k) {
    const auto c = main_lower_bound(wstate_tensor(k));
    EXPECT_NEAR(c.value, h(1.0 / static_cast<double>(k)), 1e-9) << "k=" << k;
    EXPECT_NEAR(wstate_closed_form(k), h(1.0 / static_cast<double>(k)), 1e-15);
  }
}

TEST(MainBound, NeverExceedsFlatteningRank) {
  for (const auto& [name, t] : fixtures::examples()) {
    if (exhaustive_relation_count(t) > 5000) continue;
    const auto c = main_lower_bound(t);
    std::size_t best = t.size();
    for (std::uint64_t mask = 1; mask + 1 < (1ULL << t.arity()); ++mask) {
      std::vector<std::size_t> left;
      for (std::size_t l = 0; l < t.arity(); ++l)
        if ((mask >> l) & 1) left.push_back(l);
      best = std::min(best, oracle::flattening_rank(t, left));
    }
    EXPECT_LE(c.value, std::log2(static_cast<double>(best)) + 1e-9) << name;
    EXPECT_NEAR(flattening_upper_bound(t), std::log2(static_cast<double>(best)), 1e-12) << name;
  }
  EXPECT_LE(main_lower_bound(fixtures::split_pair()).value, 1e-9);
}

TEST(MainBound, CertificateRecomputes) {
  for (const auto& [name, t] : fixtures::examples()) {
    if (exhaustive_relation_count(t) > 5000) continue;
    const auto c = main_lower_bound(t);
    EXPECT_NEAR(recompute_bound(c), c.value, 1e-12) << name;
    EXPECT_NEAR(c.h_p, oracle::entropy(c.p), 1e-12) << name;
    double mx = 0;
    for (const auto& e : c.evaluations) {
      EXPECT_GE(e.penalty, 0.0) << name;
      EXPECT_GE(e.rank, 1u) << name;
      mx = std::max(mx, e.penalty);
    }
    EXPECT_EQ(mx, c.max_penalty) << name;
    if (!c.evaluations.empty()) {
      ASSERT_TRUE(c.worst.has_value());
      EXPECT_NEAR(c.evaluations[*c.worst].penalty, c.max_penalty, 1e-12);
    }
  }
}

TEST(MainBound, EnumerationModesAgree) {
  for (const auto& lambda : std::vector<std::vector<std::size_t>>{{2, 2}, {2, 1, 1}, {1, 1, 1}}) {
    const auto t = dicke_tensor(lambda);
    BoundOptions ex, rc;
    ex.enumeration = Enumeration::Exhaustive;
    rc.enumeration = Enumeration::RankClosed;
    const auto a = main_lower_bound(t, ex), b = main_lower_bound(t, rc);
    EXPECT_NEAR(a.value, b.value, 1e-9);
    EXPECT_EQ(a.enumeration, Enumeration::Exhaustive);
    EXPECT_EQ(b.enumeration, Enumeration::RankClosed);
  }
  BoundOptions small;
  small.budget = 60;
  EXPECT_EQ(main_lower_bound(dicke_tensor({2, 2}), small).enumeration, Enumeration::RankClosed);
}

TEST(MainBound, SymmetryDoesNotChangeValue) {
  const auto t = dicke_tensor({2, 2});
  BoundOptions o;
  o.symmetry = dicke_generators({2, 2});
  const auto s = main_lower_bound(t, o);
  EXPECT_NEAR(s.value, main_lower_bound(t).value, 1e-9);
  EXPECT_EQ(s.symmetry_order, 48u);
  EXPECT_LT(s.relation_count, 96u);
}

TEST(MainBound, StrategiesNeverWorseThanUniform) {
  for (const auto& t : {dicke_tensor({2, 1}), wstate_tensor(4), cw_tensor(1, 4)}) {
    const double base = main_lower_bound(t).value;
    BoundOptions asc;
    asc.strategy = PStrategy::Ascent;
    asc.restarts = 3;
    asc.ascent_steps = 10;
    EXPECT_GE(main_lower_bound(t, asc).value, base - 1e-12);
    BoundOptions user;
    user.strategy = PStrategy::User;
    user.user_p = Distribution(t.size(), 1.0);
    user.user_p->front() = 5.0;
    EXPECT_GE(main_lower_bound(t, user).value, base - 1e-12);
  }
}

TEST(MainBound, RejectsBadInput) {
  BoundOptions o;
  o.labeling = Labeling{{0, 0}, {0, 0}, {0, 0}};
  EXPECT_THROW(main_lower_bound(wstate_tensor(3), o), NotTightError);
  EXPECT_THROW(main_lower_bound(cw_tensor(2, 3)), NotTightError);
  BoundOptions user;
  user.strategy = PStrategy::User;
  EXPECT_THROW(main_lower_bound(wstate_tensor(3), user), InvalidArgument);
}

TEST(StrassenBound, TripartiteValues) {
  EXPECT_NEAR(strassen_bound(dicke_tensor({1, 1, 1})).value, std::log2(3.0), 1e-6);
  EXPECT_NEAR(strassen_bound(graph_tensor(Graph::cycle(3), 2)).value, 2.0, 1e-6);
  EXPECT_NEAR(strassen_bound(wstate_tensor(3)).value, h(1.0 / 3), 1e-4);
  EXPECT_THROW(strassen_bound(wstate_tensor(4)), InvalidArgument);
}

TEST(Penalty, MarginalFamilyIsLiftedFirst) {
  const auto t = dicke_tensor({2, 2});
  const auto a = require_labeling(t, 1);
  const auto r = make_relation(t, 0, {{0, 1, 2}, {3, 4, 5}});
  const auto via_m = penalty(t, marginals(t, uniform_distribution(6)), a, r);
  const auto via_p = penalty_at(t, uniform_distribution(6), a, r);
  EXPECT_NEAR(via_m.penalty, via_p.penalty, 1e-12);
  // H(Q) = log2 18, H(P) = log2 6, rank 2.
  EXPECT_NEAR(via_p.penalty, std::log2(3.0) / 2, 1e-9);
}
