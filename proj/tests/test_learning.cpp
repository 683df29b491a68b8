#include <gtest/gtest.h>

#include <random>

#include "spdq/learning.hpp"

using namespace spdq;

constexpr Strategy C = Strategy::Cooperate;
constexpr Strategy D = Strategy::Defect;

namespace {

// Chi-square statistic of observed counts against a uniform expectation.
double chi_square_uniform(const std::vector<int>& counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  const double expected = total / counts.size();
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

// 0.1% critical values of chi-square for 1 and 2 degrees of freedom.
double chi2_critical(std::size_t df) { return df == 1 ? 10.828 : 13.816; }

}  // namespace

TEST(ActionSets, ColumnOrder) {
  EXPECT_EQ(actions(ActionSet::Static).size(), 2u);
  EXPECT_EQ(actions(ActionSet::Mobile)[2], ActionKind::M);
  EXPECT_EQ(actions(ActionSet::Best)[0], ActionKind::B);
  EXPECT_EQ(actions(ActionSet::Best)[1], ActionKind::M);
  EXPECT_EQ(column_of(ActionSet::PersistBest, ActionKind::P), 1);
  EXPECT_FALSE(column_of(ActionSet::Best, ActionKind::C).has_value());
  EXPECT_EQ(parse_action_set("persist_best"), ActionSet::PersistBest);
  EXPECT_THROW(parse_action_set("bogus"), std::invalid_argument);
}

TEST(QTable, StartsAtZero) {
  for (ActionSet s : {ActionSet::Static, ActionSet::Mobile, ActionSet::Best, ActionSet::PersistBest}) {
    const QTable q = QTable::zeros(s);
    EXPECT_EQ(q.columns(), static_cast<int>(actions(s).size()));
    for (Strategy st : {C, D})
      for (double v : q.row(st)) EXPECT_EQ(v, 0.0);
  }
}

TEST(LearningParams, Validation) {
  EXPECT_NO_THROW((LearningParams{0.75, 0.8, 0.02}.validate()));
  EXPECT_THROW((LearningParams{0.0, 0.8, 0.02}.validate()), std::invalid_argument);
  EXPECT_THROW((LearningParams{0.5, 1.0, 0.02}.validate()), std::invalid_argument);
  EXPECT_THROW((LearningParams{0.5, 0.8, 1.5}.validate()), std::invalid_argument);
}

TEST(SelectAction, GreedyUniqueArgmax) {
  QTable q = QTable::zeros(ActionSet::Static);
  q(C, 0) = 2.1;
  q(C, 1) = 0.3;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto sel = select_action(q, C, ActionSet::Static, {0.75, 0.8, 0.0}, rng);
    ASSERT_EQ(sel.action, ActionKind::C);
    ASSERT_FALSE(sel.explored);
  }
}

TEST(SelectAction, UsesTheStateRow) {
  QTable q = QTable::zeros(ActionSet::Static);
  q(C, 0) = 1.0;
  q(D, 1) = 1.0;
  std::mt19937_64 rng(1);
  EXPECT_EQ(select_action(q, D, ActionSet::Static, {0.75, 0.8, 0.0}, rng).action, ActionKind::D);
}

TEST(SelectAction, FullExplorationIsUniform) {
  for (ActionSet set : {ActionSet::Static, ActionSet::PersistBest}) {
    QTable q = QTable::zeros(set);
    q(C, 0) = 5.0;  // greedy choice would be column 0
    std::mt19937_64 rng(7);
    std::vector<int> counts(actions(set).size(), 0);
    for (int i = 0; i < 100000; ++i) {
      const auto sel = select_action(q, C, set, {0.75, 0.8, 1.0}, rng);
      ASSERT_TRUE(sel.explored);
      ++counts[sel.column];
    }
    EXPECT_LT(chi_square_uniform(counts), chi2_critical(counts.size() - 1));
  }
}

TEST(SelectAction, TiesBrokenUniformly) {
  for (ActionSet set : {ActionSet::Static, ActionSet::Mobile}) {
    const QTable q = QTable::zeros(set);
    std::mt19937_64 rng(13);
    std::vector<int> counts(actions(set).size(), 0);
    for (int i = 0; i < 100000; ++i) {
      const auto sel = select_action(q, D, set, {0.75, 0.8, 0.0}, rng);
      ASSERT_FALSE(sel.explored);
      ++counts[sel.column];
    }
    EXPECT_LT(chi_square_uniform(counts), chi2_critical(counts.size() - 1));
  }
}

TEST(SelectAction, PartialTieOnlyAmongMaxima) {
  QTable q = QTable::zeros(ActionSet::Mobile);
  q(C, 0) = 1.0;
  q(C, 2) = 1.0;
  std::mt19937_64 rng(3);
  int col0 = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto sel = select_action(q, C, ActionSet::Mobile, {0.75, 0.8, 0.0}, rng);
    ASSERT_NE(sel.column, 1);
    col0 += sel.column == 0;
  }
  EXPECT_NEAR(col0 / 10000.0, 0.5, 0.03);
}

TEST(SelectAction, ExplorationFrequency) {
  const QTable q = QTable::zeros(ActionSet::Best);
  std::mt19937_64 rng(99);
  const int n = 1000000;
  int explored = 0;
  for (int i = 0; i < n; ++i) explored += select_action(q, C, ActionSet::Best, {0.75, 0.8, 0.15}, rng).explored;
  EXPECT_NEAR(explored / double(n), 0.15, 0.003);
}

TEST(UpdateQ, FromZero) {
  QTable q = QTable::zeros(ActionSet::Static);
  update_q(q, C, 1, 2.8, D, {0.75, 0.8, 0.0});
  EXPECT_DOUBLE_EQ(q(C, 1), 2.1);
}

TEST(UpdateQ, WithDiscountedFuture) {
  QTable q = QTable::zeros(ActionSet::Static);
  q(C, 0) = 1.0;
  q(D, 0) = 2.0;
  q(D, 1) = -1.0;
  update_q(q, C, 0, 3.0, D, {0.75, 0.8, 0.0});
  EXPECT_NEAR(q(C, 0), 3.7, 1e-12);
}

TEST(UpdateQ, GeometricDecayWithoutReward) {
  QTable q = QTable::zeros(ActionSet::Static);
  q(D, 1) = 0.64;
  q(C, 0) = 0.0;
  q(C, 1) = 0.0;
  update_q(q, D, 1, 0.0, C, {0.75, 0.8, 0.0});
  EXPECT_DOUBLE_EQ(q(D, 1), 0.16);
}

TEST(UpdateQ, ChangesExactlyOneEntry) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    QTable q = QTable::zeros(ActionSet::PersistBest);
    for (Strategy s : {C, D})
      for (int c = 0; c < 3; ++c) q(s, c) = u(rng);
    const QTable before = q;
    const int col = trial % 3;
    const Strategy s = trial % 2 ? C : D;
    update_q(q, s, col, u(rng) + 0.5, C, {0.5, 0.8, 0.0});
    int changed = 0;
    for (Strategy st : {C, D})
      for (int c = 0; c < 3; ++c) changed += q(st, c) != before(st, c);
    EXPECT_LE(changed, 1);
    for (Strategy st : {C, D})
      for (int c = 0; c < 3; ++c)
        if (!(st == s && c == col)) EXPECT_EQ(q(st, c), before(st, c));
  }
}

TEST(UpdateQ, FixedPointWithFullLearningRate) {
  QTable q = QTable::zeros(ActionSet::Static);
  q(D, 0) = 1.0;
  q(D, 1) = 0.5;
  q(C, 1) = 2.0 + 0.8 * 1.0;
  const QTable before = q;
  update_q(q, C, 1, 2.0, D, {1.0, 0.8, 0.0});
  EXPECT_EQ(q, before);
}

TEST(UpdateQ, BoundedUnderBoundedRewards) {
  const double b = 1.9, gamma = 0.8;
  const double bound = 4 * b / (1 - gamma);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> reward(0.0, 4 * b);
  std::uniform_int_distribution<int> col(0, 2), st(0, 1);
  QTable q = QTable::zeros(ActionSet::Mobile);
  for (int i = 0; i < 200000; ++i) {
    const double r = i % 3 == 0 ? 4 * b : reward(rng);  // keep pushing toward the bound
    update_q(q, static_cast<Strategy>(st(rng)), col(rng), r, static_cast<Strategy>(st(rng)),
             {0.75, gamma, 0.0});
    for (Strategy s : {C, D})
      for (double v : q.row(s)) ASSERT_TRUE(v >= 0.0 && v <= bound + 1e-9);
  }
}

TEST(UpdateQ, RejectsNonFiniteReward) {
  QTable q = QTable::zeros(ActionSet::Static);
  EXPECT_THROW(update_q(q, C, 0, std::numeric_limits<double>::infinity(), C, {}),
               contract_violation);
  EXPECT_THROW(update_q(q, C, 0, std::nan(""), C, {}), contract_violation);
  EXPECT_THROW(update_q(q, C, ActionKind::B, ActionSet::Static, 1.0, C, {}), contract_violation);
}
