#include "accsim/metrics.h"

#include <gtest/gtest.h>

#include <random>

#include "accsim/rng.h"
#include "accsim/stochastic.h"
#include "test_support.h"

namespace accsim {
namespace {

class DiamondMetrics : public ::testing::Test {
 protected:
  Map map = testing::diamond_map();
  RouteList routes = enumerate_routes(map, testing::diamond_journey(map), 1500.0);
  IncidenceMatrix inc = build_incidence(routes, map);

  TrialOutcome run(std::initializer_list<std::string_view> truth,
                   std::initializer_list<std::string_view> perceived) {
    EdgeSet t = EdgeSet::from_ids(map, truth);
    return evaluate_trial(routes, t, select_route(inc, EdgeSet::from_ids(map, perceived)));
  }
};

TEST_F(DiamondMetrics, FalseImpassibility) {
  TrialOutcome o = run({"e3"}, {"e1", "e3"});
  EXPECT_TRUE(o.reported_impassible);
  EXPECT_TRUE(o.gt_navigable);
  EXPECT_EQ(o.dist_perfect, 200.0);
  EXPECT_TRUE(o.error_a);
  EXPECT_FALSE(o.error_b);
  EXPECT_FALSE(o.error_c);
  EXPECT_THROW(score_vs_perfect(o), Error);
}

TEST_F(DiamondMetrics, FalselyNavigable) {
  TrialOutcome o = run({"e2", "e4"}, {"e4"});
  EXPECT_FALSE(o.reported_impassible);
  EXPECT_FALSE(o.gt_navigable);
  EXPECT_EQ(o.dist_tool, 200.0);
  EXPECT_EQ(o.nbarriers_tool, 1u);
  EXPECT_TRUE(o.error_c);
  EXPECT_FALSE(o.error_a);
  EXPECT_FALSE(o.error_b);
  EXPECT_THROW(score_vs_oblivious(o), Error);
}

TEST_F(DiamondMetrics, PerfectEmptyWorld) {
  TrialOutcome o = run({}, {});
  EXPECT_FALSE(o.reported_impassible);
  EXPECT_TRUE(o.gt_navigable);
  EXPECT_EQ(o.dist_tool, 200.0);
  EXPECT_EQ(o.dist_perfect, 200.0);
  EXPECT_EQ(o.dist_oblivious, 200.0);
  EXPECT_FALSE(o.error_a || o.error_b || o.error_c);
  EXPECT_EQ(score_vs_perfect(o), 0.0);
  EXPECT_EQ(score_vs_oblivious(o), 0.0);
}

TEST_F(DiamondMetrics, UnnecessarilyLongRoute) {
  TrialOutcome o = run({}, {"e1"});
  EXPECT_EQ(o.dist_tool, 300.0);
  EXPECT_TRUE(o.error_b);
  EXPECT_DOUBLE_EQ(score_vs_perfect(o), 0.5);
}

TEST_F(DiamondMetrics, ScoreArithmetic) {
  // Truth {e2}; an oblivious tool walks into it on route 0.
  TrialOutcome blind = run({"e2"}, {});
  EXPECT_EQ(blind.nbarriers_tool, 1u);
  EXPECT_EQ(blind.dist_perfect, 300.0);
  EXPECT_DOUBLE_EQ(score_vs_perfect(blind), (200.0 + 500.0 - 300.0) / 300.0);
  EXPECT_EQ(score_vs_oblivious(blind), 0.0);

  // A perfect tool takes route 1 instead.
  TrialOutcome informed = run({"e2"}, {"e2"});
  EXPECT_EQ(informed.nbarriers_oblivious, 1u);
  EXPECT_EQ(score_vs_perfect(informed), 0.0);
  EXPECT_DOUBLE_EQ(score_vs_oblivious(informed), (300.0 - (200.0 + 500.0)) / 300.0);
}

TEST(Scores, WorkedPenaltyExample) {
  TrialOutcome o;
  o.gt_navigable = true;
  o.reported_impassible = false;
  o.dist_tool = 1100.0;
  o.nbarriers_tool = 2;
  o.dist_perfect = 1100.0;
  // 1100 m + 2 x 500 m = 2100 m effective.
  EXPECT_DOUBLE_EQ(score_vs_perfect(o) * 1100.0 + 1100.0, 2100.0);
  EXPECT_NEAR(score_vs_perfect(o), 0.909, 5e-4);
  EXPECT_DOUBLE_EQ(score_vs_perfect(o, 0.0), 0.0);
}

TEST(EvaluateTrial, FastAndScanPathsAgree) {
  Map map = testing::grid_map(5, 10.0);
  RouteList routes = enumerate_routes(
      map, {"j", map.node_index("n0_0"), map.node_index("n3_3"), 0.0}, 100.0);
  IncidenceMatrix inc = build_incidence(routes, map);
  BatchSelector selector(inc);
  for (std::uint64_t t = 0; t < 500; ++t) {
    RngStream g = derive_stream(1, {Purpose::kGroundTruth, 0, 0, 0, 0, t});
    EdgeSet truth = sample_ground_truth(map, 0.25, g);
    RngStream p = derive_stream(1, {Purpose::kPerception, 0, 0, 0, 0, t});
    EdgeSet seen = apply_perception(map, truth, {0.8, 0.9}, p);
    const Selection tool = selector.select(seen);
    TrialOutcome a = evaluate_trial(routes, truth, tool);
    TrialOutcome b = evaluate_trial(routes, truth, tool, selector.select(truth));
    EXPECT_EQ(a.gt_navigable, b.gt_navigable);
    EXPECT_EQ(a.dist_perfect, b.dist_perfect);
    EXPECT_EQ(a.error_a, a.reported_impassible && a.gt_navigable);
    EXPECT_EQ(a.error_c, !a.reported_impassible && a.nbarriers_tool >= 1);
  }
}

TEST(EvaluateTrial, PerfectToolMakesNoErrors) {
  Map map = testing::grid_map(5, 10.0);
  RouteList routes = enumerate_routes(
      map, {"j", map.node_index("n0_1"), map.node_index("n4_3"), 0.0}, 100.0);
  IncidenceMatrix inc = build_incidence(routes, map);
  for (std::uint64_t t = 0; t < 1000; ++t) {
    RngStream g = derive_stream(2, {Purpose::kGroundTruth, 0, 0, 0, 0, t});
    EdgeSet truth = sample_ground_truth(map, 0.3, g);
    RngStream p = derive_stream(2, {Purpose::kPerception, 0, 0, 0, 0, t});
    EdgeSet seen = apply_perception(map, truth, ToolProfile::perfect(), p);
    TrialOutcome o = evaluate_trial(routes, truth, select_route(inc, seen));
    EXPECT_FALSE(o.error_a || o.error_b || o.error_c);
    EXPECT_EQ(o.reported_impassible, !o.gt_navigable);
    if (o.scorable()) EXPECT_EQ(score_vs_perfect(o), 0.0);
    if (!o.reported_impassible) EXPECT_EQ(o.nbarriers_tool, 0u);
  }
}

TEST(EvaluateTrial, EmptyRouteList) {
  Map map = testing::single_edge_map();
  RouteList none{"j", 10.0, {}};
  TrialOutcome o = evaluate_trial(none, EdgeSet(1), Selection::impassible());
  EXPECT_FALSE(o.gt_navigable);
  EXPECT_TRUE(o.reported_impassible);
  EXPECT_FALSE(o.has_oblivious);
  EXPECT_FALSE(o.error_a);
}

TrialOutcome navigable_route(double tool, double perfect, double oblivious,
                             std::uint32_t barriers) {
  TrialOutcome o;
  o.gt_navigable = true;
  o.reported_impassible = false;
  o.dist_tool = tool;
  o.dist_perfect = perfect;
  o.has_oblivious = true;
  o.dist_oblivious = oblivious;
  o.nbarriers_tool = barriers;
  o.error_b = tool > perfect;
  o.error_c = barriers > 0;
  return o;
}

TEST(Aggregate, ConditionedFractions) {
  TrialOutcome impassible_report = navigable_route(0, 200, 200, 0);
  impassible_report.reported_impassible = true;
  impassible_report.error_a = true;
  impassible_report.error_b = false;
  TrialOutcome gt_impassible;
  gt_impassible.has_oblivious = true;
  gt_impassible.dist_oblivious = 200;
  std::vector<TrialOutcome> outcomes = {
      navigable_route(200, 200, 200, 0), navigable_route(300, 200, 200, 1),
      impassible_report, gt_impassible};
  CellSummary s = aggregate(outcomes, {"j", 0.1, 0.9, 0.9});
  EXPECT_EQ(s.trials, 4u);
  EXPECT_EQ(s.n_gt_navigable, 3u);
  EXPECT_EQ(s.n_reported, 2u);
  EXPECT_EQ(s.n_scored, 2u);
  EXPECT_DOUBLE_EQ(*s.frac_error_a_given_gt_navigable, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*s.frac_gt_impassible, 0.25);
  EXPECT_DOUBLE_EQ(*s.frac_reported_impassible, 0.5);
  EXPECT_DOUBLE_EQ(*s.frac_falsely_navigable_given_gt_impassible, 0.0);
  EXPECT_DOUBLE_EQ(*s.frac_error_c_given_reported, 0.5);
  EXPECT_DOUBLE_EQ(*s.mean_nbarriers_given_reported, 0.5);
  EXPECT_DOUBLE_EQ(*s.mean_score_vs_perfect, (0.0 + (300.0 + 500.0 - 200.0) / 200.0) / 2.0);
  EXPECT_EQ(s.n_error_b, 1u);
}

TEST(Aggregate, AllGroundTruthImpassible) {
  TrialOutcome blocked;
  blocked.has_oblivious = true;
  blocked.dist_oblivious = 200;
  TrialOutcome walked_in = blocked;
  walked_in.reported_impassible = false;
  walked_in.dist_tool = 200;
  walked_in.nbarriers_tool = 2;
  walked_in.error_c = true;
  std::vector<TrialOutcome> outcomes = {blocked, walked_in, blocked};
  CellSummary s = aggregate(outcomes, {"j", 0.3, 0.7, 0.7});
  EXPECT_DOUBLE_EQ(*s.frac_gt_impassible, 1.0);
  EXPECT_DOUBLE_EQ(*s.frac_falsely_navigable_given_gt_impassible, 1.0 / 3.0);
  EXPECT_FALSE(s.frac_error_a_given_gt_navigable.has_value());
  EXPECT_FALSE(s.mean_score_vs_perfect.has_value());
  EXPECT_FALSE(s.mean_score_vs_oblivious.has_value());
  EXPECT_FALSE(s.mean_rel_dist_increase_perfect_tool.has_value());
  EXPECT_DOUBLE_EQ(*s.mean_nbarriers_given_reported, 2.0);
}

TEST(Aggregate, IdenticalOutcomesGiveSingleValues) {
  TrialOutcome o = navigable_route(300, 250, 200, 1);
  std::vector<TrialOutcome> outcomes(500, o);
  CellSummary s = aggregate(outcomes, {"j", 0.2, 0.8, 0.8});
  EXPECT_DOUBLE_EQ(*s.mean_score_vs_perfect, score_vs_perfect(o));
  EXPECT_DOUBLE_EQ(*s.mean_score_vs_oblivious, score_vs_oblivious(o));
  EXPECT_DOUBLE_EQ(*s.mean_rel_dist_increase_perfect_tool, (250.0 - 200.0) / 200.0);
  EXPECT_DOUBLE_EQ(*s.mean_nbarriers_given_reported, 1.0);
}

TEST(Aggregate, MergeMatchesSequentialCounts) {
  CellKey key{"j", 0.1, 0.9, 0.95};
  CellAccumulator whole(key), left(key), right(key);
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 200; ++i) {
    TrialOutcome o = navigable_route(200 + 10 * (i % 7), 200, 200, i % 3);
    o.reported_impassible = coin(gen) && i % 5 == 0;
    whole.add(o);
    (i < 77 ? left : right).add(o);
  }
  left.merge(right);
  CellSummary a = whole.summary();
  CellSummary b = left.summary();
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.n_reported, b.n_reported);
  EXPECT_EQ(a.n_error_c, b.n_error_c);
  EXPECT_EQ(*a.frac_reported_impassible, *b.frac_reported_impassible);
  EXPECT_NEAR(*a.mean_score_vs_perfect, *b.mean_score_vs_perfect, 1e-12);

  CellAccumulator other({"k", 0.1, 0.9, 0.95});
  EXPECT_THROW(left.merge(other), Error);
  CellAccumulator other_penalty(key, 250.0);
  EXPECT_THROW(left.merge(other_penalty), Error);
}

}  // namespace
}  // namespace accsim
