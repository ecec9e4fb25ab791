#include "accsim/routes.h"

#include <gtest/gtest.h>

#include <bit>
#include <random>
#include <sstream>

#include "test_support.h"

namespace accsim {
namespace {

std::vector<std::string> ids(const Map& map, const Route& route) {
  std::vector<std::string> out;
  for (EdgeIndex e : route.edges) out.push_back(map.edge(e).id);
  return out;
}

TEST(EnumerateRoutes, DiamondFullCap) {
  Map map = testing::diamond_map();
  RouteList list = enumerate_routes(map, testing::diamond_journey(map), 1500.0);
  EXPECT_EQ(list.journey_id, "AB");
  EXPECT_EQ(list.cap_m, 1500.0);
  ASSERT_EQ(list.routes.size(), 2u);
  EXPECT_EQ(ids(map, list.routes[0]), (std::vector<std::string>{"e1", "e2"}));
  EXPECT_EQ(list.routes[0].dist_m, 200.0);
  EXPECT_EQ(ids(map, list.routes[1]), (std::vector<std::string>{"e3", "e4"}));
  EXPECT_EQ(list.routes[1].dist_m, 300.0);
}

TEST(EnumerateRoutes, DiamondTightCap) {
  Map map = testing::diamond_map();
  RouteList list = enumerate_routes(map, testing::diamond_journey(map), 250.0);
  ASSERT_EQ(list.routes.size(), 1u);
  EXPECT_EQ(ids(map, list.routes[0]), (std::vector<std::string>{"e1", "e2"}));
}

TEST(EnumerateRoutes, NothingUnderCap) {
  Map map = testing::single_edge_map(100.0);
  Journey j{"j", 0, 1, 100.0};
  EXPECT_TRUE(enumerate_routes(map, j, 50.0).routes.empty());
  EXPECT_EQ(enumerate_routes(map, j, 100.0).routes.size(), 1u);
  EXPECT_THROW(enumerate_routes(map, j, 0.0), Error);
}

TEST(EnumerateRoutes, TiesBrokenByEdgeIds) {
  // Two parallel edges of equal length plus a disconnected-from-journey one.
  Map map({{"A", 0, 0}, {"B", 1, 0}, {"C", 2, 0}},
          {{"z", 0, 1, 5.0, false}, {"a", 1, 0, 5.0, false}, {"m", 1, 2, 1.0, false}});
  RouteList list = enumerate_routes(map, {"j", 0, 1, 1.0}, 100.0);
  ASSERT_EQ(list.routes.size(), 2u);
  EXPECT_EQ(ids(map, list.routes[0]), (std::vector<std::string>{"a"}));
  EXPECT_EQ(ids(map, list.routes[1]), (std::vector<std::string>{"z"}));
}

TEST(EnumerateRoutes, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 150; ++trial) {
    Map map = testing::random_map(gen, 9, 14);
    std::uniform_int_distribution<NodeIndex> node(0, static_cast<NodeIndex>(map.node_count() - 1));
    NodeIndex a = node(gen);
    NodeIndex b = node(gen);
    if (a == b) continue;
    std::uniform_real_distribution<double> cap(20.0, 500.0);
    const double cap_m = std::floor(cap(gen));
    RouteList list = enumerate_routes(map, {"j", a, b, 0.0}, cap_m);
    EXPECT_EQ(testing::as_set(list), testing::brute_force_paths(map, a, b, cap_m));
    for (std::size_t i = 0; i < list.routes.size(); ++i) {
      double sum = 0.0;
      for (EdgeIndex e : list.routes[i].edges) sum += map.edge(e).length_m;
      EXPECT_EQ(sum, list.routes[i].dist_m);
      EXPECT_LE(list.routes[i].dist_m, cap_m);
      if (i > 0) EXPECT_TRUE(route_less(map, list.routes[i - 1], list.routes[i]));
    }
  }
}

TEST(BuildIncidence, DiamondRows) {
  Map map = testing::diamond_map();
  RouteList list = enumerate_routes(map, testing::diamond_journey(map), 1500.0);
  IncidenceMatrix inc = build_incidence(list, map);
  ASSERT_EQ(inc.rows(), 2u);
  ASSERT_EQ(inc.columns(), 4u);
  auto column = [&](const char* id) { return *inc.edge_column(map.edge_index(id)); };
  EXPECT_TRUE(inc.test(0, column("e1")));
  EXPECT_TRUE(inc.test(0, column("e2")));
  EXPECT_FALSE(inc.test(0, column("e3")));
  EXPECT_FALSE(inc.test(0, column("e4")));
  EXPECT_TRUE(inc.test(1, column("e3")));
  EXPECT_TRUE(inc.test(1, column("e4")));
  EXPECT_FALSE(inc.test(1, column("e1")));
  EXPECT_EQ(inc.dist(0), 200.0);
  EXPECT_EQ(inc.dist(1), 300.0);
}

TEST(BuildIncidence, EmptyAndUnknown) {
  Map map = testing::diamond_map();
  RouteList empty{"j", 10.0, {}};
  IncidenceMatrix inc = build_incidence(empty, map);
  EXPECT_EQ(inc.rows(), 0u);
  EXPECT_EQ(inc.blocks(), 0u);

  RouteList bad{"j", 1000.0, {{{0, 99}, 200.0}}};
  EXPECT_THROW(build_incidence(bad, map), Error);
}

TEST(BuildIncidence, RowsMatchMembershipOnGrid) {
  Map map = testing::grid_map(5, 10.0);
  RouteList list = enumerate_routes(
      map, {"j", map.node_index("n0_0"), map.node_index("n3_4"), 0.0}, 110.0);
  ASSERT_GT(list.routes.size(), IncidenceMatrix::kBlockRoutes);
  IncidenceMatrix inc = build_incidence(list, map);
  for (std::size_t r = 0; r < inc.rows(); ++r) {
    std::size_t popcount = 0;
    for (std::uint64_t w : inc.row(r)) popcount += static_cast<std::size_t>(std::popcount(w));
    ASSERT_EQ(popcount, list.routes[r].edges.size());
    for (EdgeIndex e : list.routes[r].edges) {
      const std::size_t c = *inc.edge_column(e);
      ASSERT_TRUE(inc.test(r, c));
      const std::size_t in_block = r % IncidenceMatrix::kBlockRoutes;
      const std::uint64_t* bits = inc.column_block(r / IncidenceMatrix::kBlockRoutes, c);
      ASSERT_TRUE((bits[in_block / 64] >> (in_block % 64)) & 1U);
    }
  }
}

TEST(ShortestPathOracle, Diamond) {
  Map map = testing::diamond_map();
  const NodeIndex a = map.node_index("A");
  const NodeIndex b = map.node_index("B");

  auto open = shortest_path_oracle(map, a, b, EdgeSet(4));
  ASSERT_TRUE(open.has_value());
  EXPECT_EQ(open->dist_m, 200.0);
  EXPECT_EQ(open->edges, (std::vector<EdgeIndex>{0, 1}));

  auto severed = shortest_path_oracle(map, a, b, EdgeSet::from_ids(map, {"e2"}));
  ASSERT_TRUE(severed.has_value());
  EXPECT_EQ(severed->dist_m, 300.0);
  EXPECT_EQ(severed->edges, (std::vector<EdgeIndex>{2, 3}));

  EXPECT_FALSE(shortest_path_oracle(map, a, b, EdgeSet::from_ids(map, {"e1", "e3"})));
}

TEST(ShortestPathOracle, ConsistentWithFirstDisjointRoute) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    Map map = testing::random_map(gen, 8, 14);
    const NodeIndex a = 0;
    const NodeIndex b = static_cast<NodeIndex>(map.node_count() - 1);
    const double cap_m = 250.0;
    RouteList list = enumerate_routes(map, {"j", a, b, 0.0}, cap_m);
    for (int k = 0; k < 10; ++k) {
      EdgeSet excluded(map.edge_count());
      std::bernoulli_distribution drop(0.25);
      for (EdgeIndex e = 0; e < map.edge_count(); ++e) {
        if (drop(gen)) excluded.insert(e);
      }
      const Route* first = nullptr;
      for (const Route& r : list.routes) {
        bool hit = false;
        for (EdgeIndex e : r.edges) hit = hit || excluded.contains(e);
        if (!hit) {
          first = &r;
          break;
        }
      }
      auto oracle = shortest_path_oracle(map, a, b, excluded);
      if (oracle && oracle->dist_m <= cap_m) {
        ASSERT_NE(first, nullptr);
        EXPECT_EQ(first->dist_m, oracle->dist_m);
      } else {
        EXPECT_EQ(first, nullptr);
      }
    }
  }
}

TEST(RouteListFile, RoundTrip) {
  Map map = testing::grid_map(4, 25.0);
  RouteList list = enumerate_routes(
      map, {"J7", map.node_index("n0_0"), map.node_index("n2_3"), 0.0}, 200.0);
  ASSERT_FALSE(list.routes.empty());
  std::stringstream buffer;
  write_route_list(buffer, list, map);
  write_route_list(buffer, RouteList{"empty", 10.0, {}}, map);
  auto back = read_route_lists(buffer, map);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].journey_id, "J7");
  EXPECT_EQ(back[0].cap_m, 200.0);
  EXPECT_EQ(back[0].routes, list.routes);
  EXPECT_TRUE(back[1].routes.empty());
}

TEST(RouteListFile, RejectsBadInput) {
  Map map = testing::diamond_map();
  auto error = [&](const char* line) -> std::string {
    try {
      parse_route_list(line, map);
    } catch (const Error& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(error(R"({"journey_id":"j","cap_m":1500,"routes":[
      {"dist_m":300,"edges":["e3","e4"]},{"dist_m":200,"edges":["e1","e2"]}]})")
                .find("not sorted"),
            std::string::npos);
  EXPECT_NE(error(R"({"journey_id":"j","cap_m":1500,"routes":[
      {"dist_m":200,"edges":["e1","zz"]}]})")
                .find("unknown edge zz"),
            std::string::npos);
  EXPECT_NE(error(R"({"journey_id":"j","cap_m":1500,"routes":[
      {"dist_m":250,"edges":["e1","e4"]}]})")
                .find("simple path"),
            std::string::npos);
  EXPECT_NE(error(R"({"journey_id":"j","cap_m":1500,"routes":[
      {"dist_m":201,"edges":["e1","e2"]}]})")
                .find("dist_m"),
            std::string::npos);
  EXPECT_NE(error(R"({"journey_id":"j","cap_m":250,"routes":[
      {"dist_m":300,"edges":["e3","e4"]}]})")
                .find("exceeds cap_m"),
            std::string::npos);
  EXPECT_NE(error(R"({"journey_id":"j"})").find("expected"), std::string::npos);
}

}  // namespace
}  // namespace accsim
