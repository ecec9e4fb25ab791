#include "accsim/routes.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>

namespace accsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack on the lower-bound cut so that summation-order differences between
// the Dijkstra bound and the path sum can never drop a route.
bool exceeds_with_slack(double value, double cap_m) {
  return value > cap_m * (1.0 + 1e-12) + 1e-9;
}

struct Settled {
  std::vector<double> dist;
  std::vector<EdgeIndex> via;
};

Settled dijkstra(const Map& map, NodeIndex source, const EdgeSet* excluded) {
  constexpr EdgeIndex kNoEdge = std::numeric_limits<EdgeIndex>::max();
  Settled s{std::vector<double>(map.node_count(), kInf),
            std::vector<EdgeIndex>(map.node_count(), kNoEdge)};
  using Item = std::pair<double, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  s.dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    auto [d, n] = queue.top();
    queue.pop();
    if (d > s.dist[n]) continue;
    for (const Map::Incident& inc : map.incident(n)) {
      if (excluded != nullptr && excluded->contains(inc.edge)) continue;
      double nd = d + map.edge(inc.edge).length_m;
      if (nd < s.dist[inc.other]) {
        s.dist[inc.other] = nd;
        s.via[inc.other] = inc.edge;
        queue.push({nd, inc.other});
      }
    }
  }
  return s;
}

}  // namespace

bool route_less(const Map& map, const Route& a, const Route& b) {
  if (a.dist_m != b.dist_m) return a.dist_m < b.dist_m;
  return std::lexicographical_compare(
      a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
      [&](EdgeIndex x, EdgeIndex y) { return map.edge(x).id < map.edge(y).id; });
}

std::vector<double> distances_to(const Map& map, NodeIndex target) {
  return dijkstra(map, target, nullptr).dist;
}

RouteList enumerate_routes(const Map& map, const Journey& journey,
                           double cap_m) {
  if (!(cap_m > 0.0)) throw Error("enumerate_routes: cap_m must be positive");
  if (journey.from >= map.node_count() || journey.to >= map.node_count()) {
    throw Error("enumerate_routes: journey " + journey.id +
                " has an endpoint outside the map");
  }

  RouteList list{journey.id, cap_m, {}};
  const std::vector<double> to_target = distances_to(map, journey.to);
  if (exceeds_with_slack(to_target[journey.from], cap_m)) return list;

  struct Frame {
    NodeIndex node;
    std::size_t next;
    double acc;
  };
  std::vector<Frame> stack;
  std::vector<EdgeIndex> path;
  std::vector<char> on_path(map.node_count(), 0);

  stack.push_back({journey.from, 0, 0.0});
  on_path[journey.from] = 1;
  while (!stack.empty()) {
    Frame& top = stack.back();
    auto incident = map.incident(top.node);
    if (top.next == incident.size()) {
      on_path[top.node] = 0;
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const Map::Incident inc = incident[top.next++];
    if (on_path[inc.other]) continue;
    const double acc = top.acc + map.edge(inc.edge).length_m;
    if (acc > cap_m) continue;
    if (inc.other == journey.to) {
      Route route{path, acc};
      route.edges.push_back(inc.edge);
      list.routes.push_back(std::move(route));
      continue;
    }
    if (exceeds_with_slack(acc + to_target[inc.other], cap_m)) continue;
    on_path[inc.other] = 1;
    path.push_back(inc.edge);
    stack.push_back({inc.other, 0, acc});
  }

  std::sort(list.routes.begin(), list.routes.end(),
            [&](const Route& a, const Route& b) { return route_less(map, a, b); });
  return list;
}

void IncidenceMatrix::project(const EdgeSet& set,
                              std::vector<std::uint64_t>& mask) const {
  mask.assign(row_words_, 0);
  for (std::size_t c = 0; c < column_edge_.size(); ++c) {
    if (set.contains(column_edge_[c])) mask[c / 64] |= std::uint64_t{1} << (c % 64);
  }
}

void IncidenceMatrix::project_columns(const EdgeSet& set,
                                      std::vector<std::uint32_t>& columns) const {
  columns.clear();
  for (std::size_t c = 0; c < column_edge_.size(); ++c) {
    if (set.contains(column_edge_[c])) columns.push_back(static_cast<std::uint32_t>(c));
  }
}

IncidenceMatrix build_incidence(const RouteList& route_list, const Map& map) {
  IncidenceMatrix m;
  m.edge_column_.assign(map.edge_count(), -1);
  for (const Route& route : route_list.routes) {
    for (EdgeIndex e : route.edges) {
      if (e >= map.edge_count()) {
        throw Error("build_incidence: unknown edge index " + std::to_string(e) +
                    " in journey " + route_list.journey_id);
      }
      m.edge_column_[e] = 0;
    }
  }
  // Columns in map edge order.
  for (EdgeIndex e = 0; e < map.edge_count(); ++e) {
    if (m.edge_column_[e] == 0) {
      m.edge_column_[e] = static_cast<std::int32_t>(m.column_edge_.size());
      m.column_edge_.push_back(e);
    } else {
      m.edge_column_[e] = -1;
    }
  }

  const std::size_t rows = route_list.routes.size();
  const std::size_t cols = m.column_edge_.size();
  m.row_words_ = (cols + 63) / 64;
  m.bits_.assign(rows * m.row_words_, 0);
  m.dist_.resize(rows);
  m.blocked_.assign(m.blocks() * cols * IncidenceMatrix::kBlockWords, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const Route& route = route_list.routes[r];
    m.dist_[r] = route.dist_m;
    const std::size_t block = r / IncidenceMatrix::kBlockRoutes;
    const std::size_t in_block = r % IncidenceMatrix::kBlockRoutes;
    for (EdgeIndex e : route.edges) {
      const auto c = static_cast<std::size_t>(m.edge_column_[e]);
      m.bits_[r * m.row_words_ + c / 64] |= std::uint64_t{1} << (c % 64);
      m.blocked_[(block * cols + c) * IncidenceMatrix::kBlockWords +
                 in_block / 64] |= std::uint64_t{1} << (in_block % 64);
    }
  }
  return m;
}

std::optional<OraclePath> shortest_path_oracle(const Map& map, NodeIndex from,
                                               NodeIndex to,
                                               const EdgeSet& excluded) {
  if (from >= map.node_count() || to >= map.node_count()) {
    throw Error("shortest_path_oracle: endpoint outside the map");
  }
  Settled s = dijkstra(map, from, &excluded);
  if (s.dist[to] == kInf) return std::nullopt;
  OraclePath path{s.dist[to], {}};
  for (NodeIndex n = to; n != from;) {
    const Edge& e = map.edge(s.via[n]);
    path.edges.push_back(s.via[n]);
    n = e.u == n ? e.v : e.u;
  }
  std::reverse(path.edges.begin(), path.edges.end());
  return path;
}

void write_route_list(std::ostream& out, const RouteList& list,
                      const Map& map) {
  nlohmann::json routes = nlohmann::json::array();
  for (const Route& route : list.routes) {
    nlohmann::json ids = nlohmann::json::array();
    for (EdgeIndex e : route.edges) ids.push_back(map.edge(e).id);
    routes.push_back({{"dist_m", route.dist_m}, {"edges", std::move(ids)}});
  }
  nlohmann::json line = {{"journey_id", list.journey_id},
                         {"cap_m", list.cap_m},
                         {"routes", std::move(routes)}};
  out << line.dump() << '\n';
}

RouteList parse_route_list(std::string_view text, const Map& map) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("route list: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("journey_id") ||
      !doc["journey_id"].is_string() || !doc.contains("cap_m") ||
      !doc["cap_m"].is_number() || !doc.contains("routes") ||
      !doc["routes"].is_array()) {
    throw Error("route list: expected {\"journey_id\", \"cap_m\", \"routes\"}");
  }
  RouteList list;
  list.journey_id = doc["journey_id"].get<std::string>();
  list.cap_m = doc["cap_m"].get<double>();
  const std::string where = "route list " + list.journey_id;
  if (!(list.cap_m > 0.0)) throw Error(where + ": cap_m must be positive");

  for (const auto& entry : doc["routes"]) {
    const std::string at = where + " route #" + std::to_string(list.routes.size());
    if (!entry.is_object() || !entry.contains("dist_m") ||
        !entry["dist_m"].is_number() || !entry.contains("edges") ||
        !entry["edges"].is_array() || entry["edges"].empty()) {
      throw Error(at + ": expected {\"dist_m\", \"edges\":[...]}");
    }
    Route route;
    for (const auto& id : entry["edges"]) {
      if (!id.is_string()) throw Error(at + ": edge ids must be strings");
      const std::string name = id.get<std::string>();
      if (!map.has_edge(name)) throw Error(at + ": unknown edge " + name);
      route.edges.push_back(map.edge_index(name));
      route.dist_m += map.edge(route.edges.back()).length_m;
    }

    // Walk the edges: consecutive edges must share a node and no node may
    // repeat. The first edge may be walked in either direction.
    std::vector<NodeIndex> nodes;
    const Edge& first = map.edge(route.edges.front());
    for (NodeIndex start : {first.u, first.v}) {
      std::vector<NodeIndex> walk{start};
      bool ok = true;
      for (EdgeIndex e : route.edges) {
        const Edge& edge = map.edge(e);
        if (edge.u == walk.back()) {
          walk.push_back(edge.v);
        } else if (edge.v == walk.back()) {
          walk.push_back(edge.u);
        } else {
          ok = false;
          break;
        }
      }
      std::vector<NodeIndex> sorted = walk;
      std::sort(sorted.begin(), sorted.end());
      if (ok && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
        nodes = std::move(walk);
        break;
      }
    }
    if (nodes.empty()) throw Error(at + ": edges do not form a simple path");

    const double stated = entry["dist_m"].get<double>();
    if (std::abs(stated - route.dist_m) > 1e-9 * std::max(1.0, route.dist_m)) {
      throw Error(at + ": dist_m does not match the map's edge lengths");
    }
    if (route.dist_m > list.cap_m) throw Error(at + ": route exceeds cap_m");
    if (!list.routes.empty() && !route_less(map, list.routes.back(), route)) {
      throw Error(where + ": routes are not sorted");
    }
    list.routes.push_back(std::move(route));
  }
  return list;
}

std::vector<RouteList> read_route_lists(std::istream& in, const Map& map) {
  std::vector<RouteList> lists;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lists.push_back(parse_route_list(line, map));
  }
  return lists;
}

std::vector<RouteList> read_route_lists_file(const std::filesystem::path& path,
                                             const Map& map) {
  std::ifstream in(path);
  if (!in) throw Error("route lists not found: " + path.string());
  try {
    return read_route_lists(in, map);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace accsim
