#include "accsim/map.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "accsim/rng.h"

namespace accsim {

namespace {

using nlohmann::json;

const json& require(const json& object, const char* key,
                    const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(where + ": missing \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& object, const char* key,
                           const std::string& where) {
  const json& value = require(object, key, where);
  if (!value.is_string()) {
    throw Error(where + ": \"" + key + "\" must be a string");
  }
  return value.get<std::string>();
}

double require_number(const json& object, const char* key,
                      const std::string& where) {
  const json& value = require(object, key, where);
  if (!value.is_number()) {
    throw Error(where + ": \"" + key + "\" must be a number");
  }
  double d = value.get<double>();
  if (!std::isfinite(d)) {
    throw Error(where + ": \"" + key + "\" must be finite");
  }
  return d;
}

const json& require_array(const json& object, const char* key,
                          const std::string& where) {
  const json& value = require(object, key, where);
  if (!value.is_array()) {
    throw Error(where + ": \"" + key + "\" must be an array");
  }
  return value;
}

json read_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw Error(std::string(what) + " not found: " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace

Map::Map(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (edges_.empty()) throw Error("map has no edges");

  node_lookup_.reserve(nodes_.size());
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (!node_lookup_.emplace(nodes_[i].id, i).second) {
      throw Error("duplicate node id " + nodes_[i].id);
    }
  }

  double total = 0.0;
  edge_lookup_.reserve(edges_.size());
  for (EdgeIndex i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (!edge_lookup_.emplace(e.id, i).second) {
      throw Error("duplicate edge id " + e.id);
    }
    if (e.u >= nodes_.size() || e.v >= nodes_.size()) {
      throw Error("edge " + e.id + ": endpoint index out of range");
    }
    if (e.u == e.v) throw Error("edge " + e.id + ": endpoints are equal");
    if (!(e.length_m > 0.0) || !std::isfinite(e.length_m)) {
      throw Error("edge " + e.id + ": non-positive length_m");
    }
    total += e.length_m;
  }
  avg_len_m_ = total / static_cast<double>(edges_.size());

  // CSR adjacency.
  incident_offset_.assign(nodes_.size() + 1, 0);
  for (const Edge& e : edges_) {
    ++incident_offset_[e.u + 1];
    ++incident_offset_[e.v + 1];
  }
  for (std::size_t i = 1; i < incident_offset_.size(); ++i) {
    incident_offset_[i] += incident_offset_[i - 1];
  }
  incident_.resize(incident_offset_.back());
  std::vector<std::size_t> fill(incident_offset_.begin(),
                                incident_offset_.end() - 1);
  for (EdgeIndex i = 0; i < edges_.size(); ++i) {
    incident_[fill[edges_[i].u]++] = {i, edges_[i].v};
    incident_[fill[edges_[i].v]++] = {i, edges_[i].u};
  }
}

NodeIndex Map::node_index(std::string_view id) const {
  auto it = node_lookup_.find(std::string(id));
  if (it == node_lookup_.end()) throw Error("unknown node " + std::string(id));
  return it->second;
}

EdgeIndex Map::edge_index(std::string_view id) const {
  auto it = edge_lookup_.find(std::string(id));
  if (it == edge_lookup_.end()) throw Error("unknown edge " + std::string(id));
  return it->second;
}

bool Map::has_node(std::string_view id) const {
  return node_lookup_.contains(std::string(id));
}

bool Map::has_edge(std::string_view id) const {
  return edge_lookup_.contains(std::string(id));
}

double Map::crow_distance(NodeIndex a, NodeIndex b) const {
  return std::hypot(nodes_[a].x - nodes_[b].x, nodes_[a].y - nodes_[b].y);
}

Map load_map(const json& document) {
  if (!document.is_object()) throw Error("map: document must be an object");

  std::vector<Node> nodes;
  std::unordered_map<std::string, NodeIndex> ids;
  const json& node_array = require_array(document, "nodes", "map");
  nodes.reserve(node_array.size());
  for (std::size_t i = 0; i < node_array.size(); ++i) {
    const json& n = node_array[i];
    std::string where = "node #" + std::to_string(i);
    if (!n.is_object()) throw Error(where + ": must be an object");
    Node node;
    node.id = require_string(n, "id", where);
    where = "node " + node.id;
    node.x = require_number(n, "x", where);
    node.y = require_number(n, "y", where);
    if (!ids.emplace(node.id, static_cast<NodeIndex>(nodes.size())).second) {
      throw Error("duplicate node id " + node.id);
    }
    nodes.push_back(std::move(node));
  }

  std::vector<Edge> edges;
  const json& edge_array = require_array(document, "edges", "map");
  edges.reserve(edge_array.size());
  for (std::size_t i = 0; i < edge_array.size(); ++i) {
    const json& e = edge_array[i];
    std::string where = "edge #" + std::to_string(i);
    if (!e.is_object()) throw Error(where + ": must be an object");
    Edge edge;
    edge.id = require_string(e, "id", where);
    where = "edge " + edge.id;
    for (const char* key : {"u", "v"}) {
      std::string endpoint = require_string(e, key, where);
      auto it = ids.find(endpoint);
      if (it == ids.end()) {
        throw Error(where + ": unknown endpoint " + endpoint);
      }
      (key[0] == 'u' ? edge.u : edge.v) = it->second;
    }
    edge.length_m = require_number(e, "length_m", where);
    if (auto it = e.find("always_accessible"); it != e.end()) {
      if (!it->is_boolean()) {
        throw Error(where + ": \"always_accessible\" must be a boolean");
      }
      edge.always_accessible = it->get<bool>();
    }
    edges.push_back(std::move(edge));
  }

  return Map(std::move(nodes), std::move(edges));
}

Map parse_map(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("map: malformed JSON: ") + e.what());
  }
  return load_map(document);
}

Map load_map_file(const std::filesystem::path& path) {
  try {
    return load_map(read_json_file(path, "map"));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

json map_to_json(const Map& map) {
  json nodes = json::array();
  for (const Node& n : map.nodes()) {
    nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  }
  json edges = json::array();
  for (const Edge& e : map.edges()) {
    json entry = {{"id", e.id},
                  {"u", map.node(e.u).id},
                  {"v", map.node(e.v).id},
                  {"length_m", e.length_m}};
    if (e.always_accessible) entry["always_accessible"] = true;
    edges.push_back(std::move(entry));
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

std::vector<Journey> load_journeys(const json& document, const Map& map) {
  if (!document.is_object()) {
    throw Error("journeys: document must be an object");
  }
  const json& array = require_array(document, "journeys", "journeys");
  std::vector<Journey> journeys;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const json& j = array[i];
    std::string where = "journey #" + std::to_string(i);
    if (!j.is_object()) throw Error(where + ": must be an object");
    Journey journey;
    journey.id = require_string(j, "id", where);
    where = "journey " + journey.id;
    if (!seen.insert(journey.id).second) {
      throw Error("duplicate journey id " + journey.id);
    }
    std::string from = require_string(j, "from", where);
    std::string to = require_string(j, "to", where);
    if (!map.has_node(from)) throw Error(where + ": unknown node " + from);
    if (!map.has_node(to)) throw Error(where + ": unknown node " + to);
    if (from == to) throw Error(where + ": from and to are the same node");
    journey.from = map.node_index(from);
    journey.to = map.node_index(to);
    journey.crow_m = map.crow_distance(journey.from, journey.to);
    journeys.push_back(std::move(journey));
  }
  return journeys;
}

std::vector<Journey> load_journeys_file(const std::filesystem::path& path,
                                        const Map& map) {
  try {
    return load_journeys(read_json_file(path, "journeys"), map);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

json journeys_to_json(std::span<const Journey> journeys, const Map& map) {
  json array = json::array();
  for (const Journey& j : journeys) {
    array.push_back({{"id", j.id},
                     {"from", map.node(j.from).id},
                     {"to", map.node(j.to).id},
                     {"crow_m", j.crow_m}});
  }
  return {{"journeys", std::move(array)}};
}

std::vector<Journey> sample_journeys(const Map& map, const SamplingSpec& spec,
                                     std::uint64_t seed) {
  if (!(spec.min_crow_m < spec.max_crow_m)) {
    throw Error("sampling: min_crow_m must be less than max_crow_m");
  }
  if (spec.bins < 1 || spec.count < spec.bins) {
    throw Error("sampling: require count >= bins >= 1");
  }
  if (map.node_count() < 2) throw Error("sampling: map has fewer than 2 nodes");

  const double width =
      (spec.max_crow_m - spec.min_crow_m) / static_cast<double>(spec.bins);
  auto stratum_of = [&](double d) -> std::ptrdiff_t {
    if (d < spec.min_crow_m || d > spec.max_crow_m) return -1;
    auto k = static_cast<std::size_t>((d - spec.min_crow_m) / width);
    return static_cast<std::ptrdiff_t>(std::min(k, spec.bins - 1));
  };
  auto for_each_pair = [&](auto&& fn) {
    const auto n = static_cast<NodeIndex>(map.node_count());
    for (NodeIndex a = 0; a < n; ++a) {
      for (NodeIndex b = a + 1; b < n; ++b) {
        double d = map.crow_distance(a, b);
        std::ptrdiff_t k = stratum_of(d);
        if (k >= 0) fn(static_cast<std::size_t>(k), a, b, d);
      }
    }
  };

  // Pass 1: stratum populations.
  std::vector<std::uint64_t> population(spec.bins, 0);
  for_each_pair([&](std::size_t k, NodeIndex, NodeIndex, double) {
    ++population[k];
  });

  // Draw ranks within each stratum (Floyd's algorithm, no replacement).
  RngStream rng = derive_stream(seed, {.purpose = Purpose::kJourneySampling});
  std::vector<std::vector<std::uint64_t>> ranks(spec.bins);
  for (std::size_t k = 0; k < spec.bins; ++k) {
    const std::uint64_t want =
        spec.count / spec.bins + (k < spec.count % spec.bins ? 1 : 0);
    const double lo = spec.min_crow_m + width * static_cast<double>(k);
    const double hi = lo + width;
    std::ostringstream name;
    name << "stratum " << k << " [" << lo << ", " << hi
         << (k + 1 == spec.bins ? "]" : ")");
    if (population[k] == 0) throw Error("sampling: " + name.str() + " is empty");
    if (population[k] < want) {
      throw Error("sampling: " + name.str() + " has " +
                  std::to_string(population[k]) + " pairs, needs " +
                  std::to_string(want));
    }
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = population[k] - want; j < population[k]; ++j) {
      std::uint64_t t = rng.below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    ranks[k].assign(chosen.begin(), chosen.end());
  }

  // Pass 2: collect the chosen pairs.
  std::vector<std::vector<Journey>> picked(spec.bins);
  std::vector<std::uint64_t> seen(spec.bins, 0);
  std::vector<std::size_t> cursor(spec.bins, 0);
  for_each_pair([&](std::size_t k, NodeIndex a, NodeIndex b, double d) {
    std::uint64_t rank = seen[k]++;
    if (cursor[k] < ranks[k].size() && ranks[k][cursor[k]] == rank) {
      ++cursor[k];
      picked[k].push_back({"", a, b, d});
    }
  });

  std::vector<Journey> journeys;
  journeys.reserve(spec.count);
  const std::size_t width_digits =
      std::max<std::size_t>(3, std::to_string(spec.count - 1).size());
  for (auto& stratum : picked) {
    for (Journey& j : stratum) {
      std::string index = std::to_string(journeys.size());
      j.id = "J" + std::string(width_digits - index.size(), '0') + index;
      journeys.push_back(std::move(j));
    }
  }
  return journeys;
}

}  // namespace accsim
