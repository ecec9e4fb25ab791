#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace accsim {

// All recoverable failures (bad input files, invalid configs, broken
// preconditions on public entry points) are reported as Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Node {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  std::string id;
  NodeIndex u = 0;
  NodeIndex v = 0;
  double length_m = 0.0;
  bool always_accessible = false;
};

// Undirected pedestrian graph. Nodes and edges keep their file order, which
// defines the dense indices used everywhere else (edge sets, incidence
// columns, random-variate consumption order).
class Map {
 public:
  Map(std::vector<Node> nodes, std::vector<Edge> edges);

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const Node& node(NodeIndex i) const { return nodes_[i]; }
  const Edge& edge(EdgeIndex i) const { return edges_[i]; }

  // Mean edge length over the whole map.
  double avg_len_m() const { return avg_len_m_; }

  // Throws Error naming the id when it is not present.
  NodeIndex node_index(std::string_view id) const;
  EdgeIndex edge_index(std::string_view id) const;
  bool has_node(std::string_view id) const;
  bool has_edge(std::string_view id) const;

  double crow_distance(NodeIndex a, NodeIndex b) const;

  struct Incident {
    EdgeIndex edge;
    NodeIndex other;
  };
  // Edges touching `n`, in edge-index order.
  std::span<const Incident> incident(NodeIndex n) const {
    return {incident_.data() + incident_offset_[n],
            incident_.data() + incident_offset_[n + 1]};
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  double avg_len_m_ = 0.0;
  std::unordered_map<std::string, NodeIndex> node_lookup_;
  std::unordered_map<std::string, EdgeIndex> edge_lookup_;
  std::vector<std::size_t> incident_offset_;
  std::vector<Incident> incident_;
};

Map load_map(const nlohmann::json& document);
Map parse_map(std::string_view text);
Map load_map_file(const std::filesystem::path& path);
nlohmann::json map_to_json(const Map& map);

struct Journey {
  std::string id;
  NodeIndex from = 0;
  NodeIndex to = 0;
  double crow_m = 0.0;
};

// Journeys file: {"journeys":[{"id","from","to"}...]}; crow_m is recomputed.
std::vector<Journey> load_journeys(const nlohmann::json& document,
                                   const Map& map);
std::vector<Journey> load_journeys_file(const std::filesystem::path& path,
                                        const Map& map);
nlohmann::json journeys_to_json(std::span<const Journey> journeys,
                                const Map& map);

struct SamplingSpec {
  std::size_t count = 0;
  double min_crow_m = 0.0;
  double max_crow_m = 0.0;
  std::size_t bins = 1;
};

// Stratified sample of unordered node pairs by crow-flies distance. The
// range [min_crow_m, max_crow_m] is split into `bins` equal-width strata
// (the last one closed); each stratum receives count/bins journeys, the
// first count%bins strata one extra. Pairs are drawn without replacement.
std::vector<Journey> sample_journeys(const Map& map, const SamplingSpec& spec,
                                     std::uint64_t seed);

}  // namespace accsim
