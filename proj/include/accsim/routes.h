#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "accsim/edge_set.h"
#include "accsim/map.h"

namespace accsim {

// A simple path, as dense edge indices in walking order from the journey's
// origin. dist_m is the left-to-right sum of the member lengths.
struct Route {
  std::vector<EdgeIndex> edges;
  double dist_m = 0.0;

  friend bool operator==(const Route&, const Route&) = default;
};

// Every simple route of one journey under cap_m, sorted ascending by
// distance with ties broken by the lexicographic edge-id sequence.
struct RouteList {
  std::string journey_id;
  double cap_m = 0.0;
  std::vector<Route> routes;
};

// Strict ordering used for RouteList: (dist_m, edge-id sequence).
bool route_less(const Map& map, const Route& a, const Route& b);

// Depth-first enumeration of node-simple paths. Branches are cut when the
// accumulated length exceeds the cap, or when the accumulated length plus the
// unconstrained shortest distance to the target does. The second cut is a
// lower bound and never removes a route that fits.
RouteList enumerate_routes(const Map& map, const Journey& journey,
                           double cap_m);

// Route-major bit matrix over the edges used by at least one route.
//
// Alongside the row-major form, the same bits are stored column-major in
// blocks of kBlockRoutes routes, so that a batch of perceived sets can be
// resolved with wide OR sweeps over the columns of the perceived edges.
class IncidenceMatrix {
 public:
  static constexpr std::size_t kBlockWords = 8;
  static constexpr std::size_t kBlockRoutes = kBlockWords * 64;

  IncidenceMatrix() = default;

  std::size_t rows() const { return dist_.size(); }
  std::size_t columns() const { return column_edge_.size(); }
  std::size_t row_words() const { return row_words_; }
  std::size_t map_edge_count() const { return edge_column_.size(); }

  // Bit row r, row_words() wide.
  std::span<const std::uint64_t> row(std::size_t r) const {
    return {bits_.data() + r * row_words_, row_words_};
  }
  bool test(std::size_t r, std::size_t column) const {
    return ((bits_[r * row_words_ + column / 64] >> (column % 64)) & 1U) != 0;
  }
  double dist(std::size_t r) const { return dist_[r]; }

  EdgeIndex column_edge(std::size_t column) const {
    return column_edge_[column];
  }
  // Column of a map edge, or nullopt when no route uses it.
  std::optional<std::size_t> edge_column(EdgeIndex e) const {
    if (e >= edge_column_.size() || edge_column_[e] < 0) return std::nullopt;
    return static_cast<std::size_t>(edge_column_[e]);
  }

  // Projects a map edge set onto the matrix columns, row_words() wide.
  // Edges outside the matrix are dropped.
  void project(const EdgeSet& set, std::vector<std::uint64_t>& mask) const;
  // Columns (ascending) whose edge is in `set`.
  void project_columns(const EdgeSet& set,
                       std::vector<std::uint32_t>& columns) const;

  std::size_t blocks() const { return (rows() + kBlockRoutes - 1) / kBlockRoutes; }
  // kBlockWords words: bit i set iff route block*kBlockRoutes + i uses the
  // column. Bits past the last row are zero.
  const std::uint64_t* column_block(std::size_t block, std::size_t column) const {
    return blocked_.data() + (block * columns() + column) * kBlockWords;
  }

 private:
  friend IncidenceMatrix build_incidence(const RouteList&, const Map&);

  std::size_t row_words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> blocked_;
  std::vector<double> dist_;
  std::vector<EdgeIndex> column_edge_;
  std::vector<std::int32_t> edge_column_;
};

// Throws Error naming an edge index the map does not have.
IncidenceMatrix build_incidence(const RouteList& route_list, const Map& map);

struct OraclePath {
  double dist_m = 0.0;
  std::vector<EdgeIndex> edges;
};

// Dijkstra on the graph with `excluded` removed. No length cap.
std::optional<OraclePath> shortest_path_oracle(const Map& map, NodeIndex from,
                                               NodeIndex to,
                                               const EdgeSet& excluded);

// Unconstrained shortest distance from every node to `target`
// (infinity where unreachable).
std::vector<double> distances_to(const Map& map, NodeIndex target);

// Route-list files: JSON lines, one object per journey:
//   {"journey_id", "cap_m", "routes":[{"dist_m", "edges":[ids...]}...]}
void write_route_list(std::ostream& out, const RouteList& list,
                      const Map& map);
// Rejects unknown edges, non-path routes, distances that do not match the
// map, routes over the cap, and unsorted input.
RouteList parse_route_list(std::string_view line, const Map& map);
std::vector<RouteList> read_route_lists(std::istream& in, const Map& map);
std::vector<RouteList> read_route_lists_file(
    const std::filesystem::path& path, const Map& map);

}  // namespace accsim
