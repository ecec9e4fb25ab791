#pragma once

#include <span>
#include <vector>

#include "accsim/edge_set.h"
#include "accsim/map.h"
#include "accsim/rng.h"

namespace accsim {

// Recognition performance of a documentation tool. Both rates refer to an
// edge of average length.
struct ToolProfile {
  double tpr = 1.0;
  double tnr = 1.0;

  static ToolProfile perfect() { return {1.0, 1.0}; }
  static ToolProfile oblivious() { return {0.0, 1.0}; }
};

void validate_profile(const ToolProfile& profile);

// min(1, base * length_m / avg_len_m), clamped to [0, 1].
double length_weighted(double base, double length_m, double avg_len_m);

// Per-edge probability tables, indexed by dense edge index. Edges flagged
// always_accessible get 0 in the barrier and false-alarm tables.
std::vector<double> barrier_probabilities(const Map& map, double rate);
// Probability that a truly inaccessible edge is missed: (1 - tpr) weighted.
std::vector<double> miss_probabilities(const Map& map, const ToolProfile& p);
// Probability that a truly accessible edge is flagged: (1 - tnr) weighted.
std::vector<double> false_alarm_probabilities(const Map& map,
                                              const ToolProfile& p);

// Includes edge e iff u_e < p[e], with one variate u_e drawn per edge in
// dense-index order.
void sample_edges(std::span<const double> p, RngStream& stream, EdgeSet& out);

// One variate per edge in dense-index order. Truth members are kept unless
// missed; non-members are added on a false alarm; always_accessible edges
// are never included.
void perceive(const Map& map, const EdgeSet& truth,
              std::span<const double> miss_p,
              std::span<const double> false_alarm_p, RngStream& stream,
              EdgeSet& out);

EdgeSet sample_ground_truth(const Map& map, double rate, RngStream& stream);
EdgeSet apply_perception(const Map& map, const EdgeSet& truth,
                         const ToolProfile& profile, RngStream& stream);

}  // namespace accsim
