#include "accsim/stochastic.h"

#include <algorithm>
#include <cmath>

namespace accsim {

namespace {

void check_unit(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(std::string(name) + " must lie in [0, 1]");
  }
}

std::vector<double> weighted_table(const Map& map, double base,
                                   bool zero_always_accessible) {
  std::vector<double> p(map.edge_count());
  for (EdgeIndex e = 0; e < map.edge_count(); ++e) {
    const Edge& edge = map.edge(e);
    p[e] = zero_always_accessible && edge.always_accessible
               ? 0.0
               : length_weighted(base, edge.length_m, map.avg_len_m());
  }
  return p;
}

}  // namespace

void validate_profile(const ToolProfile& profile) {
  check_unit(profile.tpr, "tpr");
  check_unit(profile.tnr, "tnr");
}

double length_weighted(double base, double length_m, double avg_len_m) {
  return std::clamp(base * length_m / avg_len_m, 0.0, 1.0);
}

std::vector<double> barrier_probabilities(const Map& map, double rate) {
  check_unit(rate, "rate");
  return weighted_table(map, rate, true);
}

std::vector<double> miss_probabilities(const Map& map, const ToolProfile& p) {
  validate_profile(p);
  return weighted_table(map, 1.0 - p.tpr, false);
}

std::vector<double> false_alarm_probabilities(const Map& map,
                                              const ToolProfile& p) {
  validate_profile(p);
  return weighted_table(map, 1.0 - p.tnr, true);
}

void sample_edges(std::span<const double> p, RngStream& stream, EdgeSet& out) {
  out.reset(p.size());
  for (EdgeIndex e = 0; e < p.size(); ++e) {
    if (stream.uniform() < p[e]) out.insert(e);
  }
}

void perceive(const Map& map, const EdgeSet& truth,
              std::span<const double> miss_p,
              std::span<const double> false_alarm_p, RngStream& stream,
              EdgeSet& out) {
  const std::size_t n = map.edge_count();
  out.reset(n);
  for (EdgeIndex e = 0; e < n; ++e) {
    const double u = stream.uniform();
    const bool flagged = truth.contains(e) ? !(u < miss_p[e]) : u < false_alarm_p[e];
    if (flagged && !map.edge(e).always_accessible) out.insert(e);
  }
}

EdgeSet sample_ground_truth(const Map& map, double rate, RngStream& stream) {
  EdgeSet out;
  sample_edges(barrier_probabilities(map, rate), stream, out);
  return out;
}

EdgeSet apply_perception(const Map& map, const EdgeSet& truth,
                         const ToolProfile& profile, RngStream& stream) {
  EdgeSet out;
  perceive(map, truth, miss_probabilities(map, profile),
           false_alarm_probabilities(map, profile), stream, out);
  return out;
}

}  // namespace accsim
