#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "accsim/ablation.h"
#include "accsim/edge_set.h"
#include "accsim/routes.h"

namespace accsim {

inline constexpr double kDefaultPenaltyM = 500.0;

// Per-trial record. Distances are only meaningful where their flag says so:
// dist_tool when !reported_impassible, dist_perfect when gt_navigable,
// dist_oblivious when the route list is non-empty.
struct TrialOutcome {
  bool gt_navigable = false;
  bool reported_impassible = true;
  double dist_tool = 0.0;
  std::uint32_t nbarriers_tool = 0;
  double dist_perfect = 0.0;
  bool has_oblivious = false;
  double dist_oblivious = 0.0;
  std::uint32_t nbarriers_oblivious = 0;
  // A: impassible reported although a barrier-free route exists.
  bool error_a = false;
  // B: longer than the best barrier-free route.
  bool error_b = false;
  // C: the reported route contains a true barrier.
  bool error_c = false;

  // Conditioning set of both scores.
  bool scorable() const { return !reported_impassible && gt_navigable; }
};

// `perfect` is the selection made against the truth set itself.
TrialOutcome evaluate_trial(const RouteList& routes, const EdgeSet& truth,
                            Selection tool, Selection perfect);
// Finds the perfect selection by scanning `routes` against `truth`.
TrialOutcome evaluate_trial(const RouteList& routes, const EdgeSet& truth,
                            Selection tool);

// ((dist_tool + penalty * nbarriers_tool) - dist_perfect) / dist_perfect.
// Throws Error unless outcome.scorable().
double score_vs_perfect(const TrialOutcome& outcome,
                        double penalty_m = kDefaultPenaltyM);
// ((dist_tool + penalty * nbarriers_tool)
//   - (dist_oblivious + penalty * nbarriers_oblivious)) / dist_perfect.
// Negative means better than the oblivious tool. Throws unless scorable().
double score_vs_oblivious(const TrialOutcome& outcome,
                          double penalty_m = kDefaultPenaltyM);

struct CellKey {
  std::string journey_id;
  double rate = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;

  friend bool operator==(const CellKey&, const CellKey&) = default;
};

// Conditioned statistics for one cell. An empty conditioning set leaves the
// statistic as nullopt ("NA" in CSV output); the n_* fields are the
// conditioning-set sizes.
struct CellSummary {
  CellKey key;
  double penalty_m = kDefaultPenaltyM;
  std::uint64_t trials = 0;
  std::uint64_t n_gt_navigable = 0;
  std::uint64_t n_gt_impassible = 0;
  std::uint64_t n_reported = 0;
  std::uint64_t n_scored = 0;
  std::uint64_t n_error_a = 0;
  std::uint64_t n_error_b = 0;
  std::uint64_t n_error_c = 0;

  std::optional<double> frac_gt_impassible;
  std::optional<double> frac_reported_impassible;
  std::optional<double> frac_error_a_given_gt_navigable;
  std::optional<double> frac_falsely_navigable_given_gt_impassible;
  std::optional<double> frac_error_c_given_reported;
  std::optional<double> mean_nbarriers_given_reported;
  std::optional<double> mean_score_vs_perfect;
  std::optional<double> mean_score_vs_oblivious;
  std::optional<double> mean_rel_dist_increase_perfect_tool;
};

// Running sums for one cell. merge() combines partial results of the same
// cell; summary() is exact for any grouping of integer counts.
// Neumaier compensated sum, so that a cell of identical values averages back
// to that value and merge order has negligible effect.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    compensation_ += other.compensation_;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

class CellAccumulator {
 public:
  explicit CellAccumulator(CellKey key, double penalty_m = kDefaultPenaltyM)
      : key_(std::move(key)), penalty_m_(penalty_m) {}

  void add(const TrialOutcome& outcome);
  // Throws Error when the keys or penalties differ.
  void merge(const CellAccumulator& other);
  CellSummary summary() const;

  const CellKey& key() const { return key_; }

 private:
  CellKey key_;
  double penalty_m_;
  std::uint64_t trials_ = 0;
  std::uint64_t gt_navigable_ = 0;
  std::uint64_t reported_ = 0;
  std::uint64_t reported_impassible_ = 0;
  std::uint64_t scored_ = 0;
  std::uint64_t error_a_ = 0;
  std::uint64_t error_b_ = 0;
  std::uint64_t error_c_ = 0;
  std::uint64_t falsely_navigable_ = 0;
  std::uint64_t barriers_reported_ = 0;
  CompensatedSum score_perfect_sum_;
  CompensatedSum score_oblivious_sum_;
  CompensatedSum rel_increase_sum_;
};

CellSummary aggregate(std::span<const TrialOutcome> outcomes, const CellKey& key,
                      double penalty_m = kDefaultPenaltyM);

}  // namespace accsim
