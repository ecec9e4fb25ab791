#include "accsim/metrics.h"

namespace accsim {

namespace {

std::uint32_t barriers_on(const Route& route, const EdgeSet& truth) {
  std::uint32_t n = 0;
  for (EdgeIndex e : route.edges) n += truth.contains(e) ? 1 : 0;
  return n;
}

std::optional<double> ratio(double numerator, std::uint64_t denominator) {
  if (denominator == 0) return std::nullopt;
  return numerator / static_cast<double>(denominator);
}

void require_scorable(const TrialOutcome& outcome) {
  if (!outcome.scorable()) {
    throw Error(
        "score undefined: needs a reported route on a ground-truth navigable "
        "journey");
  }
}

}  // namespace

TrialOutcome evaluate_trial(const RouteList& routes, const EdgeSet& truth,
                            Selection tool, Selection perfect) {
  TrialOutcome out;
  const auto& list = routes.routes;
  if (!list.empty()) {
    out.has_oblivious = true;
    out.dist_oblivious = list.front().dist_m;
    out.nbarriers_oblivious = barriers_on(list.front(), truth);
  }
  out.gt_navigable = !perfect.is_impassible();
  if (out.gt_navigable) out.dist_perfect = list.at(perfect.route_index()).dist_m;

  out.reported_impassible = tool.is_impassible();
  if (!out.reported_impassible) {
    const Route& chosen = list.at(tool.route_index());
    out.dist_tool = chosen.dist_m;
    out.nbarriers_tool = barriers_on(chosen, truth);
  }

  out.error_a = out.reported_impassible && out.gt_navigable;
  out.error_b = !out.reported_impassible && out.gt_navigable &&
                out.dist_tool > out.dist_perfect;
  out.error_c = !out.reported_impassible && out.nbarriers_tool >= 1;
  return out;
}

TrialOutcome evaluate_trial(const RouteList& routes, const EdgeSet& truth,
                            Selection tool) {
  Selection perfect = Selection::impassible();
  for (std::size_t r = 0; r < routes.routes.size(); ++r) {
    if (barriers_on(routes.routes[r], truth) == 0) {
      perfect = Selection::route(static_cast<std::uint32_t>(r));
      break;
    }
  }
  return evaluate_trial(routes, truth, tool, perfect);
}

double score_vs_perfect(const TrialOutcome& outcome, double penalty_m) {
  require_scorable(outcome);
  const double effective = outcome.dist_tool + penalty_m * outcome.nbarriers_tool;
  return (effective - outcome.dist_perfect) / outcome.dist_perfect;
}

double score_vs_oblivious(const TrialOutcome& outcome, double penalty_m) {
  require_scorable(outcome);
  const double tool = outcome.dist_tool + penalty_m * outcome.nbarriers_tool;
  const double oblivious =
      outcome.dist_oblivious + penalty_m * outcome.nbarriers_oblivious;
  return (tool - oblivious) / outcome.dist_perfect;
}

void CellAccumulator::add(const TrialOutcome& o) {
  ++trials_;
  if (o.gt_navigable) {
    ++gt_navigable_;
    rel_increase_sum_.add((o.dist_perfect - o.dist_oblivious) / o.dist_oblivious);
  }
  if (o.reported_impassible) {
    ++reported_impassible_;
  } else {
    ++reported_;
    barriers_reported_ += o.nbarriers_tool;
    if (!o.gt_navigable) ++falsely_navigable_;
  }
  if (o.scorable()) {
    ++scored_;
    score_perfect_sum_.add(score_vs_perfect(o, penalty_m_));
    score_oblivious_sum_.add(score_vs_oblivious(o, penalty_m_));
  }
  error_a_ += o.error_a ? 1 : 0;
  error_b_ += o.error_b ? 1 : 0;
  error_c_ += o.error_c ? 1 : 0;
}

void CellAccumulator::merge(const CellAccumulator& other) {
  if (!(other.key_ == key_)) throw Error("aggregate: mixed cell keys");
  if (other.penalty_m_ != penalty_m_) throw Error("aggregate: mixed penalties");
  trials_ += other.trials_;
  gt_navigable_ += other.gt_navigable_;
  reported_ += other.reported_;
  reported_impassible_ += other.reported_impassible_;
  scored_ += other.scored_;
  error_a_ += other.error_a_;
  error_b_ += other.error_b_;
  error_c_ += other.error_c_;
  falsely_navigable_ += other.falsely_navigable_;
  barriers_reported_ += other.barriers_reported_;
  score_perfect_sum_.merge(other.score_perfect_sum_);
  score_oblivious_sum_.merge(other.score_oblivious_sum_);
  rel_increase_sum_.merge(other.rel_increase_sum_);
}

CellSummary CellAccumulator::summary() const {
  CellSummary s;
  s.key = key_;
  s.penalty_m = penalty_m_;
  s.trials = trials_;
  s.n_gt_navigable = gt_navigable_;
  s.n_gt_impassible = trials_ - gt_navigable_;
  s.n_reported = reported_;
  s.n_scored = scored_;
  s.n_error_a = error_a_;
  s.n_error_b = error_b_;
  s.n_error_c = error_c_;

  s.frac_gt_impassible = ratio(static_cast<double>(s.n_gt_impassible), trials_);
  s.frac_reported_impassible =
      ratio(static_cast<double>(reported_impassible_), trials_);
  s.frac_error_a_given_gt_navigable =
      ratio(static_cast<double>(error_a_), gt_navigable_);
  s.frac_falsely_navigable_given_gt_impassible =
      ratio(static_cast<double>(falsely_navigable_), s.n_gt_impassible);
  s.frac_error_c_given_reported = ratio(static_cast<double>(error_c_), reported_);
  s.mean_nbarriers_given_reported =
      ratio(static_cast<double>(barriers_reported_), reported_);
  s.mean_score_vs_perfect = ratio(score_perfect_sum_.value(), scored_);
  s.mean_score_vs_oblivious = ratio(score_oblivious_sum_.value(), scored_);
  s.mean_rel_dist_increase_perfect_tool = ratio(rel_increase_sum_.value(), gt_navigable_);
  return s;
}

CellSummary aggregate(std::span<const TrialOutcome> outcomes, const CellKey& key,
                      double penalty_m) {
  CellAccumulator acc(key, penalty_m);
  for (const TrialOutcome& o : outcomes) acc.add(o);
  return acc.summary();
}

}  // namespace accsim
