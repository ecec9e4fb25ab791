#include "accsim/experiment.h"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "accsim/ablation.h"
#include "accsim/rng.h"
#include "accsim/stochastic.h"

namespace accsim {

namespace {

using nlohmann::json;

constexpr const char* kColumns[] = {
    "journey_id",
    "rate",
    "tpr",
    "tnr",
    "trials",
    "n_gt_navigable",
    "frac_gt_impassible",
    "frac_reported_impassible",
    "frac_error_a_given_gt_navigable",
    "frac_falsely_navigable_given_gt_impassible",
    "frac_error_c_given_reported",
    "mean_nbarriers_given_reported",
    "mean_score_vs_perfect",
    "mean_score_vs_oblivious",
    "mean_rel_dist_increase_perfect_tool",
};

double number_field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw Error(where + ": missing required key " + key);
  if (!it->is_number()) throw Error(where + ": " + key + " must be a number");
  double value = it->get<double>();
  if (!std::isfinite(value)) throw Error(where + ": " + key + " must be finite");
  return value;
}

std::uint64_t count_field(const json& value, const std::string& name) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    const std::int64_t v = value.get<std::int64_t>();
    if (v < 0) throw Error("config: " + name + " must not be negative");
    return static_cast<std::uint64_t>(v);
  }
  throw Error("config: " + name + " must be a non-negative integer");
}

Grid parse_grid(const json& value, const std::string& name) {
  if (!value.is_object()) throw Error("config: " + name + " must be an object");
  for (const auto& [key, unused] : value.items()) {
    if (key != "start" && key != "stop" && key != "step") {
      throw Error("config: " + name + ": unknown key " + key);
    }
  }
  Grid grid{number_field(value, "start", "config: " + name),
            number_field(value, "stop", "config: " + name),
            number_field(value, "step", "config: " + name)};
  if (!(grid.step > 0.0)) throw Error("config: " + name + ": non-positive grid step");
  if (grid.stop < grid.start) {
    throw Error("config: " + name + ": non-monotone grid (stop < start)");
  }
  for (double v : grid.values()) {
    if (v < 0.0 || v > 1.0) {
      throw Error("config: " + name + ": values must lie in [0, 1]");
    }
  }
  return grid;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const json& value, const std::string& name) {
  if (!value.is_string()) throw Error("config: " + name + " must be a string");
  std::filesystem::path p = value.get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

json grid_json(const Grid& g) {
  return {{"start", g.start}, {"stop", g.stop}, {"step", g.step}};
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string optional_field(const std::optional<double>& value) {
  return value ? format_number(*value) : "NA";
}

unsigned resolve_workers(unsigned configured) {
  if (const char* env = std::getenv("ACCESS_SIM_WORKERS"); env != nullptr && *env) {
    unsigned parsed = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), parsed);
    if (ec != std::errc() || *ptr != '\0') {
      throw Error(std::string("ACCESS_SIM_WORKERS: not a non-negative integer: ") + env);
    }
    configured = parsed;
  }
  if (configured == 0) configured = std::max(1U, std::thread::hardware_concurrency());
  return configured;
}

// Scratch state of one worker, reused across cells.
struct CellRunner {
  const Map& map;
  const SweepPlan& plan;
  const std::vector<std::vector<double>>& barrier_p;
  const std::vector<std::vector<double>>& miss_p;
  const std::vector<std::vector<double>>& false_alarm_p;
  std::vector<EdgeSet> truths;
  std::vector<EdgeSet> perceived;
  std::vector<Selection> tool;
  std::vector<Selection> perfect;

  CellSummary run(std::size_t j, const Journey& journey, const RouteList& routes,
                  const IncidenceMatrix& inc, std::size_t ri, std::size_t ti,
                  std::size_t ni) {
    const std::size_t n = plan.trials_per_cell;
    truths.resize(n);
    perceived.resize(n);
    tool.assign(n, Selection::impassible());
    perfect.assign(n, Selection::impassible());

    for (std::size_t t = 0; t < n; ++t) {
      StreamKey truth_key{Purpose::kGroundTruth, j, ri, ti, ni, t};
      if (plan.shared_truth) truth_key.tpr = truth_key.tnr = 0;
      RngStream truth_stream = derive_stream(plan.master_seed, truth_key);
      sample_edges(barrier_p[ri], truth_stream, truths[t]);

      RngStream perception_stream =
          derive_stream(plan.master_seed, {Purpose::kPerception, j, ri, ti, ni, t});
      perceive(map, truths[t], miss_p[ti], false_alarm_p[ni], perception_stream,
               perceived[t]);
    }

    BatchSelector selector(inc);
    selector.select(perceived, tool);
    selector.select(truths, perfect);

    CellAccumulator acc(
        {journey.id, plan.rates[ri], plan.tprs[ti], plan.tnrs[ni]}, plan.penalty_m);
    for (std::size_t t = 0; t < n; ++t) {
      acc.add(evaluate_trial(routes, truths[t], tool[t], perfect[t]));
    }
    return acc.summary();
  }
};

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> out;
  if (!(step > 0.0) || stop < start) return out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = start + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

SweepConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error("config: document must be a JSON object");
  static const std::set<std::string> kKnown = {
      "map_path",  "journeys_path",   "sampling",    "route_lists_path",
      "rate_grid", "tpr_grid",        "tnr_grid",    "trials_per_cell",
      "master_seed", "cap_m",         "penalty_m",   "output_path",
      "worker_count", "shared_truth"};
  for (const auto& [key, unused] : doc.items()) {
    if (!kKnown.contains(key)) throw Error("config: unknown key " + key);
  }
  for (const char* key : {"map_path", "rate_grid", "tpr_grid", "tnr_grid",
                          "trials_per_cell", "master_seed", "output_path"}) {
    if (!doc.contains(key)) throw Error(std::string("config: missing required key ") + key);
  }

  SweepConfig c;
  c.map_path = resolve(base_dir, doc["map_path"], "map_path");
  c.output_path = resolve(base_dir, doc["output_path"], "output_path");

  const bool has_journeys = doc.contains("journeys_path");
  const bool has_sampling = doc.contains("sampling");
  if (has_journeys == has_sampling) {
    throw Error("config: exactly one of journeys_path and sampling is required");
  }
  if (has_journeys) c.journeys_path = resolve(base_dir, doc["journeys_path"], "journeys_path");
  if (doc.contains("route_lists_path")) {
    c.route_lists_path = resolve(base_dir, doc["route_lists_path"], "route_lists_path");
  }

  c.rate_grid = parse_grid(doc["rate_grid"], "rate_grid");
  c.tpr_grid = parse_grid(doc["tpr_grid"], "tpr_grid");
  c.tnr_grid = parse_grid(doc["tnr_grid"], "tnr_grid");

  c.trials_per_cell = count_field(doc["trials_per_cell"], "trials_per_cell");
  if (c.trials_per_cell < 1) throw Error("config: trials_per_cell must be at least 1");
  c.master_seed = count_field(doc["master_seed"], "master_seed");
  c.sampling_seed = c.master_seed;

  if (has_sampling) {
    const json& s = doc["sampling"];
    if (!s.is_object()) throw Error("config: sampling must be an object");
    SamplingSpec spec;
    for (const auto& [key, value] : s.items()) {
      if (key == "count") {
        spec.count = count_field(value, "sampling.count");
      } else if (key == "bins") {
        spec.bins = count_field(value, "sampling.bins");
      } else if (key == "seed") {
        c.sampling_seed = count_field(value, "sampling.seed");
      } else if (key != "min_crow_m" && key != "max_crow_m") {
        throw Error("config: sampling: unknown key " + key);
      }
    }
    if (!s.contains("count")) throw Error("config: sampling: missing required key count");
    spec.min_crow_m = number_field(s, "min_crow_m", "config: sampling");
    spec.max_crow_m = number_field(s, "max_crow_m", "config: sampling");
    if (spec.min_crow_m < 0.0) throw Error("config: sampling: min_crow_m must not be negative");
    c.sampling = spec;
  }

  if (doc.contains("cap_m")) {
    c.cap_m = number_field(doc, "cap_m", "config");
    if (!(c.cap_m > 0.0)) throw Error("config: cap_m must be positive");
  }
  if (doc.contains("penalty_m")) {
    c.penalty_m = number_field(doc, "penalty_m", "config");
    if (c.penalty_m < 0.0) throw Error("config: penalty_m must not be negative");
  }
  if (doc.contains("worker_count")) {
    c.worker_count = static_cast<unsigned>(count_field(doc["worker_count"], "worker_count"));
  }
  if (doc.contains("shared_truth")) {
    if (!doc["shared_truth"].is_boolean()) throw Error("config: shared_truth must be a boolean");
    c.shared_truth = doc["shared_truth"].get<bool>();
  }
  return c;
}

SweepConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json canonical_config(const SweepConfig& c) {
  json doc = {{"map_path", c.map_path.generic_string()},
              {"rate_grid", grid_json(c.rate_grid)},
              {"tpr_grid", grid_json(c.tpr_grid)},
              {"tnr_grid", grid_json(c.tnr_grid)},
              {"trials_per_cell", c.trials_per_cell},
              {"master_seed", c.master_seed},
              {"cap_m", c.cap_m},
              {"penalty_m", c.penalty_m},
              {"output_path", c.output_path.generic_string()},
              {"shared_truth", c.shared_truth}};
  if (c.journeys_path) doc["journeys_path"] = c.journeys_path->generic_string();
  if (c.route_lists_path) doc["route_lists_path"] = c.route_lists_path->generic_string();
  if (c.sampling) {
    doc["sampling"] = {{"count", c.sampling->count},
                       {"min_crow_m", c.sampling->min_crow_m},
                       {"max_crow_m", c.sampling->max_crow_m},
                       {"bins", c.sampling->bins},
                       {"seed", c.sampling_seed}};
  }
  return doc;
}

std::string config_hash(const SweepConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<CellSummary> run_cells(const Map& map, std::span<const Journey> journeys,
                                   std::span<const RouteList> route_lists,
                                   const SweepPlan& plan) {
  if (journeys.size() != route_lists.size()) {
    throw Error("run_cells: one route list per journey required");
  }
  if (plan.trials_per_cell < 1) throw Error("run_cells: trials_per_cell must be at least 1");

  std::vector<std::vector<double>> barrier_p, miss_p, false_alarm_p;
  for (double rate : plan.rates) barrier_p.push_back(barrier_probabilities(map, rate));
  for (double tpr : plan.tprs) miss_p.push_back(miss_probabilities(map, {tpr, 1.0}));
  for (double tnr : plan.tnrs) {
    false_alarm_p.push_back(false_alarm_probabilities(map, {1.0, tnr}));
  }

  std::vector<IncidenceMatrix> incidence;
  incidence.reserve(route_lists.size());
  for (const RouteList& list : route_lists) incidence.push_back(build_incidence(list, map));

  const std::size_t per_journey = plan.cells_per_journey();
  const std::size_t total = per_journey * journeys.size();
  std::vector<CellSummary> cells(total);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    CellRunner runner{map, plan, barrier_p, miss_p, false_alarm_p, {}, {}, {}, {}};
    for (std::size_t cell = next++; cell < total; cell = next++) {
      const std::size_t j = cell / per_journey;
      std::size_t rest = cell % per_journey;
      const std::size_t ni = rest % plan.tnrs.size();
      rest /= plan.tnrs.size();
      const std::size_t ti = rest % plan.tprs.size();
      const std::size_t ri = rest / plan.tprs.size();
      cells[cell] = runner.run(j, journeys[j], route_lists[j], incidence[j], ri, ti, ni);
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, plan.workers), total));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return cells;
}

std::filesystem::path manifest_path(const std::filesystem::path& output_path) {
  std::filesystem::path p = output_path;
  p += ".manifest.json";
  return p;
}

SweepResult run_sweep(const SweepConfig& config) {
  const Map map = load_map_file(config.map_path);

  std::vector<Journey> journeys =
      config.journeys_path ? load_journeys_file(*config.journeys_path, map)
                           : sample_journeys(map, *config.sampling, config.sampling_seed);

  std::vector<RouteList> route_lists;
  if (config.route_lists_path) {
    std::map<std::string, RouteList> by_id;
    for (RouteList& list : read_route_lists_file(*config.route_lists_path, map)) {
      std::string id = list.journey_id;
      by_id.emplace(std::move(id), std::move(list));
    }
    for (const Journey& j : journeys) {
      auto it = by_id.find(j.id);
      if (it == by_id.end()) throw Error("route lists: no entry for journey " + j.id);
      if (it->second.cap_m != config.cap_m) {
        throw Error("route lists: journey " + j.id + " was enumerated with cap_m " +
                    format_number(it->second.cap_m) + ", config has " +
                    format_number(config.cap_m));
      }
      route_lists.push_back(std::move(it->second));
    }
  } else {
    for (const Journey& j : journeys) route_lists.push_back(enumerate_routes(map, j, config.cap_m));
  }

  SweepResult result;
  for (std::size_t j = 0; j < journeys.size(); ++j) {
    if (route_lists[j].routes.empty()) {
      result.warnings.push_back("journey " + journeys[j].id + " has no route within cap_m " +
                                format_number(config.cap_m) +
                                "; its cells are all impassible");
    }
  }

  SweepPlan plan;
  plan.rates = config.rate_grid.values();
  plan.tprs = config.tpr_grid.values();
  plan.tnrs = config.tnr_grid.values();
  plan.trials_per_cell = config.trials_per_cell;
  plan.master_seed = config.master_seed;
  plan.penalty_m = config.penalty_m;
  plan.shared_truth = config.shared_truth;
  plan.workers = resolve_workers(config.worker_count);
  result.cells = run_cells(map, journeys, route_lists, plan);

  if (config.output_path.has_parent_path()) {
    std::filesystem::create_directories(config.output_path.parent_path());
  }
  {
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) throw Error("cannot write " + config.output_path.string());
    write_csv(out, result.cells);
  }

  json columns = json::array();
  for (const char* c : csv_columns()) columns.push_back(c);
  result.manifest = {{"config_hash", config_hash(config)},
                     {"master_seed", config.master_seed},
                     {"version", kVersion},
                     {"csv_schema_version", kCsvSchemaVersion},
                     {"columns", std::move(columns)},
                     {"cap_m", config.cap_m},
                     {"penalty_m", config.penalty_m},
                     {"shared_truth", config.shared_truth},
                     {"journeys", journeys.size()},
                     {"cells", result.cells.size()},
                     {"trials", result.cells.size() * config.trials_per_cell},
                     {"warnings", result.warnings}};
  std::ofstream manifest(manifest_path(config.output_path), std::ios::binary);
  if (!manifest) throw Error("cannot write " + manifest_path(config.output_path).string());
  manifest << result.manifest.dump(2) << '\n';
  return result;
}

std::span<const char* const> csv_columns() { return kColumns; }

std::string format_number(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, std::span<const CellSummary> cells) {
  bool first = true;
  for (const char* c : csv_columns()) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const CellSummary& s : cells) {
    out << csv_field(s.key.journey_id) << ',' << format_number(s.key.rate) << ','
        << format_number(s.key.tpr) << ',' << format_number(s.key.tnr) << ','
        << s.trials << ',' << s.n_gt_navigable << ','
        << optional_field(s.frac_gt_impassible) << ','
        << optional_field(s.frac_reported_impassible) << ','
        << optional_field(s.frac_error_a_given_gt_navigable) << ','
        << optional_field(s.frac_falsely_navigable_given_gt_impassible) << ','
        << optional_field(s.frac_error_c_given_reported) << ','
        << optional_field(s.mean_nbarriers_given_reported) << ','
        << optional_field(s.mean_score_vs_perfect) << ','
        << optional_field(s.mean_score_vs_oblivious) << ','
        << optional_field(s.mean_rel_dist_increase_perfect_tool) << '\n';
  }
}

}  // namespace accsim
