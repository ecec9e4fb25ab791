#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "accsim/map.h"
#include "accsim/metrics.h"
#include "accsim/routes.h"

namespace accsim {

inline constexpr const char* kVersion = "accsim 1.0.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr double kDefaultCapM = 1500.0;

// Inclusive arithmetic grid. Values are start + i * step for every i with
// start + i * step <= stop + step / 2, rounded to 12 decimals.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

struct SweepConfig {
  std::filesystem::path map_path;
  std::optional<std::filesystem::path> journeys_path;
  std::optional<SamplingSpec> sampling;
  std::uint64_t sampling_seed = 0;
  std::optional<std::filesystem::path> route_lists_path;
  Grid rate_grid;
  Grid tpr_grid;
  Grid tnr_grid;
  std::uint64_t trials_per_cell = 0;
  std::uint64_t master_seed = 0;
  double cap_m = kDefaultCapM;
  double penalty_m = kDefaultPenaltyM;
  std::filesystem::path output_path;
  unsigned worker_count = 0;  // 0: one per hardware thread
  bool shared_truth = false;
};

// Relative paths resolve against base_dir. Unknown keys are rejected.
SweepConfig parse_config(const nlohmann::json& document,
                         const std::filesystem::path& base_dir = {});
SweepConfig load_config_file(const std::filesystem::path& path);

// Canonical JSON form of the config (defaults applied, worker_count left
// out since it cannot change results), and its FNV-1a 64 hash in hex.
nlohmann::json canonical_config(const SweepConfig& config);
std::string config_hash(const SweepConfig& config);

// In-memory sweep description.
struct SweepPlan {
  std::vector<double> rates;
  std::vector<double> tprs;
  std::vector<double> tnrs;
  std::uint64_t trials_per_cell = 1;
  std::uint64_t master_seed = 0;
  double penalty_m = kDefaultPenaltyM;
  bool shared_truth = false;
  unsigned workers = 1;

  std::size_t cells_per_journey() const {
    return rates.size() * tprs.size() * tnrs.size();
  }
};

// Runs every (journey, rate, tpr, tnr) cell. route_lists[j] belongs to
// journeys[j]. The result is in (journey, rate, tpr, tnr) order and does not
// depend on plan.workers.
std::vector<CellSummary> run_cells(const Map& map,
                                   std::span<const Journey> journeys,
                                   std::span<const RouteList> route_lists,
                                   const SweepPlan& plan);

struct SweepResult {
  std::vector<CellSummary> cells;
  std::vector<std::string> warnings;
  nlohmann::json manifest;
};

// Loads inputs, enumerates (or reads) route lists, runs the sweep, and
// writes output_path plus the manifest at manifest_path(output_path).
// ACCESS_SIM_WORKERS overrides worker_count.
SweepResult run_sweep(const SweepConfig& config);

std::filesystem::path manifest_path(const std::filesystem::path& output_path);

std::span<const char* const> csv_columns();
void write_csv(std::ostream& out, std::span<const CellSummary> cells);
// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace accsim
