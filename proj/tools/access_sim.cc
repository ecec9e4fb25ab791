// access_sim: command-line driver for the accessibility navigation simulator.
//
//   access_sim validate <map>
//   access_sim sample-journeys <map> --count N --min M --max M --bins B --seed S [-o FILE]
//   access_sim enumerate <map> <journeys> [--cap M] -o <routelists>
//   access_sim sweep <config> [--workers N]
//
// Errors go to stderr as one JSON object per line: {"error": "..."}.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "accsim/experiment.h"
#include "accsim/map.h"
#include "accsim/routes.h"

namespace {

using nlohmann::json;

void report_error(const std::string& message) {
  std::cerr << json{{"error", message}}.dump() << '\n';
}

void emit(const json& document, const std::string& output) {
  if (output.empty()) {
    std::cout << document.dump(2) << '\n';
    return;
  }
  std::ofstream out(output);
  if (!out) throw accsim::Error("cannot write " + output);
  out << document.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo simulator linking accessibility documentation "
               "accuracy to A-to-B navigation performance",
               "access_sim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", accsim::kVersion);

  std::string map_path;
  std::string journeys_path;
  std::string output;
  std::string config_path;

  auto* validate = app.add_subcommand("validate", "Validate a map file");
  validate->add_option("map", map_path, "Map JSON file")->required();

  accsim::SamplingSpec sampling;
  std::uint64_t seed = 0;
  auto* sample = app.add_subcommand(
      "sample-journeys", "Draw journeys stratified by crow-flies distance");
  sample->add_option("map", map_path, "Map JSON file")->required();
  sample->add_option("--count", sampling.count, "Number of journeys")->required();
  sample->add_option("--min", sampling.min_crow_m, "Minimum crow-flies distance (m)")
      ->required();
  sample->add_option("--max", sampling.max_crow_m, "Maximum crow-flies distance (m)")
      ->required();
  sample->add_option("--bins", sampling.bins, "Number of distance strata")
      ->default_val(1);
  sample->add_option("--seed", seed, "Sampling seed")->default_val(0);
  sample->add_option("-o,--output", output, "Output journeys file (default stdout)");

  double cap_m = accsim::kDefaultCapM;
  auto* enumerate = app.add_subcommand(
      "enumerate", "Pre-compute all simple routes under the cap for each journey");
  enumerate->add_option("map", map_path, "Map JSON file")->required();
  enumerate->add_option("journeys", journeys_path, "Journeys JSON file")->required();
  enumerate->add_option("--cap", cap_m, "Route length cap (m)")->default_val(cap_m);
  enumerate->add_option("-o,--output", output, "Output route-list file (JSON lines)")
      ->required();

  std::optional<unsigned> workers;
  auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep from a config file");
  sweep->add_option("config", config_path, "Sweep config JSON file")->required();
  sweep->add_option("--workers", workers, "Override worker_count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    if (code != 0 && !e.get_name().empty() && e.get_name() != "CallForHelp" &&
        e.get_name() != "CallForAllHelp" && e.get_name() != "CallForVersion") {
      std::cerr << app.help();
    }
    return code;
  }

  try {
    if (*validate) {
      const accsim::Map map = accsim::load_map_file(map_path);
      std::cout << json{{"valid", true},
                        {"nodes", map.node_count()},
                        {"edges", map.edge_count()},
                        {"avg_len_m", map.avg_len_m()}}
                       .dump()
                << '\n';
    } else if (*sample) {
      const accsim::Map map = accsim::load_map_file(map_path);
      auto journeys = accsim::sample_journeys(map, sampling, seed);
      emit(accsim::journeys_to_json(journeys, map), output);
    } else if (*enumerate) {
      if (!(cap_m > 0.0)) throw accsim::Error("--cap must be positive");
      const accsim::Map map = accsim::load_map_file(map_path);
      const auto journeys = accsim::load_journeys_file(journeys_path, map);
      std::ofstream out(output);
      if (!out) throw accsim::Error("cannot write " + output);
      json summary = json::array();
      for (const accsim::Journey& journey : journeys) {
        auto list = accsim::enumerate_routes(map, journey, cap_m);
        accsim::write_route_list(out, list, map);
        summary.push_back({{"journey_id", journey.id}, {"routes", list.routes.size()}});
      }
      std::cout << summary.dump() << '\n';
    } else if (*sweep) {
      accsim::SweepConfig config = accsim::load_config_file(config_path);
      if (workers) config.worker_count = *workers;
      const auto result = accsim::run_sweep(config);
      for (const std::string& w : result.warnings) {
        std::cerr << json{{"warning", w}}.dump() << '\n';
      }
      std::cout << json{{"output", config.output_path.string()},
                        {"manifest", accsim::manifest_path(config.output_path).string()},
                        {"cells", result.cells.size()}}
                       .dump()
                << '\n';
    }
  } catch (const accsim::Error& e) {
    report_error(e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(std::string("internal error: ") + e.what());
    return 2;
  }
  return 0;
}
