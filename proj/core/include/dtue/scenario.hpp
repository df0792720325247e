#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtue/costs.hpp"
#include "dtue/solvers.hpp"

namespace dtue {

// Fixture-level knobs for the bundled initial settings. -1 means "the last
// option of the route".
struct InitialSettings {
  Sec latest_option = -1;      // departure targeted by the `latest` setting
  Sec uniform_window_end = -1; // last departure filled by the even spread
};

struct Scenario {
  std::string name;
  std::filesystem::path network_path; // resolved against the scenario file
  CostWeights weights;
  std::string solver = "adagdd"; // adagdd | msa | dtd
  SolverConfig config;
  std::string initial = "default"; // setting id, or "file" with q_file set
  std::filesystem::path q_file;
  InitialSettings initial_settings;
  double demand_scale = 1.0;
  std::vector<std::string> reports = {"convergence", "od_costs", "system_cost",
                                      "heatmap", "solution", "manifest"};
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario read_scenario_json(std::istream& in, const std::string& what,
                            const std::filesystem::path& base_dir);

// The five bundled initial solution settings. Every generated distribution
// satisfies per-OD conservation.
//   default:          all demand on the preferred option
//   uniform:          even spread over the window, overflow to the next option
//   earliest/latest:  all demand on one end of the window
//   default-earliest: half preferred (odd user favors it), half earliest
FlowDistribution generate_initial(const std::string& setting, const Network& net,
                                  const InitialSettings& s = {});

struct ScenarioResult {
  Scenario scenario; // effective configuration after overrides
  Network network;   // demand-scaled
  SolverReport report;
  CostTable final_costs;
  LoadingResult final_loading;
};

ScenarioResult run_scenario(const Scenario& sc);

// Writes the selected report files into out_dir. CSVs are deterministic for
// a fixed scenario and seed; the manifest and the optional trace log carry
// wall-clock times.
void write_reports(const ScenarioResult& res,
                   const std::filesystem::path& out_dir, bool trace);

void write_convergence_csv(std::ostream& out, const SolverReport& report);
void write_od_costs_csv(std::ostream& out, const Network& net,
                        const FlowDistribution& q, const CostTable& costs);
void write_system_cost_csv(std::ostream& out, const Network& net,
                           const FlowDistribution& q, const CostTable& costs);
void write_heatmap_csv(std::ostream& out, const Network& net,
                       const FlowDistribution& q);
void write_trace_log_csv(std::ostream& out, const SolverReport& report);
void write_manifest_json(std::ostream& out, const ScenarioResult& res);

inline constexpr Sec kHeatmapStart = 21000; // 05:50
inline constexpr Sec kHeatmapBinWidth = 1200;
inline constexpr int kHeatmapBins = 13;

inline constexpr const char* kVersion = "0.1.0";

} // namespace dtue
