#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "dtue/scenario.hpp"

namespace dtue {

namespace {

// Pinned CSV number format: dot-decimal, six places.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt(long double v) { return fmt(static_cast<double>(v)); }

void open_or_fail(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path, std::ios::binary); // LF line endings on every platform
  if (!out) throw InputError("cannot write report file '" + path.string() + "'");
}

bool selected(const std::vector<std::string>& reports, const std::string& id) {
  return std::find(reports.begin(), reports.end(), id) != reports.end();
}

} // namespace

void write_convergence_csv(std::ostream& out, const SolverReport& report) {
  out << "iteration,zeta,srg\n";
  int i = 0;
  for (const IterationRecord& rec : report.trace) {
    if (!rec.accepted) continue;
    out << i++ << ',' << fmt(rec.zeta) << ',' << fmt(rec.srg) << '\n';
  }
}

void write_od_costs_csv(std::ostream& out, const Network& net,
                        const FlowDistribution& q, const CostTable& costs) {
  out << "od_id,demand,mean_cost\n";
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    __int128 total = 0;
    Count users = 0;
    for (const OptionRef& ref : net.od_options[k]) {
      Count c = q.at(ref.route, ref.option);
      if (c == 0) continue;
      total += costs.option_costs[ref.route][ref.option].total;
      users += c;
    }
    double mean = users == 0 ? 0.0
                             : static_cast<double>(static_cast<long double>(total) /
                                                   static_cast<long double>(users));
    out << net.ods[k].id << ',' << users << ',' << fmt(mean) << '\n';
  }
}

void write_system_cost_csv(std::ostream& out, const Network& net,
                           const FlowDistribution& q, const CostTable& costs) {
  __int128 total = 0;
  Count users = 0;
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k)
    for (const OptionRef& ref : net.od_options[k]) {
      Count c = q.at(ref.route, ref.option);
      if (c == 0) continue;
      total += costs.option_costs[ref.route][ref.option].total;
      users += c;
    }
  long double zeta = system_gap(net, q, costs);
  double rel = 0.0;
  try {
    if (users > 0) rel = static_cast<double>(srg(net, q, costs));
  } catch (const InputError&) {
    rel = std::numeric_limits<double>::quiet_NaN();
  }
  out << "total_cost,users,mean_cost,zeta,srg\n";
  out << static_cast<long long>(total) << ',' << users << ','
      << fmt(users == 0 ? 0.0
                        : static_cast<double>(static_cast<long double>(total) /
                                              static_cast<long double>(users)))
      << ',' << fmt(zeta) << ',' << fmt(rel) << '\n';
}

void write_heatmap_csv(std::ostream& out, const Network& net,
                       const FlowDistribution& q) {
  out << "origin";
  for (int b = 0; b < kHeatmapBins; ++b)
    out << ",bin_" << kHeatmapStart + static_cast<Sec>(b) * kHeatmapBinWidth;
  out << '\n';

  for (StationIdx s = 0; s < static_cast<StationIdx>(net.stations.size()); ++s) {
    if (!net.stations[s].is_origin) continue;
    std::vector<Count> demand(kHeatmapBins, 0);
    std::vector<Count> capacity(kHeatmapBins, 0);
    for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
      if (net.ods[k].origin != s) continue;
      for (const OptionRef& ref : net.od_options[k]) {
        Count c = q.at(ref.route, ref.option);
        if (c == 0) continue;
        Sec t = net.options[ref.route][ref.option].depart;
        Sec bin = (t - kHeatmapStart) / kHeatmapBinWidth;
        if (t >= kHeatmapStart && bin < kHeatmapBins) demand[bin] += c;
      }
    }
    for (LineIdx l : net.stations[s].lines) {
      int pos = net.lines[l].position_of(s);
      if (pos < 0 || pos + 1 == static_cast<int>(net.lines[l].stations.size()))
        continue; // runs do not depart a line's terminal
      for (RunIdx run : net.line_runs[l]) {
        Sec t = net.runs[run].departure[pos];
        Sec bin = (t - kHeatmapStart) / kHeatmapBinWidth;
        if (t >= kHeatmapStart && bin < kHeatmapBins)
          capacity[bin] += net.lines[l].capacity;
      }
    }
    out << net.stations[s].id;
    for (int b = 0; b < kHeatmapBins; ++b) {
      out << ',';
      if (capacity[b] == 0) continue; // no scheduled trains: empty cell
      out << fmt(static_cast<double>(demand[b]) / static_cast<double>(capacity[b]));
    }
    out << '\n';
  }
}

void write_trace_log_csv(std::ostream& out, const SolverReport& report) {
  out << "iteration,loop,zeta,srg,theta,wall_ms\n";
  for (const IterationRecord& rec : report.trace) {
    std::string loop(1, rec.phase);
    if (!rec.accepted) loop += "-rejected";
    out << rec.index << ',' << loop << ',' << fmt(rec.zeta) << ','
        << fmt(rec.srg) << ',' << fmt(rec.theta) << ',' << fmt(rec.wall_ms)
        << '\n';
  }
}

void write_manifest_json(std::ostream& out, const ScenarioResult& res) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["version"] = kVersion;
  j["name"] = res.scenario.name;
  j["network"] = res.scenario.network_path.string();
  j["solver"] = res.scenario.solver;
  j["initial"] = res.scenario.initial;
  j["demand_scale"] = res.scenario.demand_scale;
  j["seed"] = res.scenario.config.seed;
  j["weights"] = {{"alpha", res.scenario.weights.alpha},
                  {"beta", res.scenario.weights.beta},
                  {"gamma", res.scenario.weights.gamma}};
  j["solver_config"] = {
      {"outer_max_iterations", res.scenario.config.outer_max},
      {"inner_max_iterations", res.scenario.config.inner_max},
      {"inner_patience", res.scenario.config.inner_patience},
      {"refine_max_moves", res.scenario.config.refine_max},
      {"golden_tolerance", res.scenario.config.golden_tol},
      {"golden_max_evaluations", res.scenario.config.golden_max_evals},
      {"rounding", res.scenario.config.rounding},
      {"dtd_learning_rate", res.scenario.config.dtd_rate}};
  j["termination"] = res.report.termination;
  j["zeta"] = static_cast<double>(res.report.zeta);
  j["srg"] = res.report.srg;
  j["certificate_pass"] = res.report.certificate.pass;
  j["simulations"] = res.report.simulations;
  j["wall_seconds"] = res.report.wall_seconds;
  out << j.dump(2) << '\n';
}

void write_reports(const ScenarioResult& res,
                   const std::filesystem::path& out_dir, bool trace) {
  std::filesystem::create_directories(out_dir);
  const auto& sel = res.scenario.reports;
  std::ofstream out;
  if (selected(sel, "convergence")) {
    open_or_fail(out, out_dir / "convergence.csv");
    write_convergence_csv(out, res.report);
    out.close();
  }
  if (selected(sel, "od_costs")) {
    open_or_fail(out, out_dir / "od_costs.csv");
    write_od_costs_csv(out, res.network, res.report.q, res.final_costs);
    out.close();
  }
  if (selected(sel, "system_cost")) {
    open_or_fail(out, out_dir / "system_cost.csv");
    write_system_cost_csv(out, res.network, res.report.q, res.final_costs);
    out.close();
  }
  if (selected(sel, "heatmap")) {
    open_or_fail(out, out_dir / "heatmap.csv");
    write_heatmap_csv(out, res.network, res.report.q);
    out.close();
  }
  if (selected(sel, "solution")) {
    open_or_fail(out, out_dir / "solution.csv");
    write_flow_csv(out, res.network, res.report.q);
    out.close();
  }
  if (trace) {
    open_or_fail(out, out_dir / "trace.csv");
    write_trace_log_csv(out, res.report);
    out.close();
  }
  if (selected(sel, "manifest")) {
    open_or_fail(out, out_dir / "manifest.json");
    write_manifest_json(out, res);
    out.close();
  }
}

} // namespace dtue
