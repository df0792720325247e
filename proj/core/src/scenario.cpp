#include "dtue/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "dtue/network_io.hpp"

namespace dtue {

namespace {

using nlohmann::json;

} // namespace

Scenario read_scenario_json(std::istream& in, const std::string& what,
                            const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("cannot parse " + what + ": " + e.what());
  }
  try {
    Scenario sc;
    if (j.value("schema_version", 1) != 1)
      throw InputError(what + ": unsupported schema_version");
    sc.name = j.value("name", "scenario");
    std::filesystem::path net = j.at("network").get<std::string>();
    sc.network_path = net.is_absolute() ? net : base_dir / net;
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      sc.weights.alpha = w.value("alpha", sc.weights.alpha);
      sc.weights.beta = w.value("beta", sc.weights.beta);
      sc.weights.gamma = w.value("gamma", sc.weights.gamma);
    }
    sc.solver = j.value("solver", "adagdd");
    if (j.contains("solver_config")) {
      const auto& c = j.at("solver_config");
      sc.config.outer_max = c.value("outer_max_iterations", sc.config.outer_max);
      sc.config.inner_max = c.value("inner_max_iterations", sc.config.inner_max);
      sc.config.inner_patience = c.value("inner_patience", sc.config.inner_patience);
      sc.config.refine_max = c.value("refine_max_moves", sc.config.refine_max);
      sc.config.golden_tol = c.value("golden_tolerance", sc.config.golden_tol);
      sc.config.golden_max_evals =
          c.value("golden_max_evaluations", sc.config.golden_max_evals);
      sc.config.rounding = c.value("rounding", sc.config.rounding);
      sc.config.dtd_rate = c.value("dtd_learning_rate", sc.config.dtd_rate);
      sc.config.seed = c.value("seed", sc.config.seed);
    }
    sc.initial = j.value("initial", "default");
    if (j.contains("q_file")) {
      std::filesystem::path qf = j.at("q_file").get<std::string>();
      sc.q_file = qf.is_absolute() ? qf : base_dir / qf;
    }
    if (j.contains("initial_options")) {
      const auto& io = j.at("initial_options");
      sc.initial_settings.latest_option =
          io.value("latest_option", sc.initial_settings.latest_option);
      sc.initial_settings.uniform_window_end =
          io.value("uniform_window_end", sc.initial_settings.uniform_window_end);
    }
    sc.demand_scale = j.value("demand_scale", 1.0);
    if (!(sc.demand_scale > 0)) throw InputError(what + ": demand_scale must be > 0");
    if (j.contains("reports"))
      sc.reports = j.at("reports").get<std::vector<std::string>>();
    return sc;
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
  return read_scenario_json(in, "scenario file '" + path.string() + "'",
                            path.parent_path());
}

namespace {

// The primary route carries every bundled initial setting; remaining routes
// start empty and receive flow only through solver shifts.
RouteIdx primary_route(const Network& net, OdIdx k) {
  return net.ods[k].routes.front();
}

OptionIdx option_at_or_fail(const Network& net, RouteIdx r, Sec depart,
                            const std::string& setting) {
  OptionIdx o = net.option_at(r, depart);
  if (o == kInvalidIdx)
    throw InputError("initial setting '" + setting + "': " +
                     std::to_string(depart) + " is not a departure option of '" +
                     net.ods[net.routes[r].od].id + "/" + net.routes[r].id + "'");
  return o;
}

} // namespace

FlowDistribution generate_initial(const std::string& setting, const Network& net,
                                  const InitialSettings& s) {
  FlowDistribution q(net);
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    const OdDemand& od = net.ods[k];
    RouteIdx r = primary_route(net, k);
    const auto& opts = net.options[r];
    if (od.demand == 0) continue;

    if (setting == "default") {
      OptionIdx o = option_at_or_fail(net, r, od.preferred_departure, setting);
      q.at(r, o) = od.demand;
    } else if (setting == "earliest") {
      q.at(r, 0) = od.demand;
    } else if (setting == "latest") {
      OptionIdx o = s.latest_option < 0
                        ? static_cast<OptionIdx>(opts.size()) - 1
                        : option_at_or_fail(net, r, s.latest_option, setting);
      q.at(r, o) = od.demand;
    } else if (setting == "default-earliest") {
      OptionIdx pref = option_at_or_fail(net, r, od.preferred_departure, setting);
      Count half = od.demand / 2;
      q.at(r, pref) += od.demand - half; // odd demand favors the default
      q.at(r, 0) += half;
    } else if (setting == "uniform") {
      OptionIdx last = static_cast<OptionIdx>(opts.size()) - 1;
      OptionIdx window_end = last;
      if (s.uniform_window_end >= 0) {
        window_end = option_at_or_fail(net, r, s.uniform_window_end, setting);
      }
      Count window = window_end + 1;
      Count share = od.demand / window;
      Count rest = od.demand - share * window;
      for (OptionIdx o = 0; o <= window_end; ++o) q.at(r, o) = share;
      // The remainder spills into the option after the window (the last
      // window option when the window already covers the whole set).
      OptionIdx spill = window_end < last ? window_end + 1 : window_end;
      q.at(r, spill) += rest;
    } else {
      throw InputError("unknown initial setting '" + setting + "'");
    }
  }
  q.validate(net);
  return q;
}

ScenarioResult run_scenario(const Scenario& sc) {
  ScenarioResult res;
  res.scenario = sc;
  Network net = load_network(sc.network_path);
  if (sc.demand_scale != 1.0) net = scale_demand(net, sc.demand_scale);
  res.network = std::move(net);

  Evaluator ev(res.network, sc.weights);

  FlowDistribution q0;
  if (sc.initial == "file") {
    std::ifstream in(sc.q_file);
    if (!in) throw InputError("cannot open Q file '" + sc.q_file.string() + "'");
    q0 = read_flow_csv(in, res.network);
    q0.validate(res.network);
  } else {
    q0 = generate_initial(sc.initial, res.network, sc.initial_settings);
  }

  if (sc.solver == "adagdd")
    res.report = adagdd(ev, q0, sc.config);
  else if (sc.solver == "msa")
    res.report = msa(ev, q0, sc.config);
  else if (sc.solver == "dtd")
    res.report = dtd_learning(ev, q0, sc.config);
  else
    throw InputError("unknown solver '" + sc.solver + "'");

  auto final_eval = ev.evaluate(res.report.q);
  res.final_costs = std::move(final_eval.costs);
  res.final_loading = std::move(final_eval.loading);
  return res;
}

} // namespace dtue
