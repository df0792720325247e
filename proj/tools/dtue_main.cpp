#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "dtue/network_io.hpp"
#include "dtue/scenario.hpp"

namespace {

struct RunOverrides {
  std::string solver;
  std::string initial;
  double demand_scale = 0;
  std::int64_t seed = -1;
};

dtue::Scenario with_overrides(dtue::Scenario sc, const RunOverrides& ov) {
  if (!ov.solver.empty()) sc.solver = ov.solver;
  if (!ov.initial.empty()) sc.initial = ov.initial;
  if (ov.demand_scale > 0) sc.demand_scale = ov.demand_scale;
  if (ov.seed >= 0) sc.config.seed = static_cast<std::uint64_t>(ov.seed);
  return sc;
}

int run_command(const std::vector<std::string>& files, const RunOverrides& ov,
                const std::string& out_dir, bool trace, int jobs) {
  std::vector<dtue::Scenario> scenarios;
  for (const auto& f : files)
    scenarios.push_back(with_overrides(dtue::load_scenario(f), ov));

  std::mutex io_mutex;
  std::atomic<size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < scenarios.size();
         i = next.fetch_add(1)) {
      const dtue::Scenario& sc = scenarios[i];
      try {
        dtue::ScenarioResult res = dtue::run_scenario(sc);
        std::filesystem::path dir =
            scenarios.size() == 1 ? std::filesystem::path(out_dir)
                                  : std::filesystem::path(out_dir) / sc.name;
        dtue::write_reports(res, dir, trace);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << sc.name << ": solver=" << sc.solver
                  << " zeta=" << static_cast<double>(res.report.zeta)
                  << " srg=" << res.report.srg
                  << " termination=" << res.report.termination
                  << " certificate=" << (res.report.certificate.pass ? "pass" : "fail")
                  << " -> " << dir.string() << "\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << sc.name << ": error: " << e.what() << "\n";
        ++failures;
      }
    }
  };

  int n = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return failures == 0 ? 0 : 1;
}

int oracle_command(const std::string& file, std::uint64_t max_distributions,
                   const std::string& out_dir) {
  dtue::Scenario sc = dtue::load_scenario(file);
  dtue::Network net = dtue::load_network(sc.network_path);
  if (sc.demand_scale != 1.0) net = dtue::scale_demand(net, sc.demand_scale);
  dtue::Evaluator ev(net, sc.weights);
  dtue::OracleResult res = dtue::brute_force_oracle(ev, max_distributions);
  std::cout << "enumerated=" << res.enumerated
            << " min_zeta=" << static_cast<double>(res.min_zeta)
            << " minimizers=" << res.minimizers.size() << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (size_t i = 0; i < res.minimizers.size(); ++i) {
      std::ofstream out(std::filesystem::path(out_dir) /
                        ("minimizer_" + std::to_string(i) + ".csv"));
      dtue::write_flow_csv(out, net, res.minimizers[i]);
    }
    std::cout << "wrote " << res.minimizers.size() << " minimizer file(s) to "
              << out_dir << "\n";
  }
  return 0;
}

int certify_command(const std::string& file, const std::string& q_path) {
  dtue::Scenario sc = dtue::load_scenario(file);
  dtue::Network net = dtue::load_network(sc.network_path);
  if (sc.demand_scale != 1.0) net = dtue::scale_demand(net, sc.demand_scale);
  dtue::Evaluator ev(net, sc.weights);
  std::ifstream in(q_path);
  if (!in) throw dtue::InputError("cannot open Q file '" + q_path + "'");
  dtue::FlowDistribution q = dtue::read_flow_csv(in, net);
  dtue::CertificateResult cert = dtue::single_user_swap_certificate(ev, q);
  if (cert.pass) {
    std::cout << "certificate: pass (zeta=" << static_cast<double>(cert.zeta_before)
              << ")\n";
    return 0;
  }
  const dtue::Route& from_route = net.routes[cert.from.route];
  const dtue::Route& to_route = net.routes[cert.to.route];
  std::cout << "certificate: fail\n"
            << "witness: move one user of OD " << net.ods[cert.od].id
            << " from option (" << net.options[cert.from.route][cert.from.option].depart
            << "," << from_route.id << ") to ("
            << net.options[cert.to.route][cert.to.option].depart << ","
            << to_route.id << ")\n"
            << "zeta " << static_cast<double>(cert.zeta_before) << " -> "
            << static_cast<double>(cert.zeta_after) << "\n";
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"schedule-based transit assignment and departure-time "
               "equilibrium toolkit"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run scenario file(s) and emit reports");
  std::vector<std::string> scenario_files;
  RunOverrides ov;
  std::string out_dir = "dtue-out";
  bool trace = false;
  int jobs = 1;
  run->add_option("scenario", scenario_files, "scenario JSON file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--solver", ov.solver, "override solver: adagdd|msa|dtd");
  run->add_option("--initial", ov.initial,
                  "override initial setting: default|uniform|earliest|latest|"
                  "default-earliest");
  run->add_option("--demand-scale", ov.demand_scale, "override demand scale");
  run->add_option("--seed", ov.seed, "override solver seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--trace", trace, "also write the per-iteration trace log");
  run->add_option("--jobs", jobs, "run independent scenarios concurrently")
      ->check(CLI::PositiveNumber);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "brute-force gap minimum (size-gated)");
  std::string oracle_file;
  std::uint64_t max_distributions = 1'000'000;
  std::string oracle_out;
  oracle->add_option("scenario", oracle_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  oracle->add_option("--max-distributions", max_distributions,
                     "enumeration size gate");
  oracle->add_option("--out", oracle_out, "write minimizer CSVs here");

  // certify
  auto* certify =
      app.add_subcommand("certify", "single-user-swap equilibrium certificate");
  std::string certify_file, certify_q;
  certify->add_option("scenario", certify_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  certify->add_option("q_file", certify_q, "flow distribution CSV")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(scenario_files, ov, out_dir, trace, jobs);
    if (oracle->parsed())
      return oracle_command(oracle_file, max_distributions, oracle_out);
    if (certify->parsed()) return certify_command(certify_file, certify_q);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
