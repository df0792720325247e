#pragma once

// Shared builders for small test networks.

#include <random>
#include <string>
#include <vector>

#include "dtue/costs.hpp"
#include "dtue/network.hpp"

namespace dtue::test {

inline NetworkDef::LineDef make_line(std::string id,
                                     std::vector<std::string> stations,
                                     Sec headway, Sec first_departure,
                                     int run_count, Count capacity,
                                     Sec segment_time) {
  NetworkDef::LineDef line;
  line.id = std::move(id);
  line.stations = std::move(stations);
  line.headway = headway;
  line.first_departure = first_departure;
  line.run_count = run_count;
  line.capacity = capacity;
  line.segment_times.assign(line.stations.size() - 1, segment_time);
  return line;
}

inline NetworkDef::RouteDef make_route(std::string od,
                                       std::vector<NetworkDef::LegDef> legs) {
  NetworkDef::RouteDef route;
  route.od = std::move(od);
  route.legs = std::move(legs);
  return route;
}

// One line A -> B, one OD riding it end to end.
inline NetworkDef single_line_def(int run_count, Count capacity, Count demand,
                                  Sec headway = 300, Sec first_departure = 18000,
                                  Sec segment_time = 600) {
  NetworkDef def;
  def.name = "single-line";
  def.stations = {"A", "B"};
  def.lines.push_back(make_line("L", {"A", "B"}, headway, first_departure,
                                run_count, capacity, segment_time));
  def.od_demand.push_back({"A", "B", demand, first_departure, 32400});
  def.routes.push_back(make_route("A-B", {{"L", "A", "B"}}));
  return def;
}

// The two-OD interaction fixture: OD1 rides line L1 from its origin through
// the junction J; OD2 feeds into J on line L2 and competes for L1's residual
// capacity. Five L1 runs, two L2 runs, capacity 100 on L1.
//
//   A --L1--> J --L1--> B      (OD1: A-B, 5 options)
//   C --L2--> J                (OD2: C-B via transfer at J, 2 options)
//
// L2 run 0 reaches J exactly when L1 run 0 departs it (same-second catch);
// L2 run 1 reaches J exactly when L1 run 4 departs it.
inline NetworkDef interaction_def() {
  NetworkDef def;
  def.name = "interaction";
  def.stations = {"A", "J", "B", "C"};
  def.lines.push_back(make_line("L1", {"A", "J", "B"}, 300, 18000, 5, 100, 600));
  def.lines.push_back(make_line("L2", {"C", "J"}, 1200, 18000, 2, 200, 600));
  def.od_demand.push_back({"A", "B", 280, 18000, 32400});
  def.od_demand.push_back({"C", "B", 200, 18000, 32400});
  def.routes.push_back(make_route("A-B", {{"L1", "A", "B"}}));
  def.routes.push_back(make_route("C-B", {{"L2", "C", "J"}, {"L1", "J", "B"}}));
  return def;
}

// Deterministic generator for small random networks: 1-4 lines over a shared
// station pool, routes built by walking lines through shared stations.
struct RandomNetworkParams {
  int max_lines = 4;
  int max_ods = 6;
  Count max_demand = 500;
};

inline Network random_network(std::mt19937_64& rng,
                              const RandomNetworkParams& params = {}) {
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  while (true) {
    NetworkDef def;
    def.name = "random";
    int num_lines = pick(1, params.max_lines);
    int pool = pick(num_lines + 1, 3 * num_lines + 2);
    for (int s = 0; s < pool; ++s) def.stations.push_back("s" + std::to_string(s));

    for (int l = 0; l < num_lines; ++l) {
      int len = pick(2, std::min(5, pool));
      // sample distinct stations
      std::vector<int> ids(pool);
      for (int i = 0; i < pool; ++i) ids[i] = i;
      for (int i = 0; i < len; ++i)
        std::swap(ids[i], ids[pick(i, pool - 1)]);
      std::vector<std::string> stations;
      for (int i = 0; i < len; ++i)
        stations.push_back("s" + std::to_string(ids[i]));
      auto line = make_line("L" + std::to_string(l), std::move(stations),
                            60 * pick(2, 10), 18000 + 60 * pick(0, 10),
                            pick(5, 15), pick(5, 80), 60 * pick(1, 10));
      if (pick(0, 1)) line.dwell_times.assign(line.stations.size(), 30);
      def.lines.push_back(std::move(line));
    }

    // Build routes by walking lines; retry a few times per OD.
    int num_ods = pick(1, params.max_ods);
    int made = 0;
    for (int attempt = 0; attempt < 60 && made < num_ods; ++attempt) {
      int l0 = pick(0, num_lines - 1);
      const auto& st0 = def.lines[l0].stations;
      int b0 = pick(0, static_cast<int>(st0.size()) - 2);
      int a0 = pick(b0 + 1, static_cast<int>(st0.size()) - 1);
      std::vector<NetworkDef::LegDef> legs{{def.lines[l0].id, st0[b0], st0[a0]}};
      int hops = pick(0, 2);
      for (int h = 0; h < hops; ++h) {
        const std::string& at = legs.back().alight;
        int l1 = pick(0, num_lines - 1);
        if (def.lines[l1].id == legs.back().line) continue;
        const auto& st1 = def.lines[l1].stations;
        int pos = -1;
        for (int i = 0; i + 1 < static_cast<int>(st1.size()); ++i)
          if (st1[i] == at) pos = i;
        if (pos < 0) continue;
        int a1 = pick(pos + 1, static_cast<int>(st1.size()) - 1);
        legs.push_back({def.lines[l1].id, at, st1[a1]});
      }
      std::string origin = legs.front().board;
      std::string dest = legs.back().alight;
      if (origin == dest) continue;
      std::string od_id = origin + "-" + dest;
      bool dup = false;
      for (const auto& od : def.od_demand)
        if (od.origin + "-" + od.destination == od_id) dup = true;
      if (dup) continue;
      Count demand = pick(0, static_cast<int>(params.max_demand));
      Sec pref = def.lines[0].first_departure;
      def.od_demand.push_back({origin, dest, demand, pref, 21600 + 60 * pick(0, 120)});
      def.routes.push_back(make_route(od_id, std::move(legs)));
      ++made;
    }
    if (made == 0) continue;
    try {
      return compile_network(def);
    } catch (const InputError&) {
      continue; // rejected draw (e.g. repeated station); sample again
    }
  }
}

// Random flow over a network's options, conserving each OD's demand.
inline FlowDistribution random_flow(const Network& net, std::mt19937_64& rng) {
  FlowDistribution q(net);
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    Count left = net.ods[k].demand;
    const auto& opts = net.od_options[k];
    while (left > 0) {
      const OptionRef& ref = opts[rng() % opts.size()];
      Count amount = 1 + static_cast<Count>(rng() % static_cast<std::uint64_t>(left));
      q.at(ref.route, ref.option) += amount;
      left -= amount;
    }
  }
  return q;
}

} // namespace dtue::test
