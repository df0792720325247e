#include <doctest.h>

#include <sstream>

#include "dtue/network.hpp"
#include "dtue/network_io.hpp"
#include "support.hpp"

using namespace dtue;

TEST_CASE("timetable expansion: headway and run count") {
  auto def = test::single_line_def(/*run_count=*/100, /*capacity=*/230,
                                   /*demand=*/0, /*headway=*/300,
                                   /*first_departure=*/18000);
  Network net = compile_network(def);
  REQUIRE(net.runs.size() == 100);
  CHECK(net.runs[0].departure[0] == 18000);
  CHECK(net.runs[1].departure[0] == 18300);
  CHECK(net.runs[99].departure[0] == 18000 + 99 * 300);

  SUBCASE("run-count one gives a single run with cumulative travel times") {
    auto one = test::single_line_def(1, 230, 0, 300, 18000, 750);
    Network n1 = compile_network(one);
    REQUIRE(n1.runs.size() == 1);
    CHECK(n1.runs[0].departure[0] == 18000);
    CHECK(n1.runs[0].arrival[1] == 18750);
  }

  SUBCASE("dwell times push later departures") {
    auto d = test::single_line_def(2, 10, 0);
    d.lines[0].stations = {"A", "B"};
    d.lines[0].dwell_times = {0, 45};
    Network n2 = compile_network(d);
    CHECK(n2.runs[0].arrival[1] == 18600);
    CHECK(n2.runs[0].departure[1] == 18645);
  }
}

TEST_CASE("timetable rejects inconsistent schedules") {
  auto def = test::single_line_def(5, 10, 0);
  SUBCASE("zero headway") {
    def.lines[0].headway = 0;
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
  SUBCASE("zero capacity") {
    def.lines[0].capacity = 0;
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
  SUBCASE("repeated station") {
    def.lines[0].stations = {"A", "A"};
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
  SUBCASE("missing segment time") {
    def.lines[0].segment_times.clear();
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
}

TEST_CASE("option sets: one option per run, strictly increasing") {
  auto def = test::single_line_def(12, 50, 30);
  Network net = compile_network(def);
  REQUIRE(net.options.size() == 1);
  CHECK(net.options[0].size() == 12);
  for (size_t i = 1; i < net.options[0].size(); ++i) {
    CHECK(net.options[0][i].depart > net.options[0][i - 1].depart);
    CHECK(net.options[0][i].run != net.options[0][i - 1].run);
  }
}

TEST_CASE("transfer connections mark the earliest feasible run") {
  // Arriving at J at 30000; connecting line departs J at 29900, 30000, 30300.
  NetworkDef def;
  def.stations = {"A", "J", "B"};
  def.lines.push_back(test::make_line("in", {"A", "J"}, 600, 29400, 1, 10, 600));
  def.lines.push_back(test::make_line("out", {"J", "B"}, 300, 29900, 3, 10, 600));
  def.od_demand.push_back({"A", "B", 1, 29400, 32400});
  def.routes.push_back(test::make_route("A-B", {{"in", "A", "J"}, {"out", "J", "B"}}));
  Network net = compile_network(def);

  REQUIRE(net.connections.size() == 1);
  const TransferConnection& c = net.connections[0];
  CHECK(net.runs[c.arriving].arrival[1] == 30000);
  // boarding a run departing exactly at the arrival second is allowed
  CHECK(net.runs[c.departing].departure[0] == 30000);

  SUBCASE("no later run leaves no connection") {
    def.lines[1].run_count = 1; // only the 29900 departure remains
    Network n2 = compile_network(def);
    CHECK(n2.connections.empty());
  }
}

TEST_CASE("transfer connection minimality on random networks") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    Network net = test::random_network(rng);
    for (const TransferConnection& c : net.connections) {
      const Route& route = net.routes[c.route];
      const RouteLeg& next = route.legs[c.leg + 1];
      Sec arrive = net.runs[c.arriving].arrival[route.legs[c.leg].alight_pos];
      Sec chosen = net.runs[c.departing].departure[next.board_pos];
      CHECK(chosen >= arrive);
      // no unmarked run of the next line departs in [arrival, chosen)
      for (RunIdx r : net.line_runs[next.line]) {
        Sec dep = net.runs[r].departure[next.board_pos];
        CHECK(!(dep >= arrive && dep < chosen));
      }
    }
  }
}

TEST_CASE("invalid routes are rejected") {
  auto def = test::single_line_def(3, 10, 5);
  SUBCASE("line does not serve the stations in order") {
    def.routes[0].legs = {{"L", "B", "A"}};
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
  SUBCASE("legs must chain at a shared station") {
    def.stations = {"A", "B", "C"};
    def.lines.push_back(test::make_line("M", {"B", "C"}, 300, 18000, 3, 10, 600));
    def.routes[0].legs = {{"L", "A", "B"}, {"M", "C", "C"}};
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
  SUBCASE("route must start at the OD origin") {
    def.stations = {"A", "B", "C"};
    def.lines[0].stations = {"A", "B", "C"};
    def.lines[0].segment_times = {600, 600};
    def.routes[0].legs = {{"L", "B", "C"}};
    CHECK_THROWS_AS(compile_network(def), InputError);
  }
}

TEST_CASE("in-vehicle time sums on-board durations only") {
  NetworkDef def;
  def.stations = {"A", "J", "B"};
  def.lines.push_back(test::make_line("in", {"A", "J"}, 300, 18000, 4, 10, 600));
  // 200 s scheduled slack at J for the first feasible connection
  def.lines.push_back(test::make_line("out", {"J", "B"}, 300, 18800, 6, 10, 900));
  def.od_demand.push_back({"A", "B", 1, 18000, 32400});
  def.routes.push_back(test::make_route("A-B", {{"in", "A", "J"}, {"out", "J", "B"}}));
  Network net = compile_network(def);

  CHECK(in_vehicle_time(net, 0, 0) == 600 + 900);
  CHECK(net.routes[0].in_vehicle == 1500);

  SUBCASE("single-leg route is the schedule difference") {
    auto s = test::single_line_def(4, 10, 0, 300, 18000, 1200);
    Network sn = compile_network(s);
    CHECK(in_vehicle_time(sn, 0, 0) == 1200);
  }

  SUBCASE("identical across options, equals free-flow traversal minus waits") {
    for (OptionIdx o = 0; o < 4; ++o) {
      CHECK(in_vehicle_time(net, 0, o) == 1500);
      ProbeResult probe = free_flow_probe(net, 0, o);
      REQUIRE(!probe.stranded);
      Sec depart = net.options[0][o].depart;
      CHECK(probe.arrival - depart - probe.wait == 1500);
    }
  }
}

TEST_CASE("network validation is idempotent and survives a round trip") {
  Network net = compile_network(test::interaction_def());
  CHECK_NOTHROW(net.validate());
  CHECK_NOTHROW(net.validate());

  std::stringstream buf;
  write_network_json(buf, net);
  Network again = compile_network(read_network_json(buf, "round-trip"));
  CHECK(again.stations.size() == net.stations.size());
  CHECK(again.runs.size() == net.runs.size());
  CHECK(again.connections.size() == net.connections.size());
  for (size_t r = 0; r < net.runs.size(); ++r) {
    CHECK(again.runs[r].arrival == net.runs[r].arrival);
    CHECK(again.runs[r].departure == net.runs[r].departure);
  }
}

TEST_CASE("station kinds derive from usage") {
  Network net = compile_network(test::interaction_def());
  CHECK(net.stations[net.station_of("A")].is_origin);
  CHECK(net.stations[net.station_of("J")].is_transfer);
  CHECK(net.stations[net.station_of("J")].lines.size() >= 2);
  CHECK(net.stations[net.station_of("B")].is_destination);
}

TEST_CASE("demand scaling rounds per OD") {
  auto def = test::single_line_def(3, 10, 5356);
  Network net = compile_network(def);
  CHECK(scale_demand(net, 1.0).ods[0].demand == 5356);
  CHECK(scale_demand(net, 1.65).ods[0].demand == 8837);
  auto def2 = test::single_line_def(3, 10, 14967);
  Network net2 = compile_network(def2);
  CHECK(scale_demand(net2, 0.6).ods[0].demand == 8980);
  CHECK_THROWS_AS(scale_demand(net, 0.0), InputError);
}
