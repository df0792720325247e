#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "dtue/flow.hpp"
#include "dtue/network.hpp"
#include "dtue/types.hpp"

namespace dtue {

// A contiguous slice of one option's users boarding together. user_begin is
// the 0-based index of the first user within the option's group I_k(t,r).
struct BoardingGroup {
  OdIdx od = kInvalidIdx;
  RouteIdx route = kInvalidIdx;
  OptionIdx option = kInvalidIdx;
  Count user_begin = 0;
  Count count = 0;
  Sec platform_arrival = 0;
};

// Per (run, station) flow accounting.
struct FlowRecord {
  Count waiting = 0;           // g: users present when the run departs
  Count boarded = 0;           // f
  Count denied = 0;            // h = g - f
  Count departing_load = 0;    // z: on board when the run leaves
  Count alighted = 0;          // m
  Count preboard_load = 0;     // y: on board after alighting
  Count residual_capacity = 0; // x = capacity - y
  std::map<OdIdx, Count> waiting_by_od;
  std::map<OdIdx, Count> boarded_by_od;
  std::map<OdIdx, Count> denied_by_od;
  std::map<OdIdx, Count> alighted_by_od;
  std::vector<BoardingGroup> boardings;
};

// A slice of one option's users that reached the destination together.
struct ArrivalGroup {
  OdIdx od = kInvalidIdx;
  RouteIdx route = kInvalidIdx;
  OptionIdx option = kInvalidIdx;
  Count user_begin = 0;
  Count count = 0;
  Sec arrival = 0;  // destination arrival second
  Sec wait = 0;     // total platform waiting = arrival - in_vehicle - t
  RunIdx final_run = kInvalidIdx;
};

// Users left with no feasible run to continue on.
struct StrandedGroup {
  OdIdx od = kInvalidIdx;
  RouteIdx route = kInvalidIdx;
  OptionIdx option = kInvalidIdx;
  Count user_begin = 0;
  Count count = 0;
  StationIdx station = kInvalidIdx;
};

struct LoadingResult {
  // records[run][station position on the run's line]
  std::vector<std::vector<FlowRecord>> records;
  std::vector<ArrivalGroup> arrivals; // sorted by (route, option, user_begin)
  std::vector<StrandedGroup> stranded;
  Count stranded_total = 0;

  // Arrival flows M: per (od, run) arrival counts at the OD's destination.
  std::map<std::pair<OdIdx, RunIdx>, Count> arrival_flows() const;
};

// Event-driven network loading under hard capacity and FCFS. Events are
// processed in nondecreasing time order, arrivals before departures within
// a second. Waiting users with equal platform-arrival seconds are ordered
// by (OD, route, option, user index). Deterministic: identical inputs give
// identical results.
LoadingResult simulate(const Network& net, const FlowDistribution& q);

// Uncongested traversal of a route starting on the given option: transfer
// waits and final arrival assuming infinite capacity everywhere.
struct ProbeResult {
  bool stranded = false;
  Sec wait = 0;
  Sec arrival = 0;
  RunIdx final_run = kInvalidIdx;
};
ProbeResult free_flow_probe(const Network& net, RouteIdx route, OptionIdx opt);

// CSV of (run, station, g, f, h, z, m, x, y) per event.
void write_trace_csv(std::ostream& out, const Network& net,
                     const LoadingResult& result);

} // namespace dtue
