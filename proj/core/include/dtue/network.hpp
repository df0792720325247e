#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtue/types.hpp"

namespace dtue {

struct Station {
  std::string id;
  std::vector<LineIdx> lines; // lines whose sequence contains this station
  bool is_origin = false;
  bool is_destination = false;
  bool is_transfer = false;
  bool is_intermediate = false;
};

// A service line with evenly spaced train runs.
struct Line {
  std::string id;
  std::vector<StationIdx> stations; // ordered, >= 2, no repeats
  Sec headway = 0;                  // >= 1
  Sec first_departure = 0;          // departure of run 0 at stations[0]
  int run_count = 0;                // >= 1
  Count capacity = 0;               // users per train, >= 1
  std::vector<Sec> segment_times;   // per consecutive pair, each >= 1
  std::vector<Sec> dwell_times;     // per station, each >= 0

  int position_of(StationIdx s) const {
    for (int i = 0; i < static_cast<int>(stations.size()); ++i)
      if (stations[i] == s) return i;
    return -1;
  }
};

struct TrainRun {
  RunIdx idx = kInvalidIdx;
  LineIdx line = kInvalidIdx;
  int run_index = 0;          // position within the line's timetable
  std::vector<Sec> arrival;   // per station position on the line
  std::vector<Sec> departure; // departure[i] >= arrival[i]
};

struct RouteLeg {
  LineIdx line = kInvalidIdx;
  StationIdx board = kInvalidIdx;
  StationIdx alight = kInvalidIdx;
  int board_pos = -1;  // station positions on the leg's line
  int alight_pos = -1;
};

struct Route {
  std::string id; // unique within its OD pair
  OdIdx od = kInvalidIdx;
  std::vector<RouteLeg> legs;
  Sec in_vehicle = 0; // sum of on-board durations, constant across options
};

struct OdDemand {
  std::string id; // "<origin>-<destination>"
  StationIdx origin = kInvalidIdx;
  StationIdx destination = kInvalidIdx;
  Count demand = 0;
  Sec preferred_departure = 0;
  Sec desired_arrival = 0; // t*
  std::vector<RouteIdx> routes;
};

// A departure-time option: one per train run of the route's first leg.
struct Option {
  Sec depart = 0; // run departure at the board station of leg 0
  RunIdx run = kInvalidIdx;
};

// Reference to an option in an OD's flattened option list.
struct OptionRef {
  RouteIdx route = kInvalidIdx;
  OptionIdx option = kInvalidIdx;
};

// One run touching one station, in global processing order: nondecreasing
// time, arrivals before departures within a second.
struct ScheduleEvent {
  Sec time = 0;
  std::uint8_t kind = 0; // 0 arrival, 1 departure
  RunIdx run = kInvalidIdx;
  int pos = 0; // station position on the run's line
};

// The earliest feasible next-leg run for a given arriving run at a transfer.
struct TransferConnection {
  StationIdx station = kInvalidIdx;
  RouteIdx route = kInvalidIdx;
  int leg = 0;                    // index of the arriving leg within the route
  RunIdx arriving = kInvalidIdx;  // run of legs[leg]'s line
  RunIdx departing = kInvalidIdx; // earliest run of legs[leg+1]'s line
};

// Plain description used to assemble a network; mirrors the JSON schema.
struct NetworkDef {
  struct LineDef {
    std::string id;
    std::vector<std::string> stations;
    Sec headway = 0;
    Sec first_departure = 0;
    int run_count = 0;
    Count capacity = 0;
    std::vector<Sec> segment_times;
    std::vector<Sec> dwell_times; // empty -> all zero
  };
  struct LegDef {
    std::string line, board, alight;
  };
  struct RouteDef {
    std::string od; // "<origin>-<destination>"
    std::string id; // empty -> assigned "r<n>" per OD
    std::vector<LegDef> legs;
  };
  struct OdDef {
    std::string origin, destination;
    Count demand = 0;
    Sec preferred_departure = 0;
    Sec desired_arrival = 0;
  };

  std::string name;
  std::vector<std::string> stations;
  std::vector<LineDef> lines;
  std::vector<OdDef> od_demand;
  std::vector<RouteDef> routes;
};

class Network {
public:
  std::string name;
  std::vector<Station> stations;
  std::vector<Line> lines;
  std::vector<TrainRun> runs;
  std::vector<std::vector<RunIdx>> line_runs; // per line, by run_index
  std::vector<OdDemand> ods;
  std::vector<Route> routes;                   // global, grouped by OD
  std::vector<std::vector<Option>> options;    // per global route
  std::vector<std::vector<OptionRef>> od_options; // per OD, sorted by (depart, route id)
  std::vector<TransferConnection> connections;
  std::vector<ScheduleEvent> schedule_events; // sorted into processing order

  StationIdx station_of(const std::string& id) const;
  LineIdx line_of(const std::string& id) const;
  OdIdx od_of(const std::string& id) const;
  RouteIdx route_of(OdIdx od, const std::string& route_id) const;

  // Option lookup by exact departure second; kInvalidIdx when absent.
  OptionIdx option_at(RouteIdx r, Sec depart) const;

  Count total_demand() const;

  // Re-checks every structural invariant; throws InputError on violation.
  // Idempotent: a network that validates once validates unchanged forever.
  void validate() const;

private:
  friend Network compile_network(const NetworkDef&);
  std::unordered_map<std::string, StationIdx> station_index_;
  std::unordered_map<std::string, LineIdx> line_index_;
  std::unordered_map<std::string, OdIdx> od_index_;
};

// Expands a line description into explicit runs. Run j departs the first
// station at first_departure + j * headway; later stations follow segment
// travel plus dwell times. Throws InputError on inconsistent schedules.
std::vector<TrainRun> build_timetable(const Line& line, LineIdx line_idx,
                                      RunIdx first_run_idx);

// Marks, for every (arriving run, transfer station, route leg), the earliest
// next-leg run departing at or after the arrival. Runs with no feasible
// successor produce no connection (users transferring there strand).
std::vector<TransferConnection>
derive_transfer_connections(const std::vector<Line>& lines,
                            const std::vector<TrainRun>& runs,
                            const std::vector<std::vector<RunIdx>>& line_runs,
                            const std::vector<Route>& routes);

// Scheduled on-board seconds of the route when starting on option `opt`,
// platform waits excluded. Throws InputError when the traversal strands.
Sec in_vehicle_time(const Network& net, RouteIdx route, OptionIdx opt);

// Validates the description, builds the timetable, derives options and
// transfer connections, and classifies stations.
Network compile_network(const NetworkDef& def);

// Returns a copy with every OD demand scaled to round(factor * demand).
Network scale_demand(const Network& net, double factor);

} // namespace dtue
