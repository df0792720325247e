#include "dtue/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dtue {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw InputError(msg); }

std::string od_id_of(const std::string& origin, const std::string& dest) {
  return origin + "-" + dest;
}

} // namespace

StationIdx Network::station_of(const std::string& id) const {
  auto it = station_index_.find(id);
  if (it == station_index_.end()) fail("unknown station '" + id + "'");
  return it->second;
}

LineIdx Network::line_of(const std::string& id) const {
  auto it = line_index_.find(id);
  if (it == line_index_.end()) fail("unknown line '" + id + "'");
  return it->second;
}

OdIdx Network::od_of(const std::string& id) const {
  auto it = od_index_.find(id);
  if (it == od_index_.end()) fail("unknown OD pair '" + id + "'");
  return it->second;
}

RouteIdx Network::route_of(OdIdx od, const std::string& route_id) const {
  for (RouteIdx r : ods[od].routes)
    if (routes[r].id == route_id) return r;
  fail("OD pair '" + ods[od].id + "' has no route '" + route_id + "'");
}

OptionIdx Network::option_at(RouteIdx r, Sec depart) const {
  const auto& opts = options[r];
  auto it = std::lower_bound(opts.begin(), opts.end(), depart,
                             [](const Option& o, Sec t) { return o.depart < t; });
  if (it == opts.end() || it->depart != depart) return kInvalidIdx;
  return static_cast<OptionIdx>(it - opts.begin());
}

Count Network::total_demand() const {
  Count total = 0;
  for (const auto& od : ods) total += od.demand;
  return total;
}

std::vector<TrainRun> build_timetable(const Line& line, LineIdx line_idx,
                                      RunIdx first_run_idx) {
  const int n = static_cast<int>(line.stations.size());
  if (n < 2) fail("line '" + line.id + "' needs at least 2 stations");
  if (line.headway < 1) fail("line '" + line.id + "' headway must be >= 1 s");
  if (line.capacity < 1) fail("line '" + line.id + "' capacity must be >= 1");
  if (line.run_count < 1) fail("line '" + line.id + "' run_count must be >= 1");
  if (static_cast<int>(line.segment_times.size()) != n - 1)
    fail("line '" + line.id + "' needs one segment time per station pair");
  if (!line.dwell_times.empty() &&
      static_cast<int>(line.dwell_times.size()) != n)
    fail("line '" + line.id + "' needs one dwell time per station");
  for (Sec s : line.segment_times)
    if (s < 1) fail("line '" + line.id + "' segment times must be >= 1 s");
  for (Sec d : line.dwell_times)
    if (d < 0) fail("line '" + line.id + "' dwell times must be >= 0");

  std::vector<TrainRun> out;
  out.reserve(line.run_count);
  for (int j = 0; j < line.run_count; ++j) {
    TrainRun run;
    run.idx = first_run_idx + j;
    run.line = line_idx;
    run.run_index = j;
    run.arrival.resize(n);
    run.departure.resize(n);
    Sec dep = line.first_departure + static_cast<Sec>(j) * line.headway;
    run.arrival[0] = dep;
    run.departure[0] = dep;
    for (int i = 1; i < n; ++i) {
      run.arrival[i] = run.departure[i - 1] + line.segment_times[i - 1];
      Sec dwell = line.dwell_times.empty() ? 0 : line.dwell_times[i];
      run.departure[i] = run.arrival[i] + dwell;
    }
    out.push_back(std::move(run));
  }
  // Uniform headway already spaces runs apart; this guards edited timetables.
  for (size_t j = 1; j < out.size(); ++j)
    for (int i = 0; i < n; ++i)
      if (out[j].departure[i] <= out[j - 1].departure[i])
        fail("line '" + line.id + "' has overlapping run times (schedule inconsistent)");
  return out;
}

std::vector<TransferConnection>
derive_transfer_connections(const std::vector<Line>& lines,
                            const std::vector<TrainRun>& runs,
                            const std::vector<std::vector<RunIdx>>& line_runs,
                            const std::vector<Route>& routes) {
  std::vector<TransferConnection> out;
  for (size_t ri = 0; ri < routes.size(); ++ri) {
    const Route& route = routes[ri];
    for (size_t leg = 0; leg + 1 < route.legs.size(); ++leg) {
      const RouteLeg& in = route.legs[leg];
      const RouteLeg& next = route.legs[leg + 1];
      for (RunIdx arr_run : line_runs[in.line]) {
        Sec arrive = runs[arr_run].arrival[in.alight_pos];
        // Earliest next-leg run departing at or after arrival; boarding a
        // run that departs exactly at the arrival second is allowed.
        const auto& cand = line_runs[next.line];
        auto it = std::lower_bound(
            cand.begin(), cand.end(), arrive, [&](RunIdx r, Sec t) {
              return runs[r].departure[next.board_pos] < t;
            });
        if (it == cand.end()) continue; // stranded: no later run
        out.push_back(TransferConnection{in.alight, static_cast<RouteIdx>(ri),
                                         static_cast<int>(leg), arr_run, *it});
      }
    }
  }
  return out;
}

Sec in_vehicle_time(const Network& net, RouteIdx route, OptionIdx opt) {
  const Route& r = net.routes[route];
  const Option& o = net.options[route][opt];
  Sec total = 0;
  RunIdx run = o.run;
  for (size_t leg = 0; leg < r.legs.size(); ++leg) {
    const RouteLeg& l = r.legs[leg];
    total += net.runs[run].arrival[l.alight_pos] - net.runs[run].departure[l.board_pos];
    if (leg + 1 == r.legs.size()) break;
    const RouteLeg& next = r.legs[leg + 1];
    Sec arrive = net.runs[run].arrival[l.alight_pos];
    const auto& cand = net.line_runs[next.line];
    auto it = std::lower_bound(cand.begin(), cand.end(), arrive,
                               [&](RunIdx cr, Sec t) {
                                 return net.runs[cr].departure[next.board_pos] < t;
                               });
    if (it == cand.end())
      fail("route '" + net.ods[r.od].id + "/" + r.id +
           "' has no path from option " + std::to_string(o.depart) +
           ": no connecting run at station '" + net.stations[l.alight].id + "'");
    run = *it;
  }
  return total;
}

Network compile_network(const NetworkDef& def) {
  Network net;
  net.name = def.name;

  for (const auto& sid : def.stations) {
    if (net.station_index_.count(sid))
      fail("duplicate station id '" + sid + "'");
    net.station_index_[sid] = static_cast<StationIdx>(net.stations.size());
    net.stations.push_back(Station{sid, {}, false, false, false, false});
  }

  RunIdx next_run = 0;
  for (const auto& ld : def.lines) {
    if (net.line_index_.count(ld.id)) fail("duplicate line id '" + ld.id + "'");
    Line line;
    line.id = ld.id;
    std::set<std::string> seen;
    for (const auto& sid : ld.stations) {
      if (!seen.insert(sid).second)
        fail("line '" + ld.id + "' repeats station '" + sid + "'");
      line.stations.push_back(net.station_of(sid));
    }
    line.headway = ld.headway;
    line.first_departure = ld.first_departure;
    line.run_count = ld.run_count;
    line.capacity = ld.capacity;
    line.segment_times = ld.segment_times;
    line.dwell_times = ld.dwell_times;

    LineIdx li = static_cast<LineIdx>(net.lines.size());
    auto runs = build_timetable(line, li, next_run);
    net.line_runs.emplace_back();
    for (auto& r : runs) {
      net.line_runs.back().push_back(r.idx);
      net.runs.push_back(std::move(r));
    }
    next_run += line.run_count;
    for (StationIdx s : line.stations) net.stations[s].lines.push_back(li);
    net.line_index_[ld.id] = li;
    net.lines.push_back(std::move(line));
  }

  for (const auto& od : def.od_demand) {
    std::string id = od_id_of(od.origin, od.destination);
    if (net.od_index_.count(id)) fail("duplicate OD pair '" + id + "'");
    if (od.demand < 0) fail("OD pair '" + id + "' has negative demand");
    OdDemand d;
    d.id = id;
    d.origin = net.station_of(od.origin);
    d.destination = net.station_of(od.destination);
    d.demand = od.demand;
    d.preferred_departure = od.preferred_departure;
    d.desired_arrival = od.desired_arrival;
    net.od_index_[id] = static_cast<OdIdx>(net.ods.size());
    net.ods.push_back(std::move(d));
  }

  for (const auto& rd : def.routes) {
    OdIdx od = net.od_of(rd.od);
    Route route;
    route.od = od;
    route.id = rd.id.empty()
                   ? "r" + std::to_string(net.ods[od].routes.size())
                   : rd.id;
    for (RouteIdx other : net.ods[od].routes)
      if (net.routes[other].id == route.id)
        fail("OD pair '" + rd.od + "' has duplicate route id '" + route.id + "'");
    if (rd.legs.empty()) fail("route '" + rd.od + "/" + route.id + "' has no legs");

    for (const auto& leg : rd.legs) {
      RouteLeg rl;
      rl.line = net.line_of(leg.line);
      rl.board = net.station_of(leg.board);
      rl.alight = net.station_of(leg.alight);
      rl.board_pos = net.lines[rl.line].position_of(rl.board);
      rl.alight_pos = net.lines[rl.line].position_of(rl.alight);
      if (rl.board_pos < 0 || rl.alight_pos < 0 || rl.board_pos >= rl.alight_pos)
        fail("invalid route '" + rd.od + "/" + route.id + "': line '" + leg.line +
             "' does not serve '" + leg.board + "' before '" + leg.alight + "'");
      route.legs.push_back(rl);
    }
    if (route.legs.front().board != net.ods[od].origin)
      fail("route '" + rd.od + "/" + route.id + "' must board at the OD origin");
    if (route.legs.back().alight != net.ods[od].destination)
      fail("route '" + rd.od + "/" + route.id + "' must alight at the OD destination");
    for (size_t i = 0; i + 1 < route.legs.size(); ++i) {
      if (route.legs[i].alight != route.legs[i + 1].board)
        fail("route '" + rd.od + "/" + route.id +
             "' legs must share the alight/board station");
      net.stations[route.legs[i].alight].is_transfer = true;
    }

    RouteIdx ri = static_cast<RouteIdx>(net.routes.size());
    net.ods[od].routes.push_back(ri);
    net.routes.push_back(std::move(route));
  }

  for (const auto& od : net.ods)
    if (od.routes.empty()) fail("OD pair '" + od.id + "' has an empty route set");

  // One departure-time option per run of the first leg at the origin.
  net.options.resize(net.routes.size());
  for (size_t ri = 0; ri < net.routes.size(); ++ri) {
    const RouteLeg& first = net.routes[ri].legs.front();
    for (RunIdx run : net.line_runs[first.line])
      net.options[ri].push_back(
          Option{net.runs[run].departure[first.board_pos], run});
    net.routes[ri].in_vehicle = in_vehicle_time(net, static_cast<RouteIdx>(ri), 0);
  }

  net.od_options.resize(net.ods.size());
  for (size_t k = 0; k < net.ods.size(); ++k) {
    auto& flat = net.od_options[k];
    for (RouteIdx r : net.ods[k].routes)
      for (OptionIdx o = 0; o < static_cast<OptionIdx>(net.options[r].size()); ++o)
        flat.push_back(OptionRef{r, o});
    std::sort(flat.begin(), flat.end(), [&](const OptionRef& a, const OptionRef& b) {
      Sec ta = net.options[a.route][a.option].depart;
      Sec tb = net.options[b.route][b.option].depart;
      if (ta != tb) return ta < tb;
      return net.routes[a.route].id < net.routes[b.route].id;
    });
  }

  for (const auto& od : net.ods) {
    net.stations[od.origin].is_origin = true;
    net.stations[od.destination].is_destination = true;
  }
  for (auto& s : net.stations)
    s.is_intermediate = !s.lines.empty() && !s.is_origin && !s.is_destination &&
                        !s.is_transfer;

  net.connections = derive_transfer_connections(net.lines, net.runs,
                                                net.line_runs, net.routes);

  for (const auto& run : net.runs) {
    const int n = static_cast<int>(net.lines[run.line].stations.size());
    for (int pos = 0; pos < n; ++pos) {
      net.schedule_events.push_back(ScheduleEvent{run.arrival[pos], 0, run.idx, pos});
      if (pos + 1 < n) // runs terminate at their last station
        net.schedule_events.push_back(ScheduleEvent{run.departure[pos], 1, run.idx, pos});
    }
  }
  std::sort(net.schedule_events.begin(), net.schedule_events.end(),
            [](const ScheduleEvent& a, const ScheduleEvent& b) {
              if (a.time != b.time) return a.time < b.time;
              if (a.kind != b.kind) return a.kind < b.kind;
              if (a.run != b.run) return a.run < b.run;
              return a.pos < b.pos;
            });

  net.validate();
  return net;
}

void Network::validate() const {
  std::set<std::string> station_ids;
  for (const auto& s : stations)
    if (!station_ids.insert(s.id).second)
      fail("duplicate station id '" + s.id + "'");

  for (const auto& s : stations)
    if (s.is_transfer && s.lines.size() < 2)
      fail("transfer station '" + s.id + "' appears on fewer than 2 lines");

  for (size_t li = 0; li < lines.size(); ++li) {
    const Line& line = lines[li];
    if (line.stations.size() < 2 || line.headway < 1 || line.capacity < 1)
      fail("line '" + line.id + "' violates its invariants");
    for (RunIdx r : line_runs[li]) {
      const TrainRun& run = runs[r];
      for (size_t i = 0; i < line.stations.size(); ++i) {
        if (run.departure[i] < run.arrival[i])
          fail("run departs before it arrives on line '" + line.id + "'");
        if (i > 0 && run.arrival[i] <= run.departure[i - 1])
          fail("run times do not increase along line '" + line.id + "'");
      }
      if (run.run_index > 0) {
        const TrainRun& prev = runs[line_runs[li][run.run_index - 1]];
        for (size_t i = 0; i < line.stations.size(); ++i)
          if (run.departure[i] - prev.departure[i] != line.headway)
            fail("consecutive runs on line '" + line.id +
                 "' are not separated by the headway");
      }
    }
  }

  for (size_t ri = 0; ri < routes.size(); ++ri) {
    const auto& opts = options[ri];
    if (opts.empty()) fail("route has an empty option set");
    for (size_t i = 1; i < opts.size(); ++i)
      if (opts[i].depart <= opts[i - 1].depart)
        fail("options are not strictly increasing in time");
    if (static_cast<int>(opts.size()) != lines[routes[ri].legs.front().line].run_count)
      fail("option set size does not match the first leg's run count");
  }
}

Network scale_demand(const Network& net, double factor) {
  if (!(factor > 0.0)) fail("demand scale factor must be > 0");
  Network out = net;
  for (auto& od : out.ods)
    od.demand = static_cast<Count>(std::llround(factor * static_cast<double>(od.demand)));
  return out;
}

} // namespace dtue
