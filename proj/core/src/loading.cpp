#include "dtue/loading.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace dtue {

namespace {

// A waiting slice of one option's users. Queue order is (platform arrival,
// OD, route, option, user index); denied users keep their original arrival
// second and therefore their priority over later arrivals.
struct Waiting {
  Sec arrival = 0;
  OdIdx od = kInvalidIdx;
  RouteIdx route = kInvalidIdx;
  OptionIdx option = kInvalidIdx;
  Count user_begin = 0;
  Count count = 0;
  int leg = 0; // route leg about to be boarded

  auto key() const { return std::tie(arrival, od, route, option, user_begin); }
};

struct OnBoard {
  OdIdx od;
  RouteIdx route;
  OptionIdx option;
  Count user_begin;
  Count count;
  int leg;
};

// Per (station, line) platform: slices sorted by queue key.
class Platform {
public:
  void add(Waiting w) {
    auto it = std::upper_bound(entries_.begin(), entries_.end(), w,
                               [](const Waiting& a, const Waiting& b) {
                                 return a.key() < b.key();
                               });
    entries_.insert(it, std::move(w));
  }

  Count present(Sec now) const {
    Count total = 0;
    for (const auto& w : entries_) {
      if (w.arrival > now) break;
      total += w.count;
    }
    return total;
  }

  std::vector<Waiting>& entries() { return entries_; }
  const std::vector<Waiting>& entries() const { return entries_; }

private:
  std::vector<Waiting> entries_;
};

} // namespace

std::map<std::pair<OdIdx, RunIdx>, Count> LoadingResult::arrival_flows() const {
  std::map<std::pair<OdIdx, RunIdx>, Count> m;
  for (const auto& g : arrivals) m[{g.od, g.final_run}] += g.count;
  return m;
}

LoadingResult simulate(const Network& net, const FlowDistribution& q) {
  q.validate(net);

  LoadingResult result;
  result.records.resize(net.runs.size());
  for (const auto& run : net.runs)
    result.records[run.idx].resize(net.lines[run.line].stations.size());

  std::map<std::pair<StationIdx, LineIdx>, Platform> platforms;
  std::vector<std::vector<OnBoard>> trains(net.runs.size());
  std::vector<Count> occupancy(net.runs.size(), 0);

  // Users join their origin platform at their chosen option's departure
  // second: they target that specific run.
  for (RouteIdx r = 0; r < static_cast<RouteIdx>(net.routes.size()); ++r) {
    const Route& route = net.routes[r];
    for (OptionIdx o = 0; o < static_cast<OptionIdx>(net.options[r].size()); ++o) {
      Count users = q.at(r, o);
      if (users == 0) continue;
      platforms[{route.legs[0].board, route.legs[0].line}].add(
          Waiting{net.options[r][o].depart, route.od, r, o, 0, users, 0});
    }
  }

  for (const ScheduleEvent& ev : net.schedule_events) {
    const TrainRun& run = net.runs[ev.run];
    const Line& line = net.lines[run.line];
    FlowRecord& rec = result.records[ev.run][ev.pos];
    StationIdx station = line.stations[ev.pos];

    if (ev.kind == 0) { // arrival: drop off, then note the free room
      auto& aboard = trains[ev.run];
      for (auto it = aboard.begin(); it != aboard.end();) {
        const RouteLeg& leg = net.routes[it->route].legs[it->leg];
        if (leg.alight_pos != ev.pos) {
          ++it;
          continue;
        }
        rec.alighted += it->count;
        rec.alighted_by_od[it->od] += it->count;
        occupancy[ev.run] -= it->count;
        const Route& route = net.routes[it->route];
        if (it->leg + 1 == static_cast<int>(route.legs.size())) {
          Sec wait = ev.time - route.in_vehicle - net.options[it->route][it->option].depart;
          if (wait < 0)
            throw InternalError("negative waiting time for OD '" +
                                net.ods[it->od].id + "'");
          result.arrivals.push_back(ArrivalGroup{it->od, it->route, it->option,
                                                 it->user_begin, it->count,
                                                 ev.time, wait, ev.run});
        } else {
          const RouteLeg& next = route.legs[it->leg + 1];
          platforms[{station, next.line}].add(Waiting{ev.time, it->od, it->route,
                                                      it->option, it->user_begin,
                                                      it->count, it->leg + 1});
        }
        it = aboard.erase(it);
      }
      rec.preboard_load = occupancy[ev.run];
      rec.residual_capacity = line.capacity - occupancy[ev.run];
    } else { // departure: board the waiting prefix up to capacity
      auto plat = platforms.find({station, run.line});
      if (plat != platforms.end()) {
        Count present = plat->second.present(ev.time);
        rec.waiting = present;
        auto& entries = plat->second.entries();
        for (const auto& w : entries) {
          if (w.arrival > ev.time) break;
          rec.waiting_by_od[w.od] += w.count;
        }
        Count room = line.capacity - occupancy[ev.run];
        while (room > 0 && !entries.empty() && entries.front().arrival <= ev.time) {
          Waiting& w = entries.front();
          Count take = std::min(room, w.count);
          trains[ev.run].push_back(
              OnBoard{w.od, w.route, w.option, w.user_begin, take, w.leg});
          occupancy[ev.run] += take;
          room -= take;
          rec.boarded += take;
          rec.boarded_by_od[w.od] += take;
          rec.boardings.push_back(BoardingGroup{w.od, w.route, w.option,
                                                w.user_begin, take, w.arrival});
          if (take == w.count) {
            entries.erase(entries.begin());
          } else { // partial group boarding: the remainder keeps its priority
            w.user_begin += take;
            w.count -= take;
          }
        }
        rec.denied = rec.waiting - rec.boarded;
        for (const auto& w : entries) {
          if (w.arrival > ev.time) break;
          rec.denied_by_od[w.od] += w.count;
        }
      }
      rec.departing_load = occupancy[ev.run];
      if (occupancy[ev.run] > line.capacity)
        throw InternalError("train over capacity on line '" + line.id + "'");
    }
  }

  for (auto& [key, platform] : platforms)
    for (const auto& w : platform.entries()) {
      result.stranded.push_back(
          StrandedGroup{w.od, w.route, w.option, w.user_begin, w.count, key.first});
      result.stranded_total += w.count;
    }

  std::sort(result.arrivals.begin(), result.arrivals.end(),
            [](const ArrivalGroup& a, const ArrivalGroup& b) {
              return std::tie(a.route, a.option, a.user_begin) <
                     std::tie(b.route, b.option, b.user_begin);
            });
  std::sort(result.stranded.begin(), result.stranded.end(),
            [](const StrandedGroup& a, const StrandedGroup& b) {
              return std::tie(a.route, a.option, a.user_begin) <
                     std::tie(b.route, b.option, b.user_begin);
            });
  return result;
}

ProbeResult free_flow_probe(const Network& net, RouteIdx route, OptionIdx opt) {
  const Route& r = net.routes[route];
  ProbeResult res;
  RunIdx run = net.options[route][opt].run;
  for (size_t leg = 0; leg + 1 < r.legs.size(); ++leg) {
    const RouteLeg& in = r.legs[leg];
    const RouteLeg& next = r.legs[leg + 1];
    Sec arrive = net.runs[run].arrival[in.alight_pos];
    const auto& cand = net.line_runs[next.line];
    auto it = std::lower_bound(cand.begin(), cand.end(), arrive,
                               [&](RunIdx cr, Sec t) {
                                 return net.runs[cr].departure[next.board_pos] < t;
                               });
    if (it == cand.end()) {
      res.stranded = true;
      return res;
    }
    res.wait += net.runs[*it].departure[next.board_pos] - arrive;
    run = *it;
  }
  res.arrival = net.runs[run].arrival[r.legs.back().alight_pos];
  res.final_run = run;
  return res;
}

void write_trace_csv(std::ostream& out, const Network& net,
                     const LoadingResult& result) {
  out << "run,line,run_index,station,g,f,h,z,m,x,y\n";
  for (const ScheduleEvent& ev : net.schedule_events) {
    if (ev.kind != 1) continue;
    const TrainRun& run = net.runs[ev.run];
    const FlowRecord& rec = result.records[ev.run][ev.pos];
    out << ev.run << ',' << net.lines[run.line].id << ',' << run.run_index
        << ',' << net.stations[net.lines[run.line].stations[ev.pos]].id << ','
        << rec.waiting << ',' << rec.boarded << ',' << rec.denied << ','
        << rec.departing_load << ',' << rec.alighted << ','
        << rec.residual_capacity << ',' << rec.preboard_load << '\n';
  }
}

} // namespace dtue
