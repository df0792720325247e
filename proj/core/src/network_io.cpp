#include "dtue/network_io.hpp"

#include <fstream>
#include <json.hpp>

namespace dtue {

namespace {

using nlohmann::json;

json parse(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("cannot parse " + what + ": " + e.what());
  }
}

} // namespace

NetworkDef read_network_json(std::istream& in, const std::string& what) {
  json j = parse(in, what);
  try {
    NetworkDef def;
    if (j.value("schema_version", 1) != 1)
      throw InputError(what + ": unsupported schema_version");
    def.name = j.value("name", "");
    for (const auto& s : j.at("stations"))
      def.stations.push_back(s.is_string() ? s.get<std::string>()
                                           : s.at("id").get<std::string>());
    for (const auto& l : j.at("lines")) {
      NetworkDef::LineDef ld;
      ld.id = l.at("id").get<std::string>();
      for (const auto& s : l.at("stations"))
        ld.stations.push_back(s.get<std::string>());
      ld.headway = l.at("headway").get<Sec>();
      ld.first_departure = l.at("first_departure").get<Sec>();
      ld.run_count = l.at("run_count").get<int>();
      ld.capacity = l.at("capacity").get<Count>();
      ld.segment_times = l.at("segment_times").get<std::vector<Sec>>();
      if (l.contains("dwell_times"))
        ld.dwell_times = l.at("dwell_times").get<std::vector<Sec>>();
      def.lines.push_back(std::move(ld));
    }
    for (const auto& o : j.at("od_demand")) {
      NetworkDef::OdDef od;
      od.origin = o.at("origin").get<std::string>();
      od.destination = o.at("destination").get<std::string>();
      od.demand = o.at("demand").get<Count>();
      od.preferred_departure = o.at("preferred_departure").get<Sec>();
      od.desired_arrival = o.at("desired_arrival").get<Sec>();
      def.od_demand.push_back(std::move(od));
    }
    for (const auto& r : j.at("routes")) {
      NetworkDef::RouteDef rd;
      rd.od = r.at("od").get<std::string>();
      rd.id = r.value("id", "");
      for (const auto& leg : r.at("legs"))
        rd.legs.push_back(NetworkDef::LegDef{leg.at("line").get<std::string>(),
                                             leg.at("board").get<std::string>(),
                                             leg.at("alight").get<std::string>()});
      def.routes.push_back(std::move(rd));
    }
    return def;
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

NetworkDef load_network_def(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file '" + path.string() + "'");
  return read_network_json(in, "network file '" + path.string() + "'");
}

Network load_network(const std::filesystem::path& path) {
  return compile_network(load_network_def(path));
}

void write_network_json(std::ostream& out, const Network& net) {
  json j;
  j["schema_version"] = 1;
  j["name"] = net.name;
  j["stations"] = json::array();
  for (const auto& s : net.stations) j["stations"].push_back(s.id);
  j["lines"] = json::array();
  for (const auto& l : net.lines) {
    json jl;
    jl["id"] = l.id;
    jl["stations"] = json::array();
    for (StationIdx s : l.stations) jl["stations"].push_back(net.stations[s].id);
    jl["headway"] = l.headway;
    jl["first_departure"] = l.first_departure;
    jl["run_count"] = l.run_count;
    jl["capacity"] = l.capacity;
    jl["segment_times"] = l.segment_times;
    if (!l.dwell_times.empty()) jl["dwell_times"] = l.dwell_times;
    j["lines"].push_back(std::move(jl));
  }
  j["od_demand"] = json::array();
  for (const auto& od : net.ods) {
    json jo;
    jo["origin"] = net.stations[od.origin].id;
    jo["destination"] = net.stations[od.destination].id;
    jo["demand"] = od.demand;
    jo["preferred_departure"] = od.preferred_departure;
    jo["desired_arrival"] = od.desired_arrival;
    j["od_demand"].push_back(std::move(jo));
  }
  j["routes"] = json::array();
  for (const auto& route : net.routes) {
    json jr;
    jr["od"] = net.ods[route.od].id;
    jr["id"] = route.id;
    jr["legs"] = json::array();
    for (const auto& leg : route.legs)
      jr["legs"].push_back({{"line", net.lines[leg.line].id},
                            {"board", net.stations[leg.board].id},
                            {"alight", net.stations[leg.alight].id}});
    j["routes"].push_back(std::move(jr));
  }
  out << j.dump(2) << '\n';
}

} // namespace dtue
