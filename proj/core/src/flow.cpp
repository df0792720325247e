#include "dtue/flow.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace dtue {

FlowDistribution::FlowDistribution(const Network& net) {
  q_.resize(net.routes.size());
  for (size_t r = 0; r < net.routes.size(); ++r)
    q_[r].assign(net.options[r].size(), 0);
}

Count FlowDistribution::od_total(const Network& net, OdIdx k) const {
  Count total = 0;
  for (RouteIdx r : net.ods[k].routes)
    for (Count c : q_[r]) total += c;
  return total;
}

Count FlowDistribution::total() const {
  Count total = 0;
  for (const auto& route : q_)
    for (Count c : route) total += c;
  return total;
}

void FlowDistribution::validate(const Network& net) const {
  if (q_.size() != net.routes.size())
    throw InputError("flow distribution does not match the network's routes");
  for (size_t r = 0; r < q_.size(); ++r) {
    if (q_[r].size() != net.options[r].size())
      throw InputError("flow distribution does not match the option sets");
    for (Count c : q_[r])
      if (c < 0) throw InputError("flow distribution has a negative count");
  }
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k)
    if (od_total(net, k) != net.ods[k].demand)
      throw InputError("flow for OD pair '" + net.ods[k].id + "' sums to " +
                       std::to_string(od_total(net, k)) + ", demand is " +
                       std::to_string(net.ods[k].demand));
}

void write_flow_csv(std::ostream& out, const Network& net,
                    const FlowDistribution& q) {
  out << "od_id,option_time,route_id,count\n";
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k)
    for (const OptionRef& ref : net.od_options[k]) {
      Count c = q.at(ref.route, ref.option);
      if (c == 0) continue;
      out << net.ods[k].id << ',' << net.options[ref.route][ref.option].depart
          << ',' << net.routes[ref.route].id << ',' << c << '\n';
    }
}

FlowDistribution read_flow_csv(std::istream& in, const Network& net) {
  FlowDistribution q(net);
  std::string line;
  if (!std::getline(in, line) || line.rfind("od_id,", 0) != 0)
    throw InputError("flow CSV must start with the od_id header row");
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string od_id, time_str, route_id, count_str;
    if (!std::getline(row, od_id, ',') || !std::getline(row, time_str, ',') ||
        !std::getline(row, route_id, ',') || !std::getline(row, count_str))
      throw InputError("flow CSV row " + std::to_string(lineno) + " is malformed");
    OdIdx k = net.od_of(od_id);
    RouteIdx r = net.route_of(k, route_id);
    OptionIdx o = net.option_at(r, std::stoll(time_str));
    if (o == kInvalidIdx)
      throw InputError("flow CSV row " + std::to_string(lineno) +
                       ": no option departs at " + time_str);
    q.at(r, o) += std::stoll(count_str);
  }
  return q;
}

} // namespace dtue
