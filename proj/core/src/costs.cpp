#include "dtue/costs.hpp"

#include <algorithm>
#include <numeric>

namespace dtue {

Cost schedule_penalty(Sec arrival, Sec desired_arrival, const CostWeights& w) {
  if (arrival < desired_arrival) return w.beta * (desired_arrival - arrival);
  if (arrival > desired_arrival) return w.gamma * (arrival - desired_arrival);
  return 0;
}

Cost individual_cost(Sec arrival, Sec depart, Sec in_vehicle,
                     const CostWeights& w, Sec desired_arrival) {
  Sec wait = arrival - in_vehicle - depart;
  if (wait < 0)
    throw InternalError("negative waiting time: arrival precedes the "
                        "scheduled traversal");
  return w.alpha * wait + schedule_penalty(arrival, desired_arrival, w);
}

Evaluator::Evaluator(const Network& net, const CostWeights& weights)
    : net_(&net) {
  if (weights.alpha < 0 || weights.beta < 0 || weights.gamma < 0)
    throw InputError("cost weights must be non-negative");
  model_ = [&net, weights](OdIdx od, RouteIdx, OptionIdx, RunIdx, Sec arrival,
                           Sec wait) {
    return weights.alpha * wait +
           schedule_penalty(arrival, net.ods[od].desired_arrival, weights);
  };
  init_free_flow();
}

Evaluator::Evaluator(const Network& net, CostModel model)
    : net_(&net), model_(std::move(model)) {
  init_free_flow();
}

void Evaluator::init_free_flow() {
  const Network& net = *net_;
  free_flow_.resize(net.routes.size());
  Cost max_finite = 0;
  std::vector<std::vector<bool>> stranded(net.routes.size());
  for (RouteIdx r = 0; r < static_cast<RouteIdx>(net.routes.size()); ++r) {
    free_flow_[r].assign(net.options[r].size(), 0);
    stranded[r].assign(net.options[r].size(), false);
    for (OptionIdx o = 0; o < static_cast<OptionIdx>(net.options[r].size()); ++o) {
      ProbeResult probe = free_flow_probe(net, r, o);
      if (probe.stranded) {
        stranded[r][o] = true;
        continue;
      }
      free_flow_[r][o] = model_(net.routes[r].od, r, o, probe.final_run,
                                probe.arrival, probe.wait);
      max_finite = std::max(max_finite, free_flow_[r][o]);
    }
  }
  // Stranded users get a large finite penalty instead of literal infinity
  // so gap comparisons stay total and solvers can move them.
  stranded_penalty_ = 10 * std::max<Cost>(max_finite, 1);
  for (size_t r = 0; r < free_flow_.size(); ++r)
    for (size_t o = 0; o < free_flow_[r].size(); ++o)
      if (stranded[r][o]) free_flow_[r][o] = stranded_penalty_;
}

CostTable Evaluator::cost_table(const FlowDistribution& q,
                                const LoadingResult& loading) const {
  const Network& net = *net_;
  CostTable table;
  table.stranded_penalty = stranded_penalty_;
  table.option_costs.resize(net.routes.size());
  table.stranded_users.resize(net.routes.size());

  std::vector<std::vector<Cost>> totals(net.routes.size());
  for (size_t r = 0; r < net.routes.size(); ++r) {
    totals[r].assign(net.options[r].size(), 0);
    table.stranded_users[r].assign(net.options[r].size(), 0);
  }
  for (const ArrivalGroup& g : loading.arrivals)
    totals[g.route][g.option] +=
        g.count * model_(g.od, g.route, g.option, g.final_run, g.arrival, g.wait);
  for (const StrandedGroup& g : loading.stranded)
    table.stranded_users[g.route][g.option] += g.count;

  for (RouteIdx r = 0; r < static_cast<RouteIdx>(net.routes.size()); ++r) {
    table.option_costs[r].resize(net.options[r].size());
    for (OptionIdx o = 0; o < static_cast<OptionIdx>(net.options[r].size()); ++o) {
      Count users = q.at(r, o);
      if (users == 0) {
        table.option_costs[r][o] = OptionCost{free_flow_[r][o], 1};
      } else {
        Cost total = totals[r][o] + stranded_penalty_ * table.stranded_users[r][o];
        table.option_costs[r][o] = OptionCost{total, users};
      }
    }
  }

  table.best.resize(net.ods.size());
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    // od_options is sorted by (departure, route id); keeping the first
    // strict minimum breaks ties toward the earliest option.
    const auto& opts = net.od_options[k];
    OdBest best{opts.front(), table.option_costs[opts.front().route][opts.front().option]};
    for (const OptionRef& ref : opts) {
      const OptionCost& c = table.option_costs[ref.route][ref.option];
      if (cost_less(c, best.cost)) best = OdBest{ref, c};
    }
    table.best[k] = best;
  }
  return table;
}

Evaluator::Evaluation Evaluator::evaluate(const FlowDistribution& q) const {
  Evaluation ev;
  ev.loading = simulate(*net_, q);
  ev.costs = cost_table(q, ev.loading);
  ev.zeta = system_gap(*net_, q, ev.costs);
  return ev;
}

std::vector<long double> od_gaps(const Network& net, const FlowDistribution& q,
                                 const CostTable& costs) {
  std::vector<long double> gaps(net.ods.size(), 0.0L);
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    const OptionCost& best = costs.best[k].cost;
    long double gap = 0.0L;
    for (const OptionRef& ref : net.od_options[k]) {
      Count users = q.at(ref.route, ref.option);
      if (users == 0) continue;
      gap += (costs.option_costs[ref.route][ref.option].value() - best.value()) *
             static_cast<long double>(users);
    }
    gaps[k] = gap;
  }
  return gaps;
}

long double system_gap(const Network& net, const FlowDistribution& q,
                       const CostTable& costs) {
  long double total = 0.0L;
  for (long double g : od_gaps(net, q, costs)) total += g;
  return total;
}

std::optional<Cost> system_gap_exact(const Network& net,
                                     const FlowDistribution& q,
                                     const CostTable& costs) {
  Cost total = 0;
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    const OptionCost& best = costs.best[k].cost;
    // gap_k = sum of used option totals - C*_k * Q_k, exact via the ratio.
    __int128 used_totals = 0;
    Count od_users = 0;
    for (const OptionRef& ref : net.od_options[k]) {
      Count users = q.at(ref.route, ref.option);
      if (users == 0) continue;
      const OptionCost& c = costs.option_costs[ref.route][ref.option];
      if (c.count != users) return std::nullopt;
      used_totals += c.total;
      od_users += users;
    }
    __int128 num = used_totals * best.count -
                   static_cast<__int128>(best.total) * od_users;
    if (num % best.count != 0) return std::nullopt;
    total += static_cast<Cost>(num / best.count);
  }
  return total;
}

long double srg(const Network& net, const FlowDistribution& q,
                const CostTable& costs) {
  long double ideal = 0.0L;
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    const OptionCost& best = costs.best[k].cost;
    if (best.total <= 0)
      throw InputError("SRG undefined: OD pair '" + net.ods[k].id +
                       "' has non-positive optimal cost " +
                       std::to_string(best.value()));
    ideal += best.value() * static_cast<long double>(q.od_total(net, k));
  }
  if (ideal == 0.0L) return 0.0L; // empty demand: gap is zero as well
  return system_gap(net, q, costs) / ideal;
}

} // namespace dtue
