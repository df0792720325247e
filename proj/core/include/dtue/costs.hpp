#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dtue/flow.hpp"
#include "dtue/loading.hpp"
#include "dtue/network.hpp"
#include "dtue/types.hpp"

namespace dtue {

struct CostWeights {
  Cost alpha = 10; // per second of platform waiting
  Cost beta = 1;   // per second of early arrival
  Cost gamma = 10; // per second of late arrival
};

// Early/late schedule-delay penalty around the desired arrival time.
Cost schedule_penalty(Sec arrival, Sec desired_arrival, const CostWeights& w);

// alpha*w + penalty with w = arrival - in_vehicle - depart. Throws
// InternalError when w would be negative: the simulation never produces
// arrivals before the scheduled traversal.
Cost individual_cost(Sec arrival, Sec depart, Sec in_vehicle,
                     const CostWeights& w, Sec desired_arrival);

// Pluggable per-user cost. The default model applies the generalized cost
// formula; tests may substitute stated cost tables or synthetic landscapes.
using CostModel = std::function<Cost(OdIdx od, RouteIdx route, OptionIdx option,
                                     RunIdx final_run, Sec arrival, Sec wait)>;

struct OdBest {
  OptionRef option;
  OptionCost cost; // C*_k
};

struct CostTable {
  std::vector<std::vector<OptionCost>> option_costs; // [route][option]
  std::vector<std::vector<Count>> stranded_users;    // [route][option]
  std::vector<OdBest> best;                          // per OD
  Cost stranded_penalty = 0;                         // penalty in effect
};

// System gap: sum over ODs and options of (C_k(t,r) - C*_k) * q_k(t,r).
long double system_gap(const Network& net, const FlowDistribution& q,
                       const CostTable& costs);
std::vector<long double> od_gaps(const Network& net, const FlowDistribution& q,
                                 const CostTable& costs);

// Exact integer system gap for fixtures whose per-OD gaps are integral;
// nullopt otherwise.
std::optional<Cost> system_gap_exact(const Network& net,
                                     const FlowDistribution& q,
                                     const CostTable& costs);

// System relative gap: gap divided by the ideal system cost where every
// user pays their OD's minimum option cost. Throws InputError when some
// C*_k is not positive (SRG undefined).
long double srg(const Network& net, const FlowDistribution& q,
                const CostTable& costs);

// Binds a network to a cost model; caches free-flow option costs and the
// stranded-user penalty. Pure reads after construction, safe to share.
class Evaluator {
public:
  Evaluator(const Network& net, const CostWeights& weights);
  Evaluator(const Network& net, CostModel model);

  const Network& network() const { return *net_; }
  Cost stranded_penalty() const { return stranded_penalty_; }
  Cost free_flow_cost(RouteIdx r, OptionIdx o) const { return free_flow_[r][o]; }

  // Option average costs for a loading: mean of individual costs where
  // q > 0, the free-flow cost where q = 0; stranded users contribute the
  // stranded penalty each.
  CostTable cost_table(const FlowDistribution& q,
                       const LoadingResult& loading) const;

  struct Evaluation {
    LoadingResult loading;
    CostTable costs;
    long double zeta = 0;
  };
  Evaluation evaluate(const FlowDistribution& q) const;

private:
  void init_free_flow();

  const Network* net_;
  CostModel model_;
  std::vector<std::vector<Cost>> free_flow_; // [route][option]
  Cost stranded_penalty_ = 0;
};

} // namespace dtue
