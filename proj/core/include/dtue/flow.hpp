#pragma once

#include <iosfwd>
#include <vector>

#include "dtue/network.hpp"
#include "dtue/types.hpp"

namespace dtue {

// Non-negative integer user counts indexed by (OD pair, departure-time
// option, route). Conservation against the network's OD demands is an
// invariant checked by validate().
class FlowDistribution {
public:
  FlowDistribution() = default;
  explicit FlowDistribution(const Network& net);

  Count at(RouteIdx r, OptionIdx o) const { return q_[r][o]; }
  Count& at(RouteIdx r, OptionIdx o) { return q_[r][o]; }

  Count od_total(const Network& net, OdIdx k) const;
  Count total() const;

  // Throws InputError when counts are negative or per-OD sums do not match
  // the OD demands.
  void validate(const Network& net) const;

  bool operator==(const FlowDistribution& other) const { return q_ == other.q_; }

private:
  std::vector<std::vector<Count>> q_; // [route][option]
};

// CSV exchange format: header od_id,option_time,route_id,count with one row
// per non-zero entry, LF line endings.
void write_flow_csv(std::ostream& out, const Network& net,
                    const FlowDistribution& q);
FlowDistribution read_flow_csv(std::istream& in, const Network& net);

} // namespace dtue
