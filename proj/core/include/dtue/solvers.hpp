#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dtue/costs.hpp"
#include "dtue/flow.hpp"
#include "dtue/network.hpp"

namespace dtue {

struct SolverConfig {
  int outer_max = 50;       // system-loop iterations; also the baseline budget
  int inner_max = 800;      // OD-loop iteration budget
  int inner_patience = 0;   // consecutive non-improving draws; 0 -> 5 * |K|
  int refine_max = 20000;   // single-user refinement move budget
  double golden_tol = 0.01;
  int golden_max_evals = 20;
  std::string rounding = "largest-remainder-best";
  double dtd_rate = 0.5;    // day-to-day learning rate
  std::uint64_t seed = 1;

  void validate() const;
};

// sigma_k(t,r) = theta * od_ratio_k * option_ratio_k(t,r); zero on each
// OD's optimal option.
struct StepComponents {
  double theta = 1.0;
  std::vector<double> od_ratio;                  // per OD
  std::vector<std::vector<double>> option_ratio; // [od][od_options position]
};

// Per OD: the option receiving all shifted users (all-or-nothing target).
using Direction = std::vector<OptionRef>;

// The current best (minimum average cost) option of every OD; ties break
// toward the earliest departure, then the lowest route id.
Direction best_direction(const Network& net, const CostTable& costs);

// OD relative gap: (mean over all options - C*) / mean. Throws InputError
// when the mean is not positive.
double od_relative_gap(const Network& net, OdIdx k, const CostTable& costs);

// Weighted ratios of the strictly non-optimal options, aligned with
// od_options[k]; zero elsewhere. Sums to 1 when any non-optimal exists.
std::vector<double> option_ratios(const Network& net, OdIdx k,
                                  const CostTable& costs);

std::vector<std::vector<double>> make_sigma(const Network& net,
                                            const StepComponents& step);

// q' = q + sigma * (v - q), then integerized: non-target options are floored
// and the target option absorbs every remainder, so per-OD conservation is
// exact.
FlowDistribution shift_flows(const Network& net, const FlowDistribution& q,
                             const Direction& direction,
                             const std::vector<std::vector<double>>& sigma);

struct GoldenResult {
  double theta = 0;
  long double value = 0;
  int evaluations = 0;
};

// Derivative-free minimization on [lo, hi]. Returns the best evaluated
// point; among equal values, the smallest theta.
GoldenResult golden_section_min(const std::function<long double(double)>& f,
                                double lo, double hi, double tol,
                                int max_evals);

struct CertificateResult {
  bool pass = true;
  // witness: the improving single-user move, when pass is false
  OdIdx od = kInvalidIdx;
  OptionRef from, to;
  long double zeta_before = 0;
  long double zeta_after = 0;
};

// Equilibrium certificate: moving one user from any strictly non-optimal
// used option to its OD's optimal option never strictly decreases the gap.
CertificateResult single_user_swap_certificate(const Evaluator& ev,
                                               const FlowDistribution& q);

struct IterationRecord {
  int index = 0;
  char phase = 'O'; // 'O' outer, 'I' inner, 'R' refine, '0' initial
  bool accepted = true;
  double theta = 0;
  long double zeta = 0;
  double srg = 0;
  double wall_ms = 0;
};

struct SolverReport {
  FlowDistribution q;
  long double zeta = 0;
  double srg = 0;
  std::vector<IterationRecord> trace;
  std::string termination; // "converged" | "budget" | "gap-zero"
  CertificateResult certificate;
  double wall_seconds = 0;
  std::int64_t simulations = 0;
};

// Adaptive gap-based descent: a system-wide shifting loop, an OD-at-a-time
// refinement loop with patience, and a final single-user refinement that
// runs until the swap certificate holds.
SolverReport adagdd(const Evaluator& ev, const FlowDistribution& q0,
                    const SolverConfig& cfg);

// Method of successive averages toward the all-or-nothing best-option
// assignment; step 1/(n+1) with n starting at 1.
SolverReport msa(const Evaluator& ev, const FlowDistribution& q0,
                 const SolverConfig& cfg);

// Day-to-day learning: users in worse options switch to the best option
// with probability rate * (C - C*) / C, realized by largest-remainder
// rounding.
SolverReport dtd_learning(const Evaluator& ev, const FlowDistribution& q0,
                          const SolverConfig& cfg);

struct OracleResult {
  long double min_zeta = 0;
  std::vector<FlowDistribution> minimizers;
  std::uint64_t enumerated = 0;
};

// Exhaustive enumeration of every integer flow distribution. Throws
// InputError when the instance exceeds max_distributions.
OracleResult brute_force_oracle(const Evaluator& ev,
                                std::uint64_t max_distributions = 1'000'000);

// Number of distributions the oracle would enumerate (product of per-OD
// compositions), saturating at the cap.
std::uint64_t oracle_instance_size(const Network& net, std::uint64_t cap);

} // namespace dtue
