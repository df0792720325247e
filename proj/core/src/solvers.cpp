#include "dtue/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace dtue {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double safe_srg(const Network& net, const FlowDistribution& q,
                const CostTable& costs) {
  try {
    return static_cast<double>(srg(net, q, costs));
  } catch (const InputError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

bool same_option(const OptionRef& a, const OptionRef& b) {
  return a.route == b.route && a.option == b.option;
}

} // namespace

void SolverConfig::validate() const {
  if (outer_max < 1 || inner_max < 1 || refine_max < 1 || golden_max_evals < 1)
    throw InputError("solver iteration limits must be >= 1");
  if (inner_patience < 0)
    throw InputError("inner patience must be >= 0");
  if (!(golden_tol > 0))
    throw InputError("golden-section tolerance must be > 0");
  if (!(dtd_rate > 0))
    throw InputError("day-to-day learning rate must be > 0");
  if (rounding != "largest-remainder-best")
    throw InputError("unknown rounding policy '" + rounding + "'");
}

Direction best_direction(const Network& net, const CostTable& costs) {
  Direction dir(net.ods.size());
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k)
    dir[k] = costs.best[k].option;
  return dir;
}

double od_relative_gap(const Network& net, OdIdx k, const CostTable& costs) {
  const auto& opts = net.od_options[k];
  long double sum = 0.0L;
  for (const OptionRef& ref : opts)
    sum += costs.option_costs[ref.route][ref.option].value();
  long double mean = sum / static_cast<long double>(opts.size());
  if (!(mean > 0.0L))
    throw InputError("degenerate costs: OD pair '" + net.ods[k].id +
                     "' has non-positive mean option cost");
  long double best = costs.best[k].cost.value();
  double ratio = static_cast<double>((mean - best) / mean);
  return std::clamp(ratio, 0.0, 1.0);
}

std::vector<double> option_ratios(const Network& net, OdIdx k,
                                  const CostTable& costs) {
  const auto& opts = net.od_options[k];
  std::vector<double> phi(opts.size(), 0.0);
  const OptionCost& best = costs.best[k].cost;
  long double denom = 0.0L;
  for (const OptionRef& ref : opts) {
    const OptionCost& c = costs.option_costs[ref.route][ref.option];
    if (cost_less(best, c)) denom += c.value();
  }
  if (denom <= 0.0L) return phi; // no strictly non-optimal options
  for (size_t i = 0; i < opts.size(); ++i) {
    const OptionCost& c = costs.option_costs[opts[i].route][opts[i].option];
    if (cost_less(best, c))
      phi[i] = static_cast<double>(c.value() / denom);
  }
  return phi;
}

std::vector<std::vector<double>> make_sigma(const Network& net,
                                            const StepComponents& step) {
  std::vector<std::vector<double>> sigma(net.ods.size());
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    sigma[k].assign(net.od_options[k].size(), 0.0);
    for (size_t i = 0; i < sigma[k].size(); ++i) {
      double s = step.theta * step.od_ratio[k] * step.option_ratio[k][i];
      if (s < 0.0 || s > 1.0)
        throw InternalError("step size outside [0,1]");
      sigma[k][i] = s;
    }
  }
  return sigma;
}

FlowDistribution shift_flows(const Network& net, const FlowDistribution& q,
                             const Direction& direction,
                             const std::vector<std::vector<double>>& sigma) {
  FlowDistribution out(net);
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    const auto& opts = net.od_options[k];
    const OptionRef& target = direction[k];
    Count demand = q.od_total(net, k);
    Count placed = 0;
    for (size_t i = 0; i < opts.size(); ++i) {
      if (same_option(opts[i], target)) continue;
      Count users = q.at(opts[i].route, opts[i].option);
      if (users == 0) continue;
      double kept = static_cast<double>(users) * (1.0 - sigma[k][i]);
      Count kept_int = static_cast<Count>(std::floor(kept));
      out.at(opts[i].route, opts[i].option) = kept_int;
      placed += kept_int;
    }
    // Rounding remainders are credited to the target option, keeping the
    // OD sum exact.
    Count rest = demand - placed;
    if (rest < 0) throw InternalError("flow shift broke conservation");
    out.at(target.route, target.option) = rest;
  }
  return out;
}

GoldenResult golden_section_min(const std::function<long double(double)>& f,
                                double lo, double hi, double tol,
                                int max_evals) {
  GoldenResult best;
  best.theta = lo;
  best.value = std::numeric_limits<long double>::max();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  auto probe = [&](double x) {
    long double v = f(x);
    ++best.evaluations;
    // prefer the smallest theta among equal values
    if (v < best.value || (v == best.value && x < best.theta)) {
      best.value = v;
      best.theta = x;
    }
    return v;
  };

  double a = lo, b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  long double fc = probe(c);
  long double fd = probe(d);
  while (std::abs(b - a) > tol && best.evaluations < max_evals) {
    if (fc <= fd) { // tie shrinks toward the smaller theta
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = probe(d);
    }
  }
  return best;
}

namespace {

// Scans single-user moves in deterministic order; returns the first move
// that strictly lowers the gap.
CertificateResult certificate_scan(const Evaluator& ev,
                                   const FlowDistribution& q,
                                   const Evaluator::Evaluation& base,
                                   std::int64_t& sims) {
  const Network& net = ev.network();
  CertificateResult res;
  res.zeta_before = base.zeta;
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    const OptionRef best = base.costs.best[k].option;
    const OptionCost& best_cost = base.costs.best[k].cost;
    for (const OptionRef& ref : net.od_options[k]) {
      if (q.at(ref.route, ref.option) == 0) continue;
      const OptionCost& c = base.costs.option_costs[ref.route][ref.option];
      if (!cost_less(best_cost, c)) continue; // only strictly worse options
      FlowDistribution moved = q;
      moved.at(ref.route, ref.option) -= 1;
      moved.at(best.route, best.option) += 1;
      ++sims;
      long double zeta_after = ev.evaluate(moved).zeta;
      if (zeta_after < base.zeta) {
        res.pass = false;
        res.od = k;
        res.from = ref;
        res.to = best;
        res.zeta_after = zeta_after;
        return res;
      }
    }
  }
  return res;
}

} // namespace

CertificateResult single_user_swap_certificate(const Evaluator& ev,
                                               const FlowDistribution& q) {
  q.validate(ev.network());
  std::int64_t sims = 0;
  auto base = ev.evaluate(q);
  return certificate_scan(ev, q, base, sims);
}

SolverReport adagdd(const Evaluator& ev, const FlowDistribution& q0,
                    const SolverConfig& cfg) {
  cfg.validate();
  const Network& net = ev.network();
  q0.validate(net);
  const OdIdx num_ods = static_cast<OdIdx>(net.ods.size());
  const auto t0 = Clock::now();

  SolverReport rep;
  FlowDistribution q = q0;
  auto cur = ev.evaluate(q);
  rep.simulations = 1;

  int index = 0;
  auto record = [&](char phase, bool accepted, double theta,
                    const Evaluator::Evaluation& e, const FlowDistribution& qq) {
    rep.trace.push_back(IterationRecord{index++, phase, accepted, theta, e.zeta,
                                        safe_srg(net, qq, e.costs),
                                        elapsed_ms(t0)});
  };
  record('0', true, 0.0, cur, q);

  auto line_search = [&](const Direction& dir, StepComponents step) {
    auto eval_theta = [&](double theta) {
      step.theta = theta;
      FlowDistribution cand = shift_flows(net, q, dir, make_sigma(net, step));
      ++rep.simulations;
      return ev.evaluate(cand).zeta;
    };
    return golden_section_min(eval_theta, 0.0, 1.0, cfg.golden_tol,
                              cfg.golden_max_evals);
  };

  // System-based shifting: all ODs at once, break on the first
  // non-improving step.
  for (int j = 0; j < cfg.outer_max && cur.zeta > 0.0L; ++j) {
    Direction dir = best_direction(net, cur.costs);
    StepComponents step;
    step.od_ratio.resize(num_ods);
    step.option_ratio.resize(num_ods);
    for (OdIdx k = 0; k < num_ods; ++k) {
      step.od_ratio[k] = od_relative_gap(net, k, cur.costs);
      step.option_ratio[k] = option_ratios(net, k, cur.costs);
    }
    GoldenResult g = line_search(dir, step);
    step.theta = g.theta;
    FlowDistribution cand = shift_flows(net, q, dir, make_sigma(net, step));
    ++rep.simulations;
    auto nxt = ev.evaluate(cand);
    if (nxt.zeta <= cur.zeta) {
      q = std::move(cand);
      cur = std::move(nxt);
      record('O', true, g.theta, cur, q);
    } else {
      record('O', false, g.theta, nxt, cand);
      break;
    }
  }

  // OD-based refinement: one randomly drawn OD per iteration.
  const int patience =
      cfg.inner_patience > 0 ? cfg.inner_patience : 5 * std::max<int>(1, num_ods);
  std::mt19937_64 rng(cfg.seed);
  int stale = 0;
  for (int i = 0; i < cfg.inner_max && cur.zeta > 0.0L; ++i) {
    if (stale > patience) break;
    OdIdx k = static_cast<OdIdx>(rng() % static_cast<std::uint64_t>(num_ods));
    StepComponents step;
    step.od_ratio.assign(num_ods, 0.0);
    step.od_ratio[k] = 1.0; // targeted OD
    step.option_ratio.resize(num_ods);
    for (OdIdx kk = 0; kk < num_ods; ++kk)
      step.option_ratio[kk].assign(net.od_options[kk].size(), 0.0);
    step.option_ratio[k] = option_ratios(net, k, cur.costs);

    bool shiftable = false;
    for (size_t p = 0; p < step.option_ratio[k].size(); ++p)
      if (step.option_ratio[k][p] > 0.0 &&
          q.at(net.od_options[k][p].route, net.od_options[k][p].option) > 0)
        shiftable = true;
    if (!shiftable) { // nothing to move within this OD
      ++stale;
      continue;
    }

    Direction dir = best_direction(net, cur.costs);
    GoldenResult g = line_search(dir, step);
    step.theta = g.theta;
    FlowDistribution cand = shift_flows(net, q, dir, make_sigma(net, step));
    ++rep.simulations;
    auto nxt = ev.evaluate(cand);
    if (nxt.zeta < cur.zeta) {
      stale = 0;
      q = std::move(cand);
      cur = std::move(nxt);
      record('I', true, g.theta, cur, q);
    } else if (nxt.zeta == cur.zeta) {
      ++stale; // accepted but not an improvement
      q = std::move(cand);
      cur = std::move(nxt);
      record('I', true, g.theta, cur, q);
    } else {
      ++stale;
      record('I', false, g.theta, nxt, cand);
    }
  }

  // Single-user refinement until no swap improves the gap.
  rep.termination = "budget";
  for (int moves = 0; moves <= cfg.refine_max; ++moves) {
    CertificateResult cert = certificate_scan(ev, q, cur, rep.simulations);
    rep.certificate = cert;
    if (cert.pass) {
      rep.termination = cur.zeta == 0.0L ? "gap-zero" : "converged";
      break;
    }
    if (moves == cfg.refine_max) break;
    q.at(cert.from.route, cert.from.option) -= 1;
    q.at(cert.to.route, cert.to.option) += 1;
    ++rep.simulations;
    cur = ev.evaluate(q);
    record('R', true, 0.0, cur, q);
  }

  rep.q = std::move(q);
  rep.zeta = cur.zeta;
  rep.srg = safe_srg(net, rep.q, cur.costs);
  rep.wall_seconds = elapsed_ms(t0) / 1000.0;
  return rep;
}

SolverReport msa(const Evaluator& ev, const FlowDistribution& q0,
                 const SolverConfig& cfg) {
  cfg.validate();
  const Network& net = ev.network();
  q0.validate(net);
  const auto t0 = Clock::now();

  SolverReport rep;
  FlowDistribution q = q0;
  auto cur = ev.evaluate(q);
  rep.simulations = 1;
  int index = 0;
  rep.trace.push_back(IterationRecord{index++, '0', true, 0.0, cur.zeta,
                                      safe_srg(net, q, cur.costs), elapsed_ms(t0)});

  for (int n = 1; n <= cfg.outer_max; ++n) {
    Direction dir = best_direction(net, cur.costs);
    double step = 1.0 / static_cast<double>(n + 1);
    std::vector<std::vector<double>> sigma(net.ods.size());
    for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k)
      sigma[k].assign(net.od_options[k].size(), step);
    q = shift_flows(net, q, dir, sigma);
    ++rep.simulations;
    cur = ev.evaluate(q);
    rep.trace.push_back(IterationRecord{index++, 'O', true, step, cur.zeta,
                                        safe_srg(net, q, cur.costs),
                                        elapsed_ms(t0)});
  }

  rep.certificate = certificate_scan(ev, q, cur, rep.simulations);
  rep.termination = "budget";
  rep.q = std::move(q);
  rep.zeta = cur.zeta;
  rep.srg = safe_srg(net, rep.q, cur.costs);
  rep.wall_seconds = elapsed_ms(t0) / 1000.0;
  return rep;
}

SolverReport dtd_learning(const Evaluator& ev, const FlowDistribution& q0,
                          const SolverConfig& cfg) {
  cfg.validate();
  const Network& net = ev.network();
  q0.validate(net);
  const auto t0 = Clock::now();

  SolverReport rep;
  FlowDistribution q = q0;
  auto cur = ev.evaluate(q);
  rep.simulations = 1;
  int index = 0;
  rep.trace.push_back(IterationRecord{index++, '0', true, 0.0, cur.zeta,
                                      safe_srg(net, q, cur.costs), elapsed_ms(t0)});

  for (int day = 1; day <= cfg.outer_max; ++day) {
    for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
      const OptionRef best = cur.costs.best[k].option;
      const OptionCost& best_cost = cur.costs.best[k].cost;
      struct Candidate {
        size_t pos;
        double expected;
        Count users;
      };
      std::vector<Candidate> cands;
      long double expected_total = 0.0L;
      const auto& opts = net.od_options[k];
      for (size_t p = 0; p < opts.size(); ++p) {
        Count users = q.at(opts[p].route, opts[p].option);
        if (users == 0) continue;
        const OptionCost& c = cur.costs.option_costs[opts[p].route][opts[p].option];
        if (!cost_less(best_cost, c)) continue;
        double prob = cfg.dtd_rate *
                      static_cast<double>((c.value() - best_cost.value()) / c.value());
        prob = std::clamp(prob, 0.0, 1.0);
        double expect = prob * static_cast<double>(users);
        cands.push_back(Candidate{p, expect, users});
        expected_total += expect;
      }
      if (cands.empty()) continue;
      // realize expected switch counts by largest-remainder rounding
      Count target = static_cast<Count>(std::llround(static_cast<double>(expected_total)));
      Count assigned = 0;
      std::vector<Count> movers(cands.size());
      for (size_t i = 0; i < cands.size(); ++i) {
        movers[i] = static_cast<Count>(std::floor(cands[i].expected));
        assigned += movers[i];
      }
      std::vector<size_t> order(cands.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        double fa = cands[a].expected - std::floor(cands[a].expected);
        double fb = cands[b].expected - std::floor(cands[b].expected);
        return fa > fb;
      });
      for (size_t i = 0; i < order.size() && assigned < target; ++i) {
        size_t idx = order[i];
        if (movers[idx] < cands[idx].users) {
          ++movers[idx];
          ++assigned;
        }
      }
      Count moved_total = 0;
      for (size_t i = 0; i < cands.size(); ++i) {
        q.at(opts[cands[i].pos].route, opts[cands[i].pos].option) -= movers[i];
        moved_total += movers[i];
      }
      q.at(best.route, best.option) += moved_total;
    }
    ++rep.simulations;
    cur = ev.evaluate(q);
    rep.trace.push_back(IterationRecord{index++, 'O', true, cfg.dtd_rate,
                                        cur.zeta, safe_srg(net, q, cur.costs),
                                        elapsed_ms(t0)});
  }

  rep.certificate = certificate_scan(ev, q, cur, rep.simulations);
  rep.termination = "budget";
  rep.q = std::move(q);
  rep.zeta = cur.zeta;
  rep.srg = safe_srg(net, rep.q, cur.costs);
  rep.wall_seconds = elapsed_ms(t0) / 1000.0;
  return rep;
}

std::uint64_t oracle_instance_size(const Network& net, std::uint64_t cap) {
  __int128 total = 1;
  for (OdIdx k = 0; k < static_cast<OdIdx>(net.ods.size()); ++k) {
    // compositions of Q_k into n_k options: C(Q + n - 1, n - 1)
    __int128 combos = 1;
    const __int128 q = net.ods[k].demand;
    const __int128 n = static_cast<__int128>(net.od_options[k].size());
    for (__int128 i = 1; i <= n - 1; ++i) {
      combos = combos * (q + i) / i;
      if (combos > static_cast<__int128>(cap) * 1000) return cap + 1;
    }
    total *= combos;
    if (total > static_cast<__int128>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

void enumerate_od(const Evaluator& ev, FlowDistribution& q, OdIdx k,
                  size_t pos, Count remaining, OracleResult& out) {
  const Network& net = ev.network();
  if (k == static_cast<OdIdx>(net.ods.size())) {
    ++out.enumerated;
    long double zeta = ev.evaluate(q).zeta;
    if (out.minimizers.empty() || zeta < out.min_zeta) {
      out.min_zeta = zeta;
      out.minimizers.clear();
      out.minimizers.push_back(q);
    } else if (zeta == out.min_zeta) {
      out.minimizers.push_back(q);
    }
    return;
  }
  const auto& opts = net.od_options[k];
  if (pos + 1 == opts.size()) {
    q.at(opts[pos].route, opts[pos].option) = remaining;
    enumerate_od(ev, q, k + 1, 0, k + 1 < static_cast<OdIdx>(net.ods.size())
                                       ? net.ods[k + 1].demand
                                       : 0,
                 out);
    q.at(opts[pos].route, opts[pos].option) = 0;
    return;
  }
  for (Count c = 0; c <= remaining; ++c) {
    q.at(opts[pos].route, opts[pos].option) = c;
    enumerate_od(ev, q, k, pos + 1, remaining - c, out);
  }
  q.at(opts[pos].route, opts[pos].option) = 0;
}

} // namespace

OracleResult brute_force_oracle(const Evaluator& ev,
                                std::uint64_t max_distributions) {
  const Network& net = ev.network();
  std::uint64_t size = oracle_instance_size(net, max_distributions);
  if (size > max_distributions)
    throw InputError("oracle refused: instance enumerates more than " +
                     std::to_string(max_distributions) + " distributions");
  OracleResult out;
  FlowDistribution q(net);
  enumerate_od(ev, q, 0, 0, net.ods.empty() ? 0 : net.ods[0].demand, out);
  return out;
}

} // namespace dtue
