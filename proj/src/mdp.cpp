#include "seng/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "seng/util.hpp"

namespace seng {

double DiscreteInstance::p_break() const { return 1.0 - std::exp(-lambda); }
double DiscreteInstance::q_repair() const { return 1.0 - std::exp(-mu); }

void DiscreteInstance::validate() const {
  if (K < 1 || R < 1 || M < 1) throw std::invalid_argument("K, R, M >= 1");
  if (t_star < 0) throw std::invalid_argument("t_star >= 0");
  if (lambda <= 0 || mu <= 0) throw std::invalid_argument("rates positive");
  if (static_cast<int>(travel.size()) != (K + R) * (K + R))
    throw std::invalid_argument("travel matrix size mismatch");
  if (static_cast<int>(allocation.size()) != R)
    throw std::invalid_argument("allocation size mismatch");
  if (std::accumulate(allocation.begin(), allocation.end(), 0) != M)
    throw std::invalid_argument("allocation must place M engineers");
  if (K > 31 || M > 31) throw std::invalid_argument("bitmask limit: K, M <= 31");
  const double bits = M * (std::log2(double(K + R)) + std::log2(double(d_max + 1))) +
                      K * std::log2(double(t_star + 3)) + 2.0 * K + M;
  if (bits > 126.0)
    throw std::invalid_argument("instance too large for the packed state key");
}

DiscreteInstance DiscreteInstance::from_map(const NetworkMap& map, int M,
                                            double lambda, double mu,
                                            int t_star,
                                            std::vector<int> allocation) {
  DiscreteInstance inst;
  inst.K = map.num_machines();
  inst.R = map.num_bases();
  inst.M = M;
  inst.t_star = t_star;
  inst.lambda = lambda;
  inst.mu = mu;
  inst.allocation = std::move(allocation);
  const int n = inst.K + inst.R;
  inst.travel.resize(n * n);
  int max_t = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int t = static_cast<int>(std::floor(map.travel(a, b) + 0.5));
      inst.travel[a * n + b] = t;
      max_t = std::max(max_t, t);
    }
  inst.d_max = 2 * max_t;
  inst.validate();
  return inst;
}

StateKey encode_state(const DiscreteInstance& inst, const DiscreteState& s) {
  StateKey key = 0;
  const StateKey loc_radix = inst.K + inst.R;
  const StateKey d_radix = inst.d_max + 1;
  const StateKey m_radix = inst.t_star + 3;
  for (const auto& e : s.engineers) {
    key = key * loc_radix + static_cast<StateKey>(e.dest);
    key = key * d_radix + static_cast<StateKey>(e.d);
  }
  for (int v : s.machines) key = key * m_radix + static_cast<StateKey>(v);
  key = (key << inst.K) | s.k1;
  key = (key << inst.K) | s.k2;
  key = (key << inst.M) | s.ma;
  return key;
}

DiscreteState initial_discrete_state(const DiscreteInstance& inst) {
  DiscreteState s;
  s.machines.assign(inst.K, dstatus::kWorking);
  for (int r = 0; r < inst.R; ++r)
    for (int i = 0; i < inst.allocation[r]; ++i)
      s.engineers.push_back({inst.base_ref(r), 0});
  if (static_cast<int>(s.engineers.size()) != inst.M)
    throw std::invalid_argument("allocation does not match M");
  return s;
}

std::vector<int> discrete_queue(const DiscreteInstance& inst,
                                const DiscreteState& s) {
  std::vector<int> q;
  for (int k = 0; k < inst.K; ++k) {
    if (!dstatus::is_waiting(s.machines[k])) continue;
    bool en_route = false;
    for (const auto& e : s.engineers)
      if (e.dest == inst.machine_ref(k)) {
        en_route = true;
        break;
      }
    if (!en_route) q.push_back(k);
  }
  return q;
}

namespace {

std::vector<int> freed_engineers(const DiscreteInstance& inst,
                                 const DiscreteState& s) {
  std::vector<int> freed;
  for (size_t m = 0; m < s.engineers.size(); ++m) {
    const auto& e = s.engineers[m];
    if (!inst.is_base(e.dest) && (s.k2 >> e.dest & 1u)) freed.push_back(static_cast<int>(m));
  }
  return freed;
}

std::vector<int> idle_engineers_d(const DiscreteInstance& inst,
                                  const DiscreteState& s) {
  std::vector<int> idle;
  for (size_t m = 0; m < s.engineers.size(); ++m)
    if (inst.is_base(s.engineers[m].dest)) idle.push_back(static_cast<int>(m));
  return idle;
}

bool move_ok(const DiscreteInstance& inst, const DiscreteEngineer& e, int target) {
  return e.d + inst.trav(e.dest, target) <= inst.d_max;
}

}  // namespace

std::vector<DiscreteAction> legal_actions_discrete(const DiscreteInstance& inst,
                                                   const DiscreteState& s) {
  const auto freed = freed_engineers(inst, s);
  const auto idle = idle_engineers_d(inst, s);
  const auto queue = discrete_queue(inst, s);

  std::vector<DiscreteAction> actions;
  std::vector<std::pair<int, int>> x_cur;
  std::vector<char> eng_used(s.engineers.size(), 0);
  std::vector<char> mach_taken(inst.K, 0);

  // Z options for a fixed (X, Y): nothing, or one idle non-dispatched
  // engineer to any base (when permitted).
  auto emit_with_z = [&](const DiscreteAction& base) {
    actions.push_back(base);
    bool to_new_break = false;
    for (auto [m, k] : base.dispatch)
      if (s.k1 >> k & 1u) to_new_break = true;
    if (!to_new_break && s.k2 == 0) return;
    for (int n : idle) {
      if (eng_used[n]) continue;
      for (int r = 0; r < inst.R; ++r) {
        if (!move_ok(inst, s.engineers[n], inst.base_ref(r))) continue;
        DiscreteAction a = base;
        a.reloc_engineer = n;
        a.reloc_base = r;
        actions.push_back(std::move(a));
      }
    }
  };

  // Y: each freed engineer to exactly one untaken queued machine or base.
  std::vector<std::pair<int, int>> y_cur;
  std::function<void(size_t)> rec_y = [&](size_t fi) {
    if (fi == freed.size()) {
      DiscreteAction a;
      a.dispatch = x_cur;
      a.redeploy = y_cur;
      emit_with_z(a);
      return;
    }
    const int m = freed[fi];
    for (int k : queue) {
      if (mach_taken[k]) continue;
      if (!move_ok(inst, s.engineers[m], inst.machine_ref(k))) continue;
      mach_taken[k] = 1;
      y_cur.emplace_back(m, inst.machine_ref(k));
      rec_y(fi + 1);
      y_cur.pop_back();
      mach_taken[k] = 0;
    }
    for (int r = 0; r < inst.R; ++r) {
      if (!move_ok(inst, s.engineers[m], inst.base_ref(r))) continue;
      y_cur.emplace_back(m, inst.base_ref(r));
      rec_y(fi + 1);
      y_cur.pop_back();
    }
  };

  // X: an injective partial assignment of idle engineers to queued machines.
  std::function<void(size_t)> rec_x = [&](size_t qi) {
    if (qi == queue.size()) {
      rec_y(0);
      return;
    }
    const int k = queue[qi];
    rec_x(qi + 1);  // leave machine k unserved
    for (int m : idle) {
      if (eng_used[m]) continue;
      if (!move_ok(inst, s.engineers[m], inst.machine_ref(k))) continue;
      eng_used[m] = 1;
      mach_taken[k] = 1;
      x_cur.emplace_back(m, k);
      rec_x(qi + 1);
      x_cur.pop_back();
      mach_taken[k] = 0;
      eng_used[m] = 0;
    }
  };
  rec_x(0);
  return actions;
}

DiscreteState apply_discrete_action(const DiscreteInstance& inst,
                                    const DiscreteState& s,
                                    const DiscreteAction& a) {
  DiscreteState post = s;
  auto retarget = [&](int m, int target) {
    auto& e = post.engineers[m];
    if (target == e.dest) return;
    e.d += inst.trav(e.dest, target);
    e.dest = target;
    if (e.d > inst.d_max) throw std::invalid_argument("move exceeds d_max");
  };
  for (auto [m, tgt] : a.redeploy) retarget(m, tgt);
  for (auto [m, k] : a.dispatch) retarget(m, inst.machine_ref(k));
  if (a.reloc_engineer >= 0) retarget(a.reloc_engineer, inst.base_ref(a.reloc_base));
  return post;
}

namespace {

// Deterministic clock update given the sampled breakdown/repair sets.
DiscreteState clock_update(const DiscreteInstance& inst, const DiscreteState& post,
                           std::uint32_t k1, std::uint32_t k2) {
  DiscreteState next = post;
  next.k1 = k1;
  next.k2 = k2;
  next.ma = 0;

  for (size_t m = 0; m < next.engineers.size(); ++m) {
    auto& e = next.engineers[m];
    const bool at_machine = !inst.is_base(e.dest);
    if (at_machine && post.machines[e.dest] == dstatus::kInRepair)
      continue;  // repairing; freed via k2 below
    if (at_machine && !dstatus::is_waiting(post.machines[e.dest])) {
      // Destination machine is working: only possible for an engineer whose
      // repair just finished (stays put until redeployed by the next action).
      continue;
    }
    if (e.d > 0) {
      --e.d;
      if (e.d == 0) next.ma |= 1u << m;
    } else if (at_machine) {
      next.ma |= 1u << m;  // zero-distance dispatch arrives now
    }
  }

  for (int k = 0; k < inst.K; ++k) {
    const int st = post.machines[k];
    if (k2 >> k & 1u) {
      next.machines[k] = dstatus::kWorking;
    } else if (k1 >> k & 1u) {
      next.machines[k] = dstatus::waiting(0);
    } else if (dstatus::is_waiting(st)) {
      bool arrives = false;
      for (size_t m = 0; m < next.engineers.size(); ++m)
        if ((next.ma >> m & 1u) && next.engineers[m].dest == inst.machine_ref(k))
          arrives = true;
      if (arrives)
        next.machines[k] = dstatus::kInRepair;
      else
        next.machines[k] = dstatus::waiting(std::min(dstatus::waited(st) + 1,
                                                     inst.t_star));
    }
  }
  return next;
}

}  // namespace

double stage_cost(const DiscreteInstance& inst, const DiscreteState& from,
                  const DiscreteState& to) {
  const int sat = dstatus::waiting(inst.t_star);
  double cost = 0.0;
  for (int k = 0; k < inst.K; ++k) {
    if (to.machines[k] == sat && from.machines[k] != sat) cost += 1.0;
    if (from.machines[k] == sat) cost += inst.epsilon;
  }
  return cost;
}

std::vector<DiscreteTransition> transition_distribution(
    const DiscreteInstance& inst, const DiscreteState& s,
    const DiscreteAction& a) {
  const DiscreteState post = apply_discrete_action(inst, s, a);
  std::vector<int> working, in_repair;
  for (int k = 0; k < inst.K; ++k) {
    if (post.machines[k] == dstatus::kWorking) working.push_back(k);
    if (post.machines[k] == dstatus::kInRepair) in_repair.push_back(k);
  }
  const double p = inst.p_break();
  const double q = inst.q_repair();
  std::vector<DiscreteTransition> out;
  out.reserve((size_t{1} << working.size()) << in_repair.size());
  for (std::uint32_t b = 0; b < (1u << working.size()); ++b) {
    std::uint32_t k1 = 0;
    double pb = 1.0;
    for (size_t i = 0; i < working.size(); ++i)
      if (b >> i & 1u) {
        k1 |= 1u << working[i];
        pb *= p;
      } else {
        pb *= 1.0 - p;
      }
    for (std::uint32_t c = 0; c < (1u << in_repair.size()); ++c) {
      std::uint32_t k2 = 0;
      double pq = pb;
      for (size_t i = 0; i < in_repair.size(); ++i)
        if (c >> i & 1u) {
          k2 |= 1u << in_repair[i];
          pq *= q;
        } else {
          pq *= 1.0 - q;
        }
      DiscreteTransition tr;
      tr.next = clock_update(inst, post, k1, k2);
      tr.prob = pq;
      tr.cost = stage_cost(inst, post, tr.next);
      out.push_back(std::move(tr));
    }
  }
  return out;
}

namespace {
std::uint64_t bucket_of(StateKey key) {
  return static_cast<std::uint64_t>(key) ^
         static_cast<std::uint64_t>(key >> 64) * 0x9e3779b97f4a7c15ULL;
}
}  // namespace

int DiscreteModel::index_of(const DiscreteState& s) const {
  const auto it = index_.find(bucket_of(encode_state(instance, s)));
  if (it == index_.end()) return -1;
  for (int idx : it->second)
    if (states[idx] == s) return idx;
  return -1;
}

DiscreteModel enumerate_states(const DiscreteInstance& inst) {
  inst.validate();
  DiscreteModel model;
  model.instance = inst;
  auto intern = [&](const DiscreteState& s) {
    const StateKey key = encode_state(inst, s);
    auto& bucket = model.index_[bucket_of(key)];
    for (int idx : bucket)
      if (model.states[idx] == s) return idx;
    const int idx = static_cast<int>(model.states.size());
    model.states.push_back(s);
    bucket.push_back(idx);
    if (static_cast<long>(model.states.size()) > inst.state_cap)
      throw std::runtime_error(
          "state cap exceeded: more than " + std::to_string(inst.state_cap) +
          " reachable states");
    return idx;
  };

  intern(initial_discrete_state(inst));
  for (size_t si = 0; si < model.states.size(); ++si) {
    const DiscreteState s = model.states[si];  // copy: vector may reallocate
    auto acts = legal_actions_discrete(inst, s);
    model.actions.push_back(acts);
    model.table.transitions.emplace_back();
    auto& per_action = model.table.transitions.back();
    per_action.resize(acts.size());
    for (size_t ai = 0; ai < acts.size(); ++ai) {
      auto trs = transition_distribution(inst, s, acts[ai]);
      per_action[ai].reserve(trs.size());
      for (auto& tr : trs)
        per_action[ai].push_back({intern(tr.next), tr.prob, tr.cost});
    }
  }
  return model;
}

PolicyIterationResult policy_iteration(const TabularMDP& mdp, double gamma,
                                       double eval_tol, int max_iterations) {
  const int n = mdp.num_states();
  PolicyIterationResult res;
  res.policy.assign(n, 0);
  res.values.assign(n, 0.0);

  auto evaluate = [&](double tol) {
    // Gauss-Seidel sweeps on V = c_pi + gamma P_pi V.
    for (long sweep = 0; sweep < 2000000; ++sweep) {
      double change = 0.0;
      for (int s = 0; s < n; ++s) {
        const auto& arcs = mdp.transitions[s][res.policy[s]];
        double v = 0.0;
        for (const auto& arc : arcs)
          v += arc.prob * (arc.cost + gamma * res.values[arc.next]);
        change = std::max(change, std::fabs(v - res.values[s]));
        res.values[s] = v;
      }
      if (change < tol) break;
    }
  };

  for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
    evaluate(eval_tol);
    bool stable = true;
    for (int s = 0; s < n; ++s) {
      const auto& acts = mdp.transitions[s];
      int best = res.policy[s];
      double best_q = std::numeric_limits<double>::infinity();
      for (size_t a = 0; a < acts.size(); ++a) {
        double qv = 0.0;
        for (const auto& arc : acts[a])
          qv += arc.prob * (arc.cost + gamma * res.values[arc.next]);
        if (qv < best_q - 1e-12) {
          best_q = qv;
          best = static_cast<int>(a);
        }
      }
      if (best != res.policy[s]) {
        res.policy[s] = best;
        stable = false;
      }
    }
    if (stable) break;
  }
  evaluate(1e-13);  // tight final evaluation for residual checks
  return res;
}

std::vector<double> value_iteration(const TabularMDP& mdp, double gamma,
                                    double tol, long max_sweeps) {
  const int n = mdp.num_states();
  std::vector<double> v(n, 0.0);
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& arcs : mdp.transitions[s]) {
        double qv = 0.0;
        for (const auto& arc : arcs)
          qv += arc.prob * (arc.cost + gamma * v[arc.next]);
        best = std::min(best, qv);
      }
      change = std::max(change, std::fabs(best - v[s]));
      v[s] = best;
    }
    if (change < tol) break;
  }
  return v;
}

double max_bellman_residual(const TabularMDP& mdp, double gamma,
                            const std::vector<double>& values) {
  double res = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& arcs : mdp.transitions[s]) {
      double qv = 0.0;
      for (const auto& arc : arcs)
        qv += arc.prob * (arc.cost + gamma * values[arc.next]);
      best = std::min(best, qv);
    }
    res = std::max(res, std::fabs(best - values[s]));
  }
  return res;
}

DiscreteSimResult simulate_discrete(const DiscreteModel& model,
                                    const DiscretePolicyFn& policy,
                                    long horizon_steps, int runs,
                                    std::uint64_t seed) {
  const auto& inst = model.instance;
  DiscreteSimResult result;
  result.fractions.reserve(runs);
  for (int run = 0; run < runs; ++run) {
    std::mt19937_64 rng(mix_seed(seed, 0xd15c, run));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DiscreteState s = initial_discrete_state(inst);
    int s_idx = model.index_of(s);
    long on_time = 0, total = 0;
    std::vector<long> call_step(inst.K, -1);
    std::vector<char> determined(inst.K, 1);
    const int sat = dstatus::waiting(inst.t_star);

    for (long step = 0; step < horizon_steps; ++step) {
      if (s_idx < 0) throw std::runtime_error("state outside policy domain");
      const DiscreteAction a = policy(s_idx, s);
      const DiscreteState post = apply_discrete_action(inst, s, a);
      std::uint32_t k1 = 0, k2 = 0;
      for (int k = 0; k < inst.K; ++k) {
        if (post.machines[k] == dstatus::kWorking &&
            unit(rng) < inst.p_break())
          k1 |= 1u << k;
        else if (post.machines[k] == dstatus::kInRepair &&
                 unit(rng) < inst.q_repair())
          k2 |= 1u << k;
      }
      DiscreteState next = clock_update(inst, post, k1, k2);
      for (int k = 0; k < inst.K; ++k) {
        if (k1 >> k & 1u) {
          call_step[k] = step + 1;
          determined[k] = 0;
        }
        if (dstatus::is_waiting(post.machines[k]) &&
            next.machines[k] == dstatus::kInRepair && !determined[k]) {
          determined[k] = 1;
          ++total;
          if (step + 1 - call_step[k] <= inst.t_star) ++on_time;
        }
        if (next.machines[k] == sat && post.machines[k] != sat &&
            !determined[k]) {
          determined[k] = 1;
          ++total;  // late
        }
      }
      s = std::move(next);
      s_idx = model.index_of(s);
    }
    result.fractions.push_back(total == 0 ? 1.0
                                          : static_cast<double>(on_time) /
                                                static_cast<double>(total));
  }
  for (double f : result.fractions) result.mean += f;
  result.mean /= std::max<size_t>(1, result.fractions.size());
  return result;
}

double evaluate_policy_by_simulation(const DiscreteModel& model,
                                     const std::vector<int>& policy,
                                     long horizon_steps, int runs,
                                     std::uint64_t seed) {
  auto fn = [&](int idx, const DiscreteState&) {
    return model.actions[idx][policy[idx]];
  };
  return simulate_discrete(model, fn, horizon_steps, runs, seed).mean;
}

DiscreteAction heuristic_dp4_rp5_action(const DiscreteInstance& inst,
                                        const CoverageModel& cov,
                                        const RP5Restrictions& restr,
                                        double alpha, const DiscreteState& s) {
  const auto freed = freed_engineers(inst, s);
  const auto idle = idle_engineers_d(inst, s);
  auto queue = discrete_queue(inst, s);
  const double t_rep = -std::log(1.0 - alpha) / inst.mu;

  // Longest-waiting queued machines first, ties by index.
  std::stable_sort(queue.begin(), queue.end(), [&](int a, int b) {
    return dstatus::waited(s.machines[a]) > dstatus::waited(s.machines[b]);
  });

  DiscreteAction action;
  std::vector<char> used(s.engineers.size(), 0);
  std::vector<char> taken(inst.K, 0);

  auto response = [&](int m, int k) {
    const auto& e = s.engineers[m];
    const bool is_freed =
        std::find(freed.begin(), freed.end(), m) != freed.end();
    if (inst.is_base(e.dest) || is_freed)  // no repair ahead of the trip
      return e.d + static_cast<double>(inst.trav(e.dest, inst.machine_ref(k)));
    return e.d + t_rep +
           static_cast<double>(inst.trav(e.dest, inst.machine_ref(k)));
  };

  // Dispatch decisions: send the minimal-response engineer when it is idle
  // and free; otherwise the call waits for the busy winner.
  for (int k : queue) {
    int best = -1;
    double best_rt = std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < s.engineers.size(); ++m) {
      if (used[m]) continue;
      const double rt = response(static_cast<int>(m), k);
      if (rt < best_rt) {
        best_rt = rt;
        best = static_cast<int>(m);
      }
    }
    if (best < 0) continue;
    const bool best_idle = inst.is_base(s.engineers[best].dest);
    const bool best_freed =
        std::find(freed.begin(), freed.end(), best) != freed.end();
    if (best_idle && move_ok(inst, s.engineers[best], inst.machine_ref(k))) {
      action.dispatch.emplace_back(best, k);
      used[best] = 1;
      taken[k] = 1;
    } else if (best_freed &&
               move_ok(inst, s.engineers[best], inst.machine_ref(k))) {
      action.redeploy.emplace_back(best, inst.machine_ref(k));
      used[best] = 1;
      taken[k] = 1;
    }
  }
  // Canonical order (matching the action enumeration): dispatches by machine,
  // redeployments by engineer.
  std::sort(action.dispatch.begin(), action.dispatch.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::sort(action.redeploy.begin(), action.redeploy.end());

  // Remaining freed engineers: DMEXCLP redeployment over working machines.
  std::vector<int> working;
  for (int k = 0; k < inst.K; ++k)
    if (s.machines[k] == dstatus::kWorking) working.push_back(k);
  auto total_demand = [&](const std::vector<int>& dests) {
    double total = 0.0;
    std::vector<int> dist;
    for (int k : working) {
      dist.clear();
      for (int dloc : dests) dist.push_back(inst.trav(dloc, inst.machine_ref(k)));
      std::sort(dist.begin(), dist.end());
      for (size_t i = 0; i < dist.size() && i < cov.p_ith.size(); ++i) {
        if (dist[i] > inst.t_star) break;
        total += cov.p_ith[i];
      }
    }
    return total;
  };
  auto idle_dests = [&](int skip) {
    std::vector<int> dests;
    for (int m : idle)
      if (m != skip && !used[m]) dests.push_back(s.engineers[m].dest);
    return dests;
  };

  for (int m : freed) {
    if (used[m]) continue;
    const int from = s.engineers[m].dest;
    std::vector<int> candidates;
    for (int r = 0; r < inst.R; ++r)
      if (inst.trav(from, inst.base_ref(r)) <= restr.max_redeploy_dist)
        candidates.push_back(r);
    if (candidates.empty())
      for (int r = 0; r < inst.R; ++r) candidates.push_back(r);
    int best_r = candidates.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (int r : candidates) {
      auto dests = idle_dests(-1);
      dests.push_back(inst.base_ref(r));
      const double score = total_demand(dests);
      if (score > best_score + 1e-12) {
        best_score = score;
        best_r = r;
      }
    }
    action.redeploy.emplace_back(m, inst.base_ref(best_r));
    used[m] = 1;
  }
  std::sort(action.redeploy.begin(), action.redeploy.end());

  // On-dispatch relocation when an idle engineer went to a newly broken
  // machine (the DMEXCLP pair rule with the distance/improvement caps).
  bool to_new_break = false;
  for (auto [m, k] : action.dispatch)
    if (s.k1 >> k & 1u) to_new_break = true;
  if (to_new_break) {
    std::vector<int> occ(inst.R, 0);
    for (int m : idle)
      if (!used[m]) ++occ[s.engineers[m].dest - inst.K];
    const double current = total_demand(idle_dests(-1));
    double best_gain = -std::numeric_limits<double>::infinity();
    int best_r1 = -1, best_r2 = -1;
    for (int r1 = 0; r1 < inst.R; ++r1) {
      if (occ[r1] == 0) continue;
      for (int r2 = 0; r2 < inst.R; ++r2) {
        if (r2 == r1) continue;
        if (inst.trav(inst.base_ref(r1), inst.base_ref(r2)) >
            restr.max_reloc_dist)
          continue;
        auto dests = idle_dests(-1);
        for (auto& dloc : dests)
          if (dloc == inst.base_ref(r1)) {
            dloc = inst.base_ref(r2);
            break;
          }
        const double gain = total_demand(dests) - current;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_r1 = r1;
          best_r2 = r2;
        }
      }
    }
    if (best_r1 >= 0 && best_gain > restr.min_improvement) {
      for (int m : idle) {
        if (used[m] || s.engineers[m].dest != inst.base_ref(best_r1)) continue;
        if (!move_ok(inst, s.engineers[m], inst.base_ref(best_r2))) continue;
        action.reloc_engineer = m;
        action.reloc_base = best_r2;
        break;
      }
    }
  }
  return action;
}

DiscreteInstance benchmark_instance() {
  DiscreteInstance inst;
  inst.K = 4;
  inst.R = 2;
  inst.M = 2;
  inst.t_star = 3;
  inst.lambda = 0.01;
  inst.mu = 1.0;
  inst.allocation = {1, 1};
  // Locations k0..k3, b0, b1; b0 sits on k0 and b1 on k2.
  inst.travel = {
      0, 1, 4, 4, 0, 4,  // k0
      1, 0, 4, 4, 1, 4,  // k1
      4, 4, 0, 1, 4, 0,  // k2
      4, 4, 1, 0, 4, 1,  // k3
      0, 1, 4, 4, 0, 4,  // b0
      4, 4, 0, 1, 4, 0,  // b1
  };
  inst.d_max = 8;
  inst.validate();
  return inst;
}

void save_policy_dump(const DiscreteModel& model,
                      const PolicyIterationResult& result,
                      const std::string& path_prefix) {
  const std::string bin_path = path_prefix + ".bin";
  std::ofstream bin(bin_path, std::ios::binary);
  const std::uint64_t n = model.states.size();
  bin.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int a : result.policy) {
    const std::int32_t v = a;
    bin.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (double v : result.values)
    bin.write(reinterpret_cast<const char*>(&v), sizeof(v));

  nlohmann::json j;
  j["num_states"] = n;
  j["iterations"] = result.iterations;
  j["binary"] = bin_path;
  j["layout"] = "u64 count, i32 policy[count], f64 values[count]";
  std::ofstream idx(path_prefix + ".json");
  idx << j.dump(2) << "\n";
}

}  // namespace seng
