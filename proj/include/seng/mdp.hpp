#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "seng/coverage.hpp"
#include "seng/network.hpp"
#include "seng/relocate.hpp"

namespace seng {

// Discrete-time instance: integer travel times, unit time steps, waiting
// clocks saturating at t_star.
struct DiscreteInstance {
  int K = 0;
  int R = 0;
  int M = 0;
  std::vector<int> travel;  // (K+R)^2 row-major
  int t_star = 1;
  double lambda = 0.01;
  double mu = 1.0;
  double gamma = 0.99;
  double epsilon = 0.001;
  std::vector<int> allocation;  // initial engineers per base
  int d_max = 0;                // cap on remaining-travel values
  long state_cap = 5'000'000;

  int trav(int a, int b) const { return travel[a * (K + R) + b]; }
  int machine_ref(int k) const { return k; }
  int base_ref(int r) const { return K + r; }
  bool is_base(int l) const { return l >= K; }
  double p_break() const;   // 1 - exp(-lambda)
  double q_repair() const;  // 1 - exp(-mu)
  void validate() const;

  // Rounds the map's travel times half-up to integers; d_max defaults to
  // twice the largest entry (one mid-travel redirect from anywhere).
  static DiscreteInstance from_map(const NetworkMap& map, int M, double lambda,
                                   double mu, int t_star,
                                   std::vector<int> allocation);
};

// Machine status encoding: 0 working, 1 in repair, 2+w waiting for w whole
// time units (w saturates at t_star).
namespace dstatus {
constexpr int kWorking = 0;
constexpr int kInRepair = 1;
inline int waiting(int w) { return 2 + w; }
inline bool is_waiting(int v) { return v >= 2; }
inline int waited(int v) { return v - 2; }
}  // namespace dstatus

struct DiscreteEngineer {
  int dest = 0;  // LocRef in the instance
  int d = 0;
  bool operator==(const DiscreteEngineer&) const = default;
};

struct DiscreteState {
  std::uint32_t k1 = 0;  // machines broken during the last step
  std::uint32_t k2 = 0;  // machines repaired during the last step
  std::uint32_t ma = 0;  // engineers arrived during the last step
  std::vector<DiscreteEngineer> engineers;
  std::vector<int> machines;  // dstatus encoding
  bool operator==(const DiscreteState&) const = default;
};

using StateKey = unsigned __int128;
StateKey encode_state(const DiscreteInstance& inst, const DiscreteState& s);

DiscreteState initial_discrete_state(const DiscreteInstance& inst);

struct DiscreteAction {
  std::vector<std::pair<int, int>> dispatch;  // X: (idle engineer, machine)
  std::vector<std::pair<int, int>> redeploy;  // Y: (freed engineer, LocRef)
  int reloc_engineer = -1;                    // Z
  int reloc_base = -1;
  bool operator==(const DiscreteAction&) const = default;
};

// Queue of the discrete model: waiting machines with no engineer en route.
std::vector<int> discrete_queue(const DiscreteInstance& inst,
                                const DiscreteState& s);

// All (X, Y, Z) combinations: at most one engineer per queued machine, every
// just-freed engineer redeployed to exactly one location, at most one
// relocation (of a non-dispatched idle engineer) and only when an engineer
// was dispatched to a newly broken machine or a repair finished. Moves that
// would push a remaining-travel value beyond d_max are not offered.
std::vector<DiscreteAction> legal_actions_discrete(const DiscreteInstance& inst,
                                                   const DiscreteState& s);

// Engineer retargeting of the action; machine states are untouched.
DiscreteState apply_discrete_action(const DiscreteInstance& inst,
                                    const DiscreteState& s,
                                    const DiscreteAction& a);

// Unit-penalty for every machine entering the saturated waiting state plus
// epsilon per machine already saturated in `from`.
double stage_cost(const DiscreteInstance& inst, const DiscreteState& from,
                  const DiscreteState& to);

struct DiscreteTransition {
  DiscreteState next;
  double prob = 0.0;
  double cost = 0.0;
};

// Product law over breakdown and repair-completion subsets with the
// deterministic clock update.
std::vector<DiscreteTransition> transition_distribution(
    const DiscreteInstance& inst, const DiscreteState& s,
    const DiscreteAction& a);

// Generic finite MDP (minimization).
struct TabularMDP {
  struct Arc {
    int next = 0;
    double prob = 0.0;
    double cost = 0.0;
  };
  std::vector<std::vector<std::vector<Arc>>> transitions;  // [state][action]
  int num_states() const { return static_cast<int>(transitions.size()); }
};

struct DiscreteModel {
  DiscreteInstance instance;
  std::vector<DiscreteState> states;
  std::vector<std::vector<DiscreteAction>> actions;
  TabularMDP table;

  int index_of(const DiscreteState& s) const;  // -1 when unknown

  std::unordered_map<std::uint64_t, std::vector<int>> index_;  // key-hash buckets
};

// Reachability closure from the initial state under all legal actions;
// aborts when the cap is exceeded.
DiscreteModel enumerate_states(const DiscreteInstance& inst);

struct PolicyIterationResult {
  std::vector<int> policy;  // action index per state
  std::vector<double> values;
  int iterations = 0;
};

// Exact policy iteration: iterative (Gauss-Seidel) evaluation, greedy
// improvement with lowest-action-index tie-break, plus a tight final
// evaluation pass.
PolicyIterationResult policy_iteration(const TabularMDP& mdp, double gamma,
                                       double eval_tol = 1e-9,
                                       int max_iterations = 500);

std::vector<double> value_iteration(const TabularMDP& mdp, double gamma,
                                    double tol = 1e-10,
                                    long max_sweeps = 1000000);

double max_bellman_residual(const TabularMDP& mdp, double gamma,
                            const std::vector<double>& values);

// Simulation of the discrete chain under a policy; returns per-run on-time
// fractions. The policy must cover every visited state.
struct DiscreteSimResult {
  std::vector<double> fractions;
  double mean = 0.0;
};

using DiscretePolicyFn =
    std::function<DiscreteAction(int state_index, const DiscreteState&)>;

DiscreteSimResult simulate_discrete(const DiscreteModel& model,
                                    const DiscretePolicyFn& policy,
                                    long horizon_steps, int runs,
                                    std::uint64_t seed);

double evaluate_policy_by_simulation(const DiscreteModel& model,
                                     const std::vector<int>& policy,
                                     long horizon_steps, int runs,
                                     std::uint64_t seed);

// Minimal-response dispatching with DMEXCLP-style relocation, adapted to the
// discrete action space; used as the heuristic side of the optimal-policy
// benchmark.
DiscreteAction heuristic_dp4_rp5_action(const DiscreteInstance& inst,
                                        const CoverageModel& cov,
                                        const RP5Restrictions& restr,
                                        double alpha, const DiscreteState& s);

// Binary value/policy dump plus a small JSON index next to it.
void save_policy_dump(const DiscreteModel& model,
                      const PolicyIterationResult& result,
                      const std::string& path_prefix);

// Two clustered base/machine pairs plus one extra machine per cluster;
// cross-cluster trips take longer than t_star, so dispatching across is
// always late. Used by the optimal-policy benchmark (lambda=0.01, mu=1,
// t_star=3, one engineer per base).
DiscreteInstance benchmark_instance();

}  // namespace seng
