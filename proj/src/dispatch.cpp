#include "seng/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seng {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string dp_name(DPKind kind) {
  switch (kind) {
    case DPKind::DP1: return "dp1";
    case DPKind::DP2: return "dp2";
    case DPKind::DP3: return "dp3";
    case DPKind::DP4: return "dp4";
    case DPKind::DP5: return "dp5";
  }
  return "?";
}

DPKind dp_from_name(const std::string& name) {
  if (name == "dp1") return DPKind::DP1;
  if (name == "dp2") return DPKind::DP2;
  if (name == "dp3") return DPKind::DP3;
  if (name == "dp4") return DPKind::DP4;
  if (name == "dp5") return DPKind::DP5;
  throw std::invalid_argument("unknown dispatch policy: " + name);
}

double response_time_idle(const NetworkMap& map, const SystemState& state,
                          int engineer, int machine) {
  const auto& e = state.engineers[engineer];
  return e.remaining + map.travel(e.dest, map.machine_ref(machine));
}

DispatchDecision dp1_closest(const NetworkMap& map, const SystemState& state,
                             int machine) {
  const auto idle = state.idle_engineers(map);
  if (idle.empty()) return DispatchDecision::enqueue();
  int best = -1;
  double best_rt = kInf;
  for (int m : idle) {
    const double rt = response_time_idle(map, state, m, machine);
    if (rt < best_rt) {
      best_rt = rt;
      best = m;
    }
  }
  return DispatchDecision::dispatch(best);
}

namespace {

// Idle engineers that can reach the call in time, or all of them when none
// can.
std::vector<int> reachable_candidates(const NetworkMap& map,
                                      const SystemState& state, int machine,
                                      const std::vector<int>& idle) {
  std::vector<int> cands;
  for (int m : idle)
    if (response_time_idle(map, state, m, machine) <= map.t_star())
      cands.push_back(m);
  if (cands.empty()) return idle;
  return cands;
}

// Shared candidate-scoring loop for DP2/DP3: maximize `score`, break ties by
// closeness to the call, then by index.
template <typename ScoreFn>
DispatchDecision best_by_remaining_score(const NetworkMap& map,
                                         const SystemState& state, int machine,
                                         ScoreFn score) {
  const auto idle = state.idle_engineers(map);
  if (idle.empty()) return DispatchDecision::enqueue();
  const auto cands = reachable_candidates(map, state, machine, idle);
  int best = -1;
  double best_score = -kInf;
  double best_rt = kInf;
  for (int m : cands) {
    const double sc = score(m, idle);
    const double rt = response_time_idle(map, state, m, machine);
    if (sc > best_score + 1e-12 ||
        (sc > best_score - 1e-12 && rt < best_rt - 1e-12)) {
      best_score = std::max(sc, best_score);
      best_rt = rt;
      best = m;
    }
  }
  return DispatchDecision::dispatch(best);
}

}  // namespace

DispatchDecision dp2_coverage(const NetworkMap& map, const SystemState& state,
                              int machine) {
  const auto working = state.working_machines();
  auto coverage = [&](int m, const std::vector<int>& idle) {
    int covered = 0;
    for (int k : working) {
      for (int n : idle) {
        if (n == m) continue;
        if (map.travel(state.engineers[n].dest, map.machine_ref(k)) <=
            map.t_star()) {
          ++covered;
          break;
        }
      }
    }
    return static_cast<double>(covered);
  };
  return best_by_remaining_score(map, state, machine, coverage);
}

DispatchDecision dp3_expected_coverage(const NetworkMap& map,
                                       const SystemState& state, int machine,
                                       const CoverageModel& model) {
  const auto working = state.working_machines();
  auto remaining_demand = [&](int m, const std::vector<int>& idle) {
    std::vector<LocRef> positions;
    positions.reserve(idle.size());
    for (int n : idle)
      if (n != m) positions.push_back(state.engineers[n].dest);
    return total_covered_demand(map, positions, model.p_ith, working);
  };
  return best_by_remaining_score(map, state, machine, remaining_demand);
}

DispatchDecision min_response(const NetworkMap& map, const SystemState& state,
                              int machine, DPKind mode, double alpha,
                              double mu) {
  if (mode != DPKind::DP4 && mode != DPKind::DP5)
    throw std::invalid_argument("min_response requires DP4 or DP5");
  const double estimate = -std::log(1.0 - alpha) / mu;
  int best = -1;
  double best_rt = kInf;
  bool best_idle = false;
  for (size_t m = 0; m < state.engineers.size(); ++m) {
    const auto& e = state.engineers[m];
    double rt;
    const bool idle = map.is_base(e.dest);
    if (idle) {
      rt = e.remaining + map.travel(e.dest, map.machine_ref(machine));
    } else {
      double t_repair;
      if (mode == DPKind::DP4) {
        t_repair = estimate;
      } else {
        // Known repair time: the live countdown once repairing, the full
        // sampled duration while still traveling to the machine.
        t_repair = e.repairing ? e.repair_completion - state.t
                               : e.repair_duration;
      }
      rt = e.remaining + t_repair + map.travel(e.dest, map.machine_ref(machine));
    }
    if (rt < best_rt) {
      best_rt = rt;
      best = static_cast<int>(m);
      best_idle = idle;
    }
  }
  if (best < 0) return DispatchDecision::enqueue();
  return best_idle ? DispatchDecision::dispatch(best)
                   : DispatchDecision::enqueue_committed(best);
}

std::unique_ptr<DispatchPolicy> make_dispatch_policy(
    const DispatchPolicyConfig& config, const CoverageModel* model, double mu) {
  switch (config.kind) {
    case DPKind::DP1:
      return std::make_unique<ClosestDispatch>();
    case DPKind::DP2:
      return std::make_unique<CoverageDispatch>();
    case DPKind::DP3:
      if (!model) throw std::invalid_argument("dp3 needs a coverage model");
      return std::make_unique<ExpectedCoverageDispatch>(*model);
    case DPKind::DP4:
      return std::make_unique<MinResponseDispatch>(false, config.alpha, mu);
    case DPKind::DP5:
      return std::make_unique<MinResponseDispatch>(true, config.alpha, mu);
  }
  throw std::invalid_argument("unknown dispatch policy kind");
}

}  // namespace seng
