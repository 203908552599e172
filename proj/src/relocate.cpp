#include "seng/relocate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seng/ilp.hpp"
#include "seng/util.hpp"

namespace seng {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string rp_name(RPKind kind) {
  switch (kind) {
    case RPKind::RP1: return "rp1";
    case RPKind::RP2: return "rp2";
    case RPKind::RP3: return "rp3";
    case RPKind::RP4: return "rp4";
    case RPKind::RP5: return "rp5";
  }
  return "?";
}

RPKind rp_from_name(const std::string& name) {
  if (name == "rp1") return RPKind::RP1;
  if (name == "rp2") return RPKind::RP2;
  if (name == "rp3") return RPKind::RP3;
  if (name == "rp4") return RPKind::RP4;
  if (name == "rp5") return RPKind::RP5;
  throw std::invalid_argument("unknown relocation policy: " + name);
}

namespace {

// Idle engineers counted at their destination bases.
std::vector<int> idle_occupancy(const NetworkMap& map, const SystemState& state,
                                const std::vector<int>& idle, int exclude) {
  std::vector<int> occ(map.num_bases(), 0);
  for (int m : idle)
    if (m != exclude) ++occ[map.base_index(state.engineers[m].dest)];
  return occ;
}

}  // namespace

RelocationDecision apply_compliance_table(const NetworkMap& map,
                                          const SystemState& state,
                                          const ComplianceTable& table,
                                          int exclude_engineer) {
  auto idle = state.idle_engineers(map);
  if (exclude_engineer >= 0)
    idle.erase(std::remove(idle.begin(), idle.end(), exclude_engineer),
               idle.end());
  const int level = static_cast<int>(idle.size());
  if (level == 0) return RelocationDecision::none();
  if (level > table.num_levels())
    throw std::invalid_argument("compliance table has no level " +
                                std::to_string(level));
  const auto& target = table.levels[level - 1];
  const auto occ = idle_occupancy(map, state, idle, -1);

  // Ascending (r1, r2, engineer) scan with strict improvement keeps the
  // lexicographically first move among equal travel times.
  int best_e = -1, best_r2 = -1;
  double best_time = kInf;
  for (int r1 = 0; r1 < map.num_bases(); ++r1) {
    if (occ[r1] <= target[r1]) continue;  // no surplus here
    for (int r2 = 0; r2 < map.num_bases(); ++r2) {
      if (occ[r2] >= target[r2]) continue;  // no deficit here
      for (int m : idle) {
        if (state.engineers[m].dest != map.base_ref(r1)) continue;
        const double time = state.engineers[m].remaining +
                            map.travel(map.base_ref(r1), map.base_ref(r2));
        if (time < best_time - 1e-12) {
          best_time = time;
          best_r2 = r2;
          best_e = m;
        }
      }
    }
  }
  if (best_e < 0) return RelocationDecision::none();
  return RelocationDecision::move(best_e, best_r2);
}

int compliance_redeploy_base(const NetworkMap& map, const SystemState& state,
                             const ComplianceTable& table, int engineer,
                             int machine) {
  const auto idle = state.idle_engineers(map);
  const int level = static_cast<int>(idle.size()) + 1;  // engineer joins
  if (level > table.num_levels())
    throw std::invalid_argument("compliance table has no level " +
                                std::to_string(level));
  const auto& target = table.levels[level - 1];
  const auto occ = idle_occupancy(map, state, idle, engineer);
  int best = -1;
  double best_time = kInf;
  for (int r = 0; r < map.num_bases(); ++r) {
    if (occ[r] >= target[r]) continue;
    const double time = map.travel(map.machine_ref(machine), map.base_ref(r));
    if (time < best_time - 1e-12) {
      best_time = time;
      best = r;
    }
  }
  // A deficit base always exists: the target places one more engineer than
  // are currently idle.
  if (best < 0) throw std::logic_error("no deficit base at redeploy");
  return best;
}

int dmexclp_redeploy(const NetworkMap& map, const SystemState& state,
                     const std::vector<double>& p_ith, int engineer,
                     int machine, const RP5Restrictions& restr) {
  const auto idle = state.idle_engineers(map);
  const auto working = state.working_machines();
  std::vector<int> candidates;
  for (int r = 0; r < map.num_bases(); ++r)
    if (map.travel(map.machine_ref(machine), map.base_ref(r)) <=
        restr.max_redeploy_dist)
      candidates.push_back(r);
  if (candidates.empty())
    for (int r = 0; r < map.num_bases(); ++r) candidates.push_back(r);

  std::vector<LocRef> positions;
  positions.reserve(idle.size() + 1);
  for (int m : idle)
    if (m != engineer) positions.push_back(state.engineers[m].dest);
  positions.push_back(0);  // slot for the candidate base

  int best = -1;
  double best_score = -kInf;
  for (int r : candidates) {
    positions.back() = map.base_ref(r);
    const double score = total_covered_demand(map, positions, p_ith, working);
    if (score > best_score + 1e-12) {
      best_score = score;
      best = r;
    }
  }
  return best;
}

RelocationDecision dmexclp_relocate_on_dispatch(
    const NetworkMap& map, const SystemState& state,
    const std::vector<double>& p_ith, int dispatched,
    const RP5Restrictions& restr) {
  auto idle = state.idle_engineers(map);
  idle.erase(std::remove(idle.begin(), idle.end(), dispatched), idle.end());
  if (idle.empty()) return RelocationDecision::none();
  const auto working = state.working_machines();
  const auto occ = idle_occupancy(map, state, idle, -1);

  std::vector<LocRef> positions;
  positions.reserve(idle.size());
  for (int m : idle) positions.push_back(state.engineers[m].dest);
  const double current = total_covered_demand(map, positions, p_ith, working);

  double best_gain = -kInf;
  int best_r1 = -1, best_r2 = -1;
  for (int r1 = 0; r1 < map.num_bases(); ++r1) {
    if (occ[r1] == 0) continue;
    // Reuse the position list: engineers at r1 are interchangeable here.
    int slot = -1;
    for (size_t i = 0; i < positions.size(); ++i)
      if (positions[i] == map.base_ref(r1)) {
        slot = static_cast<int>(i);
        break;
      }
    for (int r2 = 0; r2 < map.num_bases(); ++r2) {
      if (r2 == r1) continue;
      if (map.travel(map.base_ref(r1), map.base_ref(r2)) >
          restr.max_reloc_dist)
        continue;
      positions[slot] = map.base_ref(r2);
      const double gain =
          total_covered_demand(map, positions, p_ith, working) - current;
      positions[slot] = map.base_ref(r1);
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_r1 = r1;
        best_r2 = r2;
      }
    }
  }
  if (best_r1 < 0 || !(best_gain > restr.min_improvement))
    return RelocationDecision::none();
  for (int m : idle)
    if (state.engineers[m].dest == map.base_ref(best_r1))
      return RelocationDecision::move(m, best_r2);
  return RelocationDecision::none();  // unreachable
}

TuneResult tune_rp5(const std::vector<NetworkMap>& maps, int M,
                    const DispatchPolicyConfig& base_policy,
                    const SimConfig& sim, const TuneGrid& grid) {
  if (maps.empty()) throw std::invalid_argument("tune_rp5 needs maps");
  std::vector<RP5Restrictions> points;
  const double t_star = maps.front().t_star();
  for (double f1 : grid.dist_factors)
    for (double f2 : grid.dist_factors)
      for (double th : grid.thresholds)
        points.push_back({f1 * t_star, f2 * t_star, th});

  // Shared per-map setup: allocation and coverage model with the plug-in
  // mu-hat starting value.
  struct MapSetup {
    std::vector<int> allocation;
    CoverageModel model;
  };
  std::vector<MapSetup> setups(maps.size());
  for (size_t i = 0; i < maps.size(); ++i) {
    const auto& map = maps[i];
    const double mu_hat0 = 1.0 / (t_star + 1.0 / sim.mu);
    setups[i].model =
        CoverageModel::build(map.num_machines(), M, sim.lambda, mu_hat0);
    SolveOptions opts;
    opts.lex_min = false;
    IPSolution alloc_sol =
        solve(build_allocation_ilp(map, setups[i].model.p_ith, M), opts);
    setups[i].allocation = extract_allocation(map, alloc_sol, M);
  }

  std::vector<std::vector<double>> fractions(points.size(),
                                             std::vector<double>(maps.size()));
  const size_t tasks = points.size() * maps.size();
  parallel_for(tasks, [&](size_t task) {
    const size_t p = task / maps.size();
    const size_t i = task % maps.size();
    const auto& map = maps[i];
    SimConfig cfg = sim;
    cfg.t_star = map.t_star();
    cfg.seed = mix_seed(sim.seed, 0x7075e5, i);  // paired across grid points
    auto dp = make_dispatch_policy(base_policy, &setups[i].model, cfg.mu);
    DmexclpRelocation rp(setups[i].model.p_ith, points[p], "rp5");
    SimReport rep = run_simulation(map, setups[i].allocation, *dp, rp, cfg);
    fractions[p][i] = rep.fraction_on_time;
  });

  TuneResult result;
  result.log.reserve(points.size());
  double best_mean = -kInf;
  for (size_t p = 0; p < points.size(); ++p) {
    double mean = 0.0;
    for (double f : fractions[p]) mean += f;
    mean /= static_cast<double>(maps.size());
    result.log.push_back({points[p], mean});
    // Grid points are enumerated with ascending distances then thresholds, so
    // strict improvement keeps the smallest triple among ties.
    if (p == 0 || mean > best_mean + 1e-12) {
      best_mean = mean;
      result.best = points[p];
    }
  }
  return result;
}

}  // namespace seng
