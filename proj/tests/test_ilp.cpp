#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "seng/coverage.hpp"
#include "seng/ilp.hpp"
#include "seng/network.hpp"

using namespace seng;

namespace {

// Exhaustive enumeration over all integer boxes; the reference for solver
// exactness on small programs.
struct EnumResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> best;  // lexicographically smallest optimum
};

EnumResult enumerate_ip(const IntegerProgram& prog) {
  EnumResult res;
  const int n = static_cast<int>(prog.vars.size());
  std::vector<double> x(n);
  std::function<void(int)> rec = [&](int j) {
    if (j == n) {
      for (const auto& c : prog.constraints) {
        double lhs = 0.0;
        for (auto [v, coef] : c.coeffs) lhs += coef * x[v];
        if (c.rel == Rel::Le && lhs > c.rhs + 1e-9) return;
        if (c.rel == Rel::Ge && lhs < c.rhs - 1e-9) return;
        if (c.rel == Rel::Eq && std::fabs(lhs - c.rhs) > 1e-9) return;
      }
      double val = 0.0;
      for (int i = 0; i < n; ++i) val += prog.objective[i] * x[i];
      if (!res.feasible || val > res.value + 1e-12) {
        res.feasible = true;
        res.value = val;
        res.best = x;
      }
      // Enumeration ascends lexicographically: the first optimum found is
      // the lexicographically smallest.
      return;
    }
    for (int v = static_cast<int>(prog.vars[j].lb);
         v <= static_cast<int>(prog.vars[j].ub); ++v) {
      x[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return res;
}

NetworkMap line_map(std::vector<double> machine_x, std::vector<double> base_x,
                    double t_star) {
  std::vector<Location> machines, bases;
  for (size_t i = 0; i < machine_x.size(); ++i)
    machines.push_back({static_cast<int>(i), LocKind::Machine, machine_x[i], 0.0});
  for (size_t i = 0; i < base_x.size(); ++i)
    bases.push_back({static_cast<int>(i), LocKind::Base, base_x[i], 0.0});
  return NetworkMap(machines, bases, t_star);
}

}  // namespace

TEST_CASE("unconstrained box maximization") {
  IntegerProgram prog;
  prog.add_var("x", 0, 5, 1.0);
  auto sol = solve(prog);
  REQUIRE(sol.status == IPStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(5.0));
  CHECK(sol.assignment[0] == doctest::Approx(5.0));
}

TEST_CASE("infeasible bounds pair") {
  IntegerProgram prog;
  int x = prog.add_var("x", 0, 5, 1.0);
  prog.add_constraint({{x, 1.0}}, Rel::Ge, 3);
  prog.add_constraint({{x, 1.0}}, Rel::Le, 2);
  auto sol = solve(prog);
  CHECK(sol.status == IPStatus::Infeasible);
}

TEST_CASE("random programs match exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nvars(2, 8);
  std::uniform_int_distribution<int> nrows(1, 6);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> ub(1, 3);
  std::uniform_int_distribution<int> rel(0, 2);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    IntegerProgram prog;
    const int n = nvars(rng);
    for (int j = 0; j < n; ++j)
      prog.add_var("v" + std::to_string(j), 0, ub(rng), coef(rng));
    const int m = nrows(rng);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) {
        const int c = coef(rng);
        if (c != 0) row.emplace_back(j, static_cast<double>(c));
      }
      const int which = rel(rng);
      const Rel r = which == 0 ? Rel::Le : (which == 1 ? Rel::Ge : Rel::Eq);
      prog.add_constraint(std::move(row), r, coef(rng));
    }
    auto expect = enumerate_ip(prog);
    auto sol = solve(prog);
    if (!expect.feasible) {
      CHECK(sol.status == IPStatus::Infeasible);
      ++infeasible_seen;
      continue;
    }
    REQUIRE(sol.status == IPStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(expect.value).epsilon(1e-7));
    // Lexicographic tie-break: the assignment is the smallest optimum.
    for (int j = 0; j < n; ++j)
      CHECK(sol.assignment[j] == doctest::Approx(expect.best[j]).epsilon(1e-7));
  }
  CHECK(infeasible_seen > 0);  // the generator should cover both outcomes
}

TEST_CASE("allocation ilp shape and trivial instances") {
  NetworkMap map = line_map({0, 1, 2, 3}, {1.5}, 10.0);
  auto model = CoverageModel::build(4, 2, 0.01, 0.1);
  IntegerProgram prog = build_allocation_ilp(map, model.p_ith, 2);
  // R + K*M variables, K + 1 constraints.
  CHECK(prog.vars.size() == 1 + 4 * 2);
  CHECK(prog.constraints.size() == 4 + 1);
  auto sol = solve(prog);
  REQUIRE(sol.status == IPStatus::Optimal);
  auto counts = extract_allocation(map, sol, 2);
  CHECK(counts == std::vector<int>{2});  // single base takes everyone
}

TEST_CASE("allocation splits engineers over disjoint halves") {
  // Two bases each covering its own pair of machines.
  NetworkMap map = line_map({0, 1, 100, 101}, {0.5, 100.5}, 5.0);
  auto model = CoverageModel::build(4, 2, 0.01, 0.1);
  auto sol = solve(build_allocation_ilp(map, model.p_ith, 2));
  REQUIRE(sol.status == IPStatus::Optimal);
  auto counts = extract_allocation(map, sol, 2);
  CHECK(counts == std::vector<int>{1, 1});
}

TEST_CASE("allocation optimum equals enumeration of placements") {
  NetworkMap map = generate_map({5, 3, 1.0, 8.0, 31});
  const int M = 3;
  auto model = CoverageModel::build(5, M, 0.01, 0.08);
  auto sol = solve(build_allocation_ilp(map, model.p_ith, M));
  REQUIRE(sol.status == IPStatus::Optimal);

  // Brute force: every composition of M over 3 bases, scored directly.
  std::vector<int> working = {0, 1, 2, 3, 4};
  double best = -1.0;
  for (int a = 0; a <= M; ++a)
    for (int b = 0; a + b <= M; ++b) {
      const int c = M - a - b;
      std::vector<LocRef> pos;
      for (int i = 0; i < a; ++i) pos.push_back(map.base_ref(0));
      for (int i = 0; i < b; ++i) pos.push_back(map.base_ref(1));
      for (int i = 0; i < c; ++i) pos.push_back(map.base_ref(2));
      best = std::max(best, total_covered_demand(map, pos, model.p_ith, working));
    }
  CHECK(sol.objective_value == doctest::Approx(best).epsilon(1e-9));
}

namespace {

// Score a full compliance table the way the MCRP objective does.
double mcrp_table_value(const NetworkMap& map, const ComplianceTable& table,
                        const std::vector<double>& weights) {
  auto cover = coverage_sets(map);
  double total = 0.0;
  for (int m = 1; m <= table.num_levels(); ++m) {
    int covered = 0;
    for (int k = 0; k < map.num_machines(); ++k) {
      int reach = 0;
      for (int r : cover[k]) reach += table.levels[m - 1][r];
      if (reach > 0) ++covered;
    }
    total += weights[m - 1] * covered;
  }
  return total;
}

// All tables for M=2, R bases, obeying level sums and the one-arrival bound.
std::vector<ComplianceTable> all_two_level_tables(int R) {
  std::vector<ComplianceTable> tables;
  std::vector<std::vector<int>> level1, level2;
  std::function<void(int, int, std::vector<int>&, std::vector<std::vector<int>>&)>
      gen = [&](int r, int left, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
        if (r == R) {
          if (left == 0) out.push_back(cur);
          return;
        }
        for (int v = 0; v <= left; ++v) {
          cur.push_back(v);
          gen(r + 1, left - v, cur, out);
          cur.pop_back();
        }
      };
  std::vector<int> cur;
  gen(0, 1, cur, level1);
  gen(0, 2, cur, level2);
  for (const auto& l1 : level1)
    for (const auto& l2 : level2) {
      int arrivals = 0;
      for (int r = 0; r < R; ++r) arrivals += std::max(0, l1[r] - l2[r]);
      if (arrivals > 1) continue;
      ComplianceTable t;
      t.levels = {l1, l2};
      tables.push_back(t);
    }
  return tables;
}

}  // namespace

TEST_CASE("mcrp single level picks the best base") {
  NetworkMap map = line_map({0, 1, 2, 50}, {1.0, 50.0}, 3.0);
  std::vector<double> weights = {1.0};
  auto sol = solve(build_mcrp_ilp(map, weights, 1));
  REQUIRE(sol.status == IPStatus::Optimal);
  auto table = extract_compliance_table(sol, 1, 2);
  CHECK(table.levels[0] == std::vector<int>{1, 0});  // covers 3 of 4 machines
  CHECK(sol.objective_value == doctest::Approx(3.0));
}

TEST_CASE("mcrp two-level table matches exhaustive table enumeration") {
  NetworkMap map = generate_map({5, 3, 1.2, 6.0, 17});
  auto model = CoverageModel::build(5, 2, 0.02, 0.1);
  std::vector<double> weights = {model.p_busy[1], model.p_busy[0]};
  auto sol = solve(build_mcrp_ilp(map, weights, 2));
  REQUIRE(sol.status == IPStatus::Optimal);
  auto table = extract_compliance_table(sol, 2, 3);

  double best = -1.0;
  for (const auto& cand : all_two_level_tables(3))
    best = std::max(best, mcrp_table_value(map, cand, weights));
  CHECK(mcrp_table_value(map, table, weights) == doctest::Approx(best).epsilon(1e-9));
  CHECK(sol.objective_value == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("mcrp degenerate weights use only the full-idle level") {
  NetworkMap map = generate_map({4, 2, 1.0, 6.0, 3});
  // lambda -> 0: all mass on everyone-idle.
  std::vector<double> weights = {0.0, 1.0};
  auto sol = solve(build_mcrp_ilp(map, weights, 2));
  REQUIRE(sol.status == IPStatus::Optimal);
  auto table = extract_compliance_table(sol, 2, 2);
  auto cover = coverage_sets(map);
  int covered = 0;
  for (int k = 0; k < 4; ++k) {
    int reach = 0;
    for (int r : cover[k]) reach += table.levels[1][r];
    if (reach > 0) ++covered;
  }
  CHECK(sol.objective_value == doctest::Approx(covered));
}

namespace {

double mexcrp_table_value(const NetworkMap& map, const ComplianceTable& table,
                          const std::vector<std::vector<double>>& p_levels) {
  auto cover = coverage_sets(map);
  double total = 0.0;
  for (int m = 1; m <= table.num_levels(); ++m) {
    for (int k = 0; k < map.num_machines(); ++k) {
      int reach = 0;
      for (int r : cover[k]) reach += table.levels[m - 1][r];
      // Best-value filling of min(reach, m) coverage slots.
      std::vector<double> p = p_levels[m - 1];
      std::sort(p.begin(), p.end(), std::greater<double>());
      for (int i = 0; i < std::min(reach, m); ++i) total += p[i];
    }
  }
  return total;
}

}  // namespace

TEST_CASE("mexcrp single level reduces to allocation structure") {
  NetworkMap map = generate_map({4, 2, 1.0, 6.0, 5});
  auto model = CoverageModel::build(4, 1, 0.01, 0.1);
  auto mex = solve(build_mexcrp_ilp(map, {model.p_ith}, 1));
  auto alloc = solve(build_allocation_ilp(map, model.p_ith, 1));
  REQUIRE(mex.status == IPStatus::Optimal);
  REQUIRE(alloc.status == IPStatus::Optimal);
  CHECK(mex.objective_value == doctest::Approx(alloc.objective_value).epsilon(1e-9));
}

TEST_CASE("mexcrp two-level optimum matches table enumeration") {
  NetworkMap map = generate_map({5, 3, 1.2, 6.0, 23});
  std::vector<std::vector<double>> p_levels;
  for (int m = 1; m <= 2; ++m)
    p_levels.push_back(CoverageModel::build(5, m, 0.02, 0.1).p_ith);
  auto sol = solve(build_mexcrp_ilp(map, p_levels, 2));
  REQUIRE(sol.status == IPStatus::Optimal);
  auto table = extract_compliance_table(sol, 2, 3);

  double best = -1.0;
  for (const auto& cand : all_two_level_tables(3))
    best = std::max(best, mexcrp_table_value(map, cand, p_levels));
  CHECK(sol.objective_value == doctest::Approx(best).epsilon(1e-9));
  CHECK(mexcrp_table_value(map, table, p_levels) ==
        doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("extracted tables always satisfy the transition bounds") {
  for (std::uint64_t seed : {1, 2, 3}) {
    NetworkMap map = generate_map({6, 3, 1.0, 6.0, seed});
    auto model = CoverageModel::build(6, 3, 0.02, 0.1);
    std::vector<double> weights(3);
    for (int m = 1; m <= 3; ++m) weights[m - 1] = model.p_busy[3 - m];
    auto table =
        extract_compliance_table(solve(build_mcrp_ilp(map, weights, 3)), 3, 3);
    table.validate();  // throws on violation
    for (int m = 0; m < 3; ++m) {
      int sum = 0;
      for (int v : table.levels[m]) sum += v;
      CHECK(sum == m + 1);
    }
  }
}

TEST_CASE("lp export smoke") {
  IntegerProgram prog;
  int x = prog.add_var("x", 0, 5, 1.0);
  prog.add_constraint({{x, 2.0}}, Rel::Le, 7);
  const std::string lp = export_lp_format(prog);
  CHECK(lp.find("Maximize") != std::string::npos);
  CHECK(lp.find("2 x <= 7") != std::string::npos);
  CHECK(lp.find("Generals") != std::string::npos);
}

TEST_CASE("well-formedness checks") {
  IntegerProgram prog;
  prog.add_var("x", 0, std::numeric_limits<double>::infinity(), 1.0);
  CHECK_THROWS_AS(solve(prog), std::invalid_argument);
}
