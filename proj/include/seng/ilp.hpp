#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seng/compliance.hpp"
#include "seng/network.hpp"

namespace seng {

struct IPVar {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool integer = true;
};

enum class Rel { Le, Eq, Ge };

struct IPConstraint {
  std::vector<std::pair<int, double>> coeffs;  // (var index, coefficient)
  Rel rel = Rel::Le;
  double rhs = 0.0;
};

// Bounded mixed-integer linear program, maximization sense.
struct IntegerProgram {
  std::vector<IPVar> vars;
  std::vector<double> objective;  // one coefficient per var
  std::vector<IPConstraint> constraints;

  int add_var(const std::string& name, double lb, double ub, double obj,
              bool integer = true);
  void add_constraint(std::vector<std::pair<int, double>> coeffs, Rel rel,
                      double rhs);
  void check_well_formed() const;  // finite bounds, matching sizes
};

enum class IPStatus { Optimal, Infeasible };

struct IPSolution {
  IPStatus status = IPStatus::Infeasible;
  double objective_value = 0.0;
  // Values per variable; entries for integer variables are integral.
  std::vector<double> assignment;
};

struct SolveOptions {
  // When set, the returned assignment is the lexicographically smallest
  // optimal one over the integer variables (one extra branch-and-bound solve
  // per integer variable). Disable for large instances.
  bool lex_min = true;
  double int_tol = 1e-6;
  int max_nodes = 2'000'000;
};

// Exact branch-and-bound over the integer variables with a simplex
// linear-relaxation bound. Deterministic: best-bound node order with
// insertion-order tie-break, most-fractional branching (lowest index first).
IPSolution solve(const IntegerProgram& prog, const SolveOptions& opts = {});

// CPLEX LP text format, for cross-checking against external solvers.
std::string export_lp_format(const IntegerProgram& prog);

// Allocation of M engineers to bases maximizing expected covered demand:
// vars x_r in {0..M} and coverage indicators z_ki; objective sum_k,i P_i z_ki;
// per-machine linking sum_i z_ki <= sum_{r in N_k} x_r and sum_r x_r <= M.
IntegerProgram build_allocation_ilp(const NetworkMap& map,
                                    const std::vector<double>& p_ith, int M);

// Reads x_r off an allocation solution. Surplus engineers (the relaxed
// budget constraint can leave some unplaced) go to the base covering the
// most machines, lowest index first.
std::vector<int> extract_allocation(const NetworkMap& map,
                                    const IPSolution& sol, int M);

// MCRP compliance-table program: level m covers machines (z_mk) weighted by
// level_weights[m-1]; occupancies x_mr with sum_r x_mr = m; adjacent levels
// linked by the one-arrival constraints via alpha_mr.
IntegerProgram build_mcrp_ilp(const NetworkMap& map,
                              const std::vector<double>& level_weights, int M);

// MEXCRP compliance-table program: multi-coverage indicators y_mki weighted
// by p_level_ith[m-1][i-1] (the i-th closest response probabilities for a
// system of m engineers); sum_r x_mr <= m; same transition constraints.
IntegerProgram build_mexcrp_ilp(
    const NetworkMap& map, const std::vector<std::vector<double>>& p_level_ith,
    int M);

// Reads the x_mr occupancies out of an MCRP/MEXCRP solution and validates
// the level sums and one-arrival bounds; a violation signals a solver bug.
ComplianceTable extract_compliance_table(const IPSolution& sol, int M, int R);

}  // namespace seng
