#include "seng/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace seng {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

struct LPResult {
  bool feasible = false;
  double objective = 0.0;        // in the original (maximization) sense
  std::vector<double> x;         // original variable space
};

// Primal simplex with variable bounds [lb, ub] (ub may be +inf), minimizing.
// Full dense tableau; Dantzig pricing with a Bland fallback on stalls.
class Simplex {
 public:
  Simplex(int rows, int cols)
      : m_(rows), n_(cols), T_(static_cast<size_t>(rows) * cols, 0.0),
        d_(cols, 0.0), beta_(rows, 0.0), basis_(rows, -1),
        stat_(cols, AtLower), lb_(cols, 0.0), ub_(cols, kInf) {}

  double* row(int i) { return T_.data() + static_cast<size_t>(i) * n_; }
  std::vector<double> d_;
  std::vector<double> beta_;
  std::vector<int> basis_;
  enum Status : signed char { AtLower = 0, AtUpper = 1, Basic = 2 };
  std::vector<signed char> stat_;
  std::vector<double> lb_, ub_;

  void canonicalize_costs(const std::vector<double>& cost) {
    d_ = cost;
    for (int r = 0; r < m_; ++r) {
      const double cb = d_[basis_[r]];
      if (std::fabs(cb) < 1e-15) continue;
      const double* tr = row(r);
      for (int j = 0; j < n_; ++j) d_[j] -= cb * tr[j];
    }
  }

  // Runs to optimality of the current cost row. Throws on iteration overrun.
  void optimize() {
    const long max_iters = 20000 + 40L * (m_ + n_);
    long iters = 0, stall = 0;
    bool bland = false;
    while (true) {
      if (++iters > max_iters) throw std::runtime_error("simplex: iteration limit");
      int j = pick_entering(bland);
      if (j < 0) return;
      const double t = step(j, bland);
      if (t > 1e-10) {
        stall = 0;
        bland = false;
      } else if (++stall > 2L * (m_ + n_)) {
        bland = true;
      }
    }
  }

  double value_of(int j) const {
    if (stat_[j] == Basic) {
      for (int r = 0; r < m_; ++r)
        if (basis_[r] == j) return beta_[r];
      return 0.0;
    }
    return stat_[j] == AtLower ? lb_[j] : ub_[j];
  }

 private:
  int pick_entering(bool bland) const {
    int best = -1;
    double best_score = kCostTol;
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == Basic || ub_[j] - lb_[j] <= 0) continue;
      double score = 0.0;
      if (stat_[j] == AtLower && d_[j] < -kCostTol)
        score = -d_[j];
      else if (stat_[j] == AtUpper && d_[j] > kCostTol)
        score = d_[j];
      else
        continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  // One step for entering column j; returns the step length. In Bland mode
  // ties in the ratio test are broken by lowest basis variable index, which
  // together with lowest-index entering guarantees no cycling.
  double step(int j, bool bland) {
    const double sigma = stat_[j] == AtLower ? 1.0 : -1.0;
    double t = ub_[j] - lb_[j];  // may be inf
    int leave_row = -1;
    bool leave_at_lower = true;
    double leave_y = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double y = T_[static_cast<size_t>(i) * n_ + j];
      if (std::fabs(y) < kPivotTol) continue;
      const double delta = sigma * y;  // beta_i decreases by delta * t
      double limit;
      bool at_lower;
      if (delta > 0) {
        limit = (beta_[i] - lb_[basis_[i]]) / delta;
        at_lower = true;
      } else {
        if (ub_[basis_[i]] == kInf) continue;
        limit = (ub_[basis_[i]] - beta_[i]) / (-delta);
        at_lower = false;
      }
      if (limit < 0) limit = 0;
      bool take = false;
      if (limit < t - 1e-12) {
        take = true;
      } else if (limit <= t + 1e-12) {
        if (leave_row < 0 && limit <= t)
          take = true;
        else if (leave_row >= 0 &&
                 (bland ? basis_[i] < basis_[leave_row]
                        : std::fabs(y) > std::fabs(leave_y) + 1e-12))
          take = true;
      }
      if (take) {
        if (limit < t) t = limit;
        leave_row = i;
        leave_at_lower = at_lower;
        leave_y = y;
      }
    }
    if (t == kInf) throw std::runtime_error("simplex: unbounded direction");

    // Move all basic values.
    for (int i = 0; i < m_; ++i)
      beta_[i] -= sigma * t * T_[static_cast<size_t>(i) * n_ + j];

    if (leave_row < 0) {  // bound flip
      stat_[j] = stat_[j] == AtLower ? AtUpper : AtLower;
      return t;
    }

    const double enter_val = (sigma > 0 ? lb_[j] : ub_[j]) + sigma * t;
    const int lv = basis_[leave_row];
    stat_[lv] = leave_at_lower ? AtLower : AtUpper;

    double* pr = row(leave_row);
    const double piv = pr[j];
    for (int c = 0; c < n_; ++c) pr[c] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave_row) continue;
      double* ri = row(i);
      const double f = ri[j];
      if (std::fabs(f) < kPivotTol) continue;
      for (int c = 0; c < n_; ++c) ri[c] -= f * pr[c];
      ri[j] = 0.0;
    }
    const double fd = d_[j];
    if (std::fabs(fd) > 0) {
      for (int c = 0; c < n_; ++c) d_[c] -= fd * pr[c];
      d_[j] = 0.0;
    }
    basis_[leave_row] = j;
    stat_[j] = Basic;
    beta_[leave_row] = enter_val;
    return t;
  }

  int m_, n_;
  std::vector<double> T_;
};

// Solves the relaxation of `prog` with variable bounds overridden by lb/ub.
LPResult lp_solve(const IntegerProgram& prog, const std::vector<double>& lb,
                  const std::vector<double>& ub) {
  const int n = static_cast<int>(prog.vars.size());
  const int m = static_cast<int>(prog.constraints.size());
  for (int j = 0; j < n; ++j)
    if (lb[j] > ub[j] + 1e-12) return {};  // empty box

  // Shift structurals to start at zero; pre-negate >= rows to <=.
  std::vector<double> range(n);
  for (int j = 0; j < n; ++j) range[j] = ub[j] - lb[j];

  struct Row {
    std::vector<std::pair<int, double>> a;
    bool eq;
    double b;
  };
  std::vector<Row> rows(m);
  for (int i = 0; i < m; ++i) {
    const auto& c = prog.constraints[i];
    double shift = 0.0;
    for (auto [j, v] : c.coeffs) shift += v * lb[j];
    double b = c.rhs - shift;
    double sign = c.rel == Rel::Ge ? -1.0 : 1.0;
    rows[i].eq = c.rel == Rel::Eq;
    rows[i].b = sign * b;
    rows[i].a.reserve(c.coeffs.size());
    for (auto [j, v] : c.coeffs) rows[i].a.emplace_back(j, sign * v);
  }

  // Column layout: structurals, slacks (<= rows), artificials.
  int n_slack = 0;
  for (const auto& r : rows)
    if (!r.eq) ++n_slack;
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (rows[i].eq || rows[i].b < 0) art_rows.push_back(i);
  const int N = n + n_slack + static_cast<int>(art_rows.size());

  Simplex sx(m, N);
  for (int j = 0; j < n; ++j) {
    sx.lb_[j] = 0.0;
    sx.ub_[j] = range[j];
  }
  int slack_at = n;
  int art_at = n + n_slack;
  std::vector<int> art_cols;
  for (int i = 0; i < m; ++i) {
    Row& r = rows[i];
    double rowsign = 1.0;
    bool need_art = r.eq || r.b < 0;
    if (r.b < 0) rowsign = -1.0;
    double* ti = sx.row(i);
    for (auto [j, v] : r.a) ti[j] += rowsign * v;
    if (!r.eq) {
      ti[slack_at] = rowsign;  // slack in [0, inf)
      ++slack_at;
    }
    const double rhs = rowsign * r.b;
    if (need_art) {
      ti[art_at] = 1.0;
      sx.basis_[i] = art_at;
      sx.stat_[art_at] = Simplex::Basic;
      art_cols.push_back(art_at);
      ++art_at;
      sx.beta_[i] = rhs;
    } else {
      const int s = slack_at - 1;
      sx.basis_[i] = s;
      sx.stat_[s] = Simplex::Basic;
      sx.beta_[i] = rhs;
    }
  }

  if (!art_cols.empty()) {
    std::vector<double> c1(N, 0.0);
    for (int a : art_cols) c1[a] = 1.0;
    sx.canonicalize_costs(c1);
    sx.optimize();
    double infeas = 0.0;
    for (int a : art_cols) infeas += sx.value_of(a);
    if (infeas > 1e-7) return {};
    for (int a : art_cols) sx.ub_[a] = 0.0;  // pin at zero
  }

  std::vector<double> c2(N, 0.0);
  for (int j = 0; j < n; ++j) c2[j] = -prog.objective[j];  // maximize
  sx.canonicalize_costs(c2);
  sx.optimize();

  LPResult res;
  res.feasible = true;
  res.x.resize(n);
  res.objective = 0.0;
  for (int j = 0; j < n; ++j) {
    res.x[j] = sx.value_of(j) + lb[j];
    res.objective += prog.objective[j] * res.x[j];
  }
  return res;
}

bool satisfies(const IntegerProgram& prog, const std::vector<double>& x,
               double tol) {
  for (const auto& c : prog.constraints) {
    double lhs = 0.0;
    for (auto [j, v] : c.coeffs) lhs += v * x[j];
    switch (c.rel) {
      case Rel::Le:
        if (lhs > c.rhs + tol) return false;
        break;
      case Rel::Ge:
        if (lhs < c.rhs - tol) return false;
        break;
      case Rel::Eq:
        if (std::fabs(lhs - c.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

IPSolution branch_and_bound(const IntegerProgram& prog,
                            const SolveOptions& opts) {
  const int n = static_cast<int>(prog.vars.size());
  struct Node {
    double bound;
    long id;
    std::vector<double> lb, ub, x;
  };
  auto worse = [](const Node& a, const Node& b) {
    return a.bound < b.bound || (a.bound == b.bound && a.id > b.id);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  std::vector<double> lb0(n), ub0(n);
  for (int j = 0; j < n; ++j) {
    lb0[j] = prog.vars[j].lb;
    ub0[j] = prog.vars[j].ub;
  }
  long next_id = 0;
  LPResult root = lp_solve(prog, lb0, ub0);
  IPSolution best;
  if (!root.feasible) return best;
  open.push({root.objective, next_id++, lb0, ub0, std::move(root.x)});

  bool have_incumbent = false;
  double inc_val = -kInf;
  std::vector<double> inc_x;
  long nodes = 0;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (have_incumbent && node.bound <= inc_val + 1e-9) continue;
    if (++nodes > opts.max_nodes)
      throw std::runtime_error("branch and bound: node limit exceeded");

    // Most fractional integer variable, lowest index on ties.
    int bv = -1;
    double bfrac = opts.int_tol;
    for (int j = 0; j < n; ++j) {
      if (!prog.vars[j].integer) continue;
      const double dist = std::fabs(node.x[j] - std::round(node.x[j]));
      if (dist > bfrac + 1e-12) {
        bfrac = dist;
        bv = j;
      }
    }
    if (bv < 0) {
      std::vector<double> cand = node.x;
      for (int j = 0; j < n; ++j)
        if (prog.vars[j].integer) cand[j] = std::round(cand[j]);
      if (!satisfies(prog, cand, 1e-5)) continue;
      double val = 0.0;
      for (int j = 0; j < n; ++j) val += prog.objective[j] * cand[j];
      if (!have_incumbent || val > inc_val + 1e-9) {
        have_incumbent = true;
        inc_val = val;
        inc_x = std::move(cand);
      }
      continue;
    }

    const double v = node.x[bv];
    for (int side = 0; side < 2; ++side) {
      std::vector<double> lb = node.lb, ub = node.ub;
      if (side == 0)
        ub[bv] = std::floor(v);
      else
        lb[bv] = std::ceil(v);
      if (lb[bv] > ub[bv] + 1e-12) continue;
      LPResult r = lp_solve(prog, lb, ub);
      if (!r.feasible) continue;
      if (have_incumbent && r.objective <= inc_val + 1e-9) continue;
      open.push({r.objective, next_id++, std::move(lb), std::move(ub),
                 std::move(r.x)});
    }
  }

  if (have_incumbent) {
    best.status = IPStatus::Optimal;
    best.objective_value = inc_val;
    best.assignment = std::move(inc_x);
  }
  return best;
}

}  // namespace

int IntegerProgram::add_var(const std::string& name, double lb, double ub,
                            double obj, bool integer) {
  vars.push_back({name, lb, ub, integer});
  objective.push_back(obj);
  return static_cast<int>(vars.size()) - 1;
}

void IntegerProgram::add_constraint(std::vector<std::pair<int, double>> coeffs,
                                    Rel rel, double rhs) {
  constraints.push_back({std::move(coeffs), rel, rhs});
}

void IntegerProgram::check_well_formed() const {
  if (objective.size() != vars.size())
    throw std::invalid_argument("objective size does not match vars");
  for (const auto& v : vars)
    if (!std::isfinite(v.lb) || !std::isfinite(v.ub))
      throw std::invalid_argument("variable " + v.name + " must be bounded");
  for (const auto& c : constraints)
    for (auto [j, _] : c.coeffs)
      if (j < 0 || j >= static_cast<int>(vars.size()))
        throw std::invalid_argument("constraint references unknown variable");
}

IPSolution solve(const IntegerProgram& prog, const SolveOptions& opts) {
  prog.check_well_formed();
  IPSolution sol = branch_and_bound(prog, opts);
  if (sol.status != IPStatus::Optimal || !opts.lex_min) return sol;

  // Second pass: among optimal solutions pick the lexicographically smallest
  // integer assignment by minimizing one variable at a time subject to an
  // optimality floor.
  const double floor_eps = 1e-6 * std::max(1.0, std::fabs(sol.objective_value));
  IntegerProgram work = prog;
  std::vector<std::pair<int, double>> obj_row;
  for (size_t j = 0; j < prog.vars.size(); ++j)
    if (prog.objective[j] != 0.0)
      obj_row.emplace_back(static_cast<int>(j), prog.objective[j]);
  work.add_constraint(obj_row, Rel::Ge, sol.objective_value - floor_eps);

  SolveOptions sub = opts;
  sub.lex_min = false;
  for (size_t j = 0; j < prog.vars.size(); ++j) {
    if (!prog.vars[j].integer) continue;
    if (work.vars[j].ub - work.vars[j].lb < 0.5) continue;  // already fixed
    IntegerProgram probe = work;
    for (auto& c : probe.objective) c = 0.0;
    probe.objective[j] = -1.0;  // maximize -x_j = minimize x_j
    IPSolution s = branch_and_bound(probe, sub);
    if (s.status != IPStatus::Optimal)
      throw std::runtime_error("lexicographic refinement lost feasibility");
    const double vj = std::round(-s.objective_value);
    work.vars[j].lb = work.vars[j].ub = vj;
  }
  IPSolution refined = branch_and_bound(work, sub);
  if (refined.status == IPStatus::Optimal) {
    sol.assignment = refined.assignment;
    sol.objective_value = refined.objective_value;
  }
  return sol;
}

std::string export_lp_format(const IntegerProgram& prog) {
  std::ostringstream out;
  out << "Maximize\n obj:";
  for (size_t j = 0; j < prog.vars.size(); ++j) {
    if (prog.objective[j] == 0.0) continue;
    out << (prog.objective[j] >= 0 ? " + " : " - ")
        << std::fabs(prog.objective[j]) << " " << prog.vars[j].name;
  }
  out << "\nSubject To\n";
  for (size_t i = 0; i < prog.constraints.size(); ++i) {
    const auto& c = prog.constraints[i];
    out << " c" << i << ":";
    for (auto [j, v] : c.coeffs)
      out << (v >= 0 ? " + " : " - ") << std::fabs(v) << " "
          << prog.vars[j].name;
    out << (c.rel == Rel::Le ? " <= " : c.rel == Rel::Ge ? " >= " : " = ")
        << c.rhs << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : prog.vars)
    out << " " << v.lb << " <= " << v.name << " <= " << v.ub << "\n";
  out << "Generals\n";
  for (const auto& v : prog.vars)
    if (v.integer) out << " " << v.name << "\n";
  out << "End\n";
  return out.str();
}

IntegerProgram build_allocation_ilp(const NetworkMap& map,
                                    const std::vector<double>& p_ith, int M) {
  const int K = map.num_machines();
  const int R = map.num_bases();
  const auto cover = coverage_sets(map);
  IntegerProgram prog;
  for (int r = 0; r < R; ++r)
    prog.add_var("x_" + std::to_string(r), 0, M, 0.0, true);
  // z_ki relaxed to [0,1]: with integer x the budget polytope per machine has
  // integral optima, so the objective value is unchanged.
  std::vector<std::vector<int>> z(K, std::vector<int>(M));
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < M; ++i)
      z[k][i] = prog.add_var("z_" + std::to_string(k) + "_" + std::to_string(i + 1),
                             0, 1, p_ith[i], false);
  for (int k = 0; k < K; ++k) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < M; ++i) row.emplace_back(z[k][i], 1.0);
    for (int r : cover[k]) row.emplace_back(r, -1.0);
    prog.add_constraint(std::move(row), Rel::Le, 0.0);
  }
  std::vector<std::pair<int, double>> total;
  for (int r = 0; r < R; ++r) total.emplace_back(r, 1.0);
  prog.add_constraint(std::move(total), Rel::Le, M);
  return prog;
}

std::vector<int> extract_allocation(const NetworkMap& map,
                                    const IPSolution& sol, int M) {
  if (sol.status != IPStatus::Optimal)
    throw std::invalid_argument("allocation program not solved to optimality");
  const int R = map.num_bases();
  std::vector<int> counts(R, 0);
  int placed = 0;
  for (int r = 0; r < R; ++r) {
    counts[r] = static_cast<int>(std::llround(sol.assignment[r]));
    placed += counts[r];
  }
  if (placed < M) {
    const auto cover = coverage_sets(map);
    std::vector<int> covered(R, 0);
    for (const auto& nk : cover)
      for (int r : nk) ++covered[r];
    int best = 0;
    for (int r = 1; r < R; ++r)
      if (covered[r] > covered[best]) best = r;
    counts[best] += M - placed;
  }
  return counts;
}

IntegerProgram build_mcrp_ilp(const NetworkMap& map,
                              const std::vector<double>& level_weights, int M) {
  const int K = map.num_machines();
  const int R = map.num_bases();
  if (static_cast<int>(level_weights.size()) != M)
    throw std::invalid_argument("need one weight per level 1..M");
  const auto cover = coverage_sets(map);
  IntegerProgram prog;
  // x first so the compliance table occupies a fixed prefix of the solution.
  std::vector<std::vector<int>> x(M, std::vector<int>(R));
  for (int m = 1; m <= M; ++m)
    for (int r = 0; r < R; ++r)
      x[m - 1][r] = prog.add_var(
          "x_" + std::to_string(m) + "_" + std::to_string(r), 0, m, 0.0, true);
  std::vector<std::vector<int>> z(M, std::vector<int>(K));
  for (int m = 1; m <= M; ++m)
    for (int k = 0; k < K; ++k)
      z[m - 1][k] = prog.add_var(
          "z_" + std::to_string(m) + "_" + std::to_string(k), 0, 1,
          level_weights[m - 1], false);
  std::vector<std::vector<int>> alpha(M > 1 ? M - 1 : 0, std::vector<int>(R));
  for (int m = 1; m < M; ++m)
    for (int r = 0; r < R; ++r)
      alpha[m - 1][r] = prog.add_var(
          "a_" + std::to_string(m) + "_" + std::to_string(r), 0, 1, 0.0, false);

  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      std::vector<std::pair<int, double>> row{{z[m][k], 1.0}};
      for (int r : cover[k]) row.emplace_back(x[m][r], -1.0);
      prog.add_constraint(std::move(row), Rel::Le, 0.0);
    }
  for (int m = 0; m < M; ++m) {
    std::vector<std::pair<int, double>> row;
    for (int r = 0; r < R; ++r) row.emplace_back(x[m][r], 1.0);
    prog.add_constraint(std::move(row), Rel::Eq, m + 1);
  }
  for (int m = 0; m + 1 < M; ++m) {
    for (int r = 0; r < R; ++r)
      prog.add_constraint(
          {{x[m][r], 1.0}, {x[m + 1][r], -1.0}, {alpha[m][r], -1.0}}, Rel::Le,
          0.0);
    std::vector<std::pair<int, double>> row;
    for (int r = 0; r < R; ++r) row.emplace_back(alpha[m][r], 1.0);
    prog.add_constraint(std::move(row), Rel::Le, 1.0);
  }
  return prog;
}

IntegerProgram build_mexcrp_ilp(
    const NetworkMap& map, const std::vector<std::vector<double>>& p_level_ith,
    int M) {
  const int K = map.num_machines();
  const int R = map.num_bases();
  if (static_cast<int>(p_level_ith.size()) != M)
    throw std::invalid_argument("need P_i vectors for levels 1..M");
  const auto cover = coverage_sets(map);
  IntegerProgram prog;
  std::vector<std::vector<int>> x(M, std::vector<int>(R));
  for (int m = 1; m <= M; ++m)
    for (int r = 0; r < R; ++r)
      x[m - 1][r] = prog.add_var(
          "x_" + std::to_string(m) + "_" + std::to_string(r), 0, m, 0.0, true);
  std::vector<std::vector<std::vector<int>>> y(M);
  for (int m = 1; m <= M; ++m) {
    if (static_cast<int>(p_level_ith[m - 1].size()) < m)
      throw std::invalid_argument("P_i vector for level is too short");
    y[m - 1].assign(K, std::vector<int>(m));
    for (int k = 0; k < K; ++k)
      for (int i = 1; i <= m; ++i)
        y[m - 1][k][i - 1] = prog.add_var(
            "y_" + std::to_string(m) + "_" + std::to_string(k) + "_" +
                std::to_string(i),
            0, 1, p_level_ith[m - 1][i - 1], false);
  }
  std::vector<std::vector<int>> alpha(M > 1 ? M - 1 : 0, std::vector<int>(R));
  for (int m = 1; m < M; ++m)
    for (int r = 0; r < R; ++r)
      alpha[m - 1][r] = prog.add_var(
          "a_" + std::to_string(m) + "_" + std::to_string(r), 0, 1, 0.0, false);

  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      std::vector<std::pair<int, double>> row;
      for (int i = 0; i <= m; ++i) row.emplace_back(y[m][k][i], 1.0);
      for (int r : cover[k]) row.emplace_back(x[m][r], -1.0);
      prog.add_constraint(std::move(row), Rel::Le, 0.0);
    }
  for (int m = 0; m < M; ++m) {
    std::vector<std::pair<int, double>> row;
    for (int r = 0; r < R; ++r) row.emplace_back(x[m][r], 1.0);
    prog.add_constraint(std::move(row), Rel::Le, m + 1);
  }
  for (int m = 0; m + 1 < M; ++m) {
    for (int r = 0; r < R; ++r)
      prog.add_constraint(
          {{x[m][r], 1.0}, {x[m + 1][r], -1.0}, {alpha[m][r], -1.0}}, Rel::Le,
          0.0);
    std::vector<std::pair<int, double>> row;
    for (int r = 0; r < R; ++r) row.emplace_back(alpha[m][r], 1.0);
    prog.add_constraint(std::move(row), Rel::Le, 1.0);
  }
  return prog;
}

ComplianceTable extract_compliance_table(const IPSolution& sol, int M, int R) {
  if (sol.status != IPStatus::Optimal)
    throw std::invalid_argument("compliance program not solved to optimality");
  ComplianceTable table;
  table.levels.assign(M, std::vector<int>(R, 0));
  for (int m = 0; m < M; ++m)
    for (int r = 0; r < R; ++r)
      table.levels[m][r] =
          static_cast<int>(std::llround(sol.assignment[m * R + r]));
  table.validate();
  return table;
}

}  // namespace seng
