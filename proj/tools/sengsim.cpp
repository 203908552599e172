// Command line front end: map generation, single simulations, parameter
// sweeps, allocation and compliance-table solving, RP5 tuning and the
// optimal-policy benchmark.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "seng/dispatch.hpp"
#include "seng/experiment.hpp"
#include "seng/ilp.hpp"
#include "seng/mdp.hpp"
#include "seng/network.hpp"
#include "seng/relocate.hpp"
#include "seng/sim.hpp"
#include "seng/util.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string table_json(const seng::ComplianceTable& table) {
  nlohmann::json j;
  j["levels"] = table.levels;
  return j.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"service engineer dispatching and relocation toolkit"};
  app.require_subcommand(1);

  // ---- gen-map ----
  auto* gen = app.add_subcommand("gen-map", "generate a random map");
  seng::MapGenConfig mapcfg;
  std::string out_path;
  gen->add_option("--machines,-K", mapcfg.K, "number of machines")->required();
  gen->add_option("--bases,-R", mapcfg.R, "number of base stations")->required();
  gen->add_option("--density,-d", mapcfg.d, "map density")->required();
  gen->add_option("--t-star,-t", mapcfg.t_star, "time limit")->required();
  gen->add_option("--seed,-s", mapcfg.seed, "rng seed");
  gen->add_option("--output,-o", out_path, "output file (default stdout)");

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "run one simulation");
  std::string map_path, dispatch_name = "dp1", relocate_name = "rp1";
  std::string trace_path;
  int M = 1;
  seng::SimConfig simcfg;
  double alpha = 0.8, rd_max = -1, rl_max = -1, min_gain = 0;
  bool calibrate = false;
  sim_cmd->add_option("--map", map_path, "map JSON file")->required();
  sim_cmd->add_option("--engineers,-M", M, "number of engineers")->required();
  sim_cmd->add_option("--dispatch", dispatch_name, "dp1..dp5");
  sim_cmd->add_option("--relocate", relocate_name, "rp1..rp5");
  sim_cmd->add_option("--lambda", simcfg.lambda, "breakdown rate");
  sim_cmd->add_option("--mu", simcfg.mu, "repair rate");
  sim_cmd->add_option("--horizon", simcfg.horizon, "simulated time");
  sim_cmd->add_option("--warmup", simcfg.warmup, "discard calls before this time");
  sim_cmd->add_option("--seed", simcfg.seed, "rng seed");
  sim_cmd->add_option("--alpha", alpha, "repair-time percentile (dp4)");
  sim_cmd->add_option("--rd-max", rd_max, "rp5 max redeploy distance");
  sim_cmd->add_option("--rl-max", rl_max, "rp5 max relocation distance");
  sim_cmd->add_option("--min-gain", min_gain, "rp5 min improvement");
  sim_cmd->add_flag("--calibrate", calibrate, "calibrate mu-hat by simulation");
  sim_cmd->add_option("--trace", trace_path, "event trace CSV file");
  sim_cmd->add_option("--output,-o", out_path, "report JSON (default stdout)");

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment sweep");
  std::string spec_path;
  sweep_cmd->add_option("--spec", spec_path, "experiment spec JSON")->required();
  sweep_cmd->add_option("--output,-o", out_path, "result CSV (default stdout)");

  // ---- allocate ----
  auto* alloc_cmd = app.add_subcommand("allocate", "optimal static allocation");
  double mu_opt = 0.1, lambda_opt = 0.01, mu_hat_opt = 0;
  alloc_cmd->add_option("--map", map_path, "map JSON file")->required();
  alloc_cmd->add_option("--engineers,-M", M, "number of engineers")->required();
  alloc_cmd->add_option("--lambda", lambda_opt, "breakdown rate");
  alloc_cmd->add_option("--mu", mu_opt, "repair rate");
  alloc_cmd->add_option("--mu-hat", mu_hat_opt, "override mu-hat");
  alloc_cmd->add_option("--output,-o", out_path, "allocation JSON");

  // ---- compliance-table ----
  auto* table_cmd = app.add_subcommand("compliance-table",
                                       "solve an MCRP or MEXCRP table");
  std::string table_type = "mcrp";
  table_cmd->add_option("type", table_type, "mcrp|mexcrp")->required();
  table_cmd->add_option("--map", map_path, "map JSON file")->required();
  table_cmd->add_option("--engineers,-M", M, "number of engineers")->required();
  table_cmd->add_option("--lambda", lambda_opt, "breakdown rate");
  table_cmd->add_option("--mu", mu_opt, "repair rate");
  table_cmd->add_option("--mu-hat", mu_hat_opt, "override mu-hat");
  table_cmd->add_option("--output,-o", out_path, "table JSON");

  // ---- tune-rp5 ----
  auto* tune_cmd = app.add_subcommand("tune-rp5", "grid-tune RP5 restrictions");
  std::vector<std::string> tune_maps;
  int tune_gen_maps = 0;
  seng::MapGenConfig tune_mapcfg;
  seng::SimConfig tunecfg;
  std::string tune_dispatch = "dp4";
  tune_cmd->add_option("--map", tune_maps, "map JSON file(s)");
  tune_cmd->add_option("--gen-maps", tune_gen_maps, "generate this many maps");
  tune_cmd->add_option("--machines,-K", tune_mapcfg.K, "machines (with --gen-maps)");
  tune_cmd->add_option("--bases,-R", tune_mapcfg.R, "bases (with --gen-maps)");
  tune_cmd->add_option("--density,-d", tune_mapcfg.d, "density (with --gen-maps)");
  tune_cmd->add_option("--t-star,-t", tune_mapcfg.t_star, "time limit");
  tune_cmd->add_option("--engineers,-M", M, "number of engineers")->required();
  tune_cmd->add_option("--dispatch", tune_dispatch, "base dispatch policy");
  tune_cmd->add_option("--lambda", tunecfg.lambda, "breakdown rate");
  tune_cmd->add_option("--mu", tunecfg.mu, "repair rate");
  tune_cmd->add_option("--horizon", tunecfg.horizon, "simulated time");
  tune_cmd->add_option("--seed", tunecfg.seed, "rng seed");
  tune_cmd->add_option("--output,-o", out_path, "result JSON");

  // ---- mdp-benchmark ----
  auto* mdp_cmd = app.add_subcommand(
      "mdp-benchmark", "optimal policy vs DP4+RP5 on the small instance");
  int runs = 10;
  long mdp_horizon = 1000;
  std::uint64_t mdp_seed = 1;
  double gamma = 0.99;
  std::string dump_prefix;
  mdp_cmd->add_option("--runs", runs, "simulation repetitions");
  mdp_cmd->add_option("--horizon", mdp_horizon, "steps per run");
  mdp_cmd->add_option("--seed", mdp_seed, "rng seed");
  mdp_cmd->add_option("--gamma", gamma, "discount factor");
  mdp_cmd->add_option("--dump", dump_prefix, "policy/value dump path prefix");
  mdp_cmd->add_option("--output,-o", out_path, "comparison CSV");

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "format sweep results");
  std::string rows_path, format = "table";
  report_cmd->add_option("--input", rows_path, "rows CSV")->required();
  report_cmd->add_option("--format", format, "csv|table");
  report_cmd->add_option("--output,-o", out_path, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      write_output(out_path, seng::generate_map(mapcfg).to_json());
    } else if (*sim_cmd) {
      seng::NetworkMap map = seng::NetworkMap::from_json(read_file(map_path));
      simcfg.t_star = map.t_star();
      seng::DispatchPolicyConfig dp{seng::dp_from_name(dispatch_name), alpha};
      seng::RelocationPolicyConfig rp;
      rp.kind = seng::rp_from_name(relocate_name);
      if (rp.kind == seng::RPKind::RP5) {
        rp.restrictions.max_redeploy_dist =
            rd_max >= 0 ? rd_max : std::numeric_limits<double>::infinity();
        rp.restrictions.max_reloc_dist =
            rl_max >= 0 ? rl_max : std::numeric_limits<double>::infinity();
        rp.restrictions.min_improvement = min_gain;
      }
      double mu_hat = seng::mu_hat_plugin(simcfg.mu, map.t_star());
      if (calibrate) mu_hat = seng::calibrate_for(map, M, dp, rp, simcfg).mu_hat;
      seng::PolicySetup setup = seng::make_setup(map, M, dp, rp, simcfg, mu_hat);
      std::unique_ptr<seng::TraceWriter> trace;
      if (!trace_path.empty()) trace = std::make_unique<seng::TraceWriter>(trace_path);
      seng::SimReport sim_report = seng::run_simulation(
          map, setup.allocation, *setup.dispatch, *setup.relocate, simcfg,
          trace.get());
      write_output(out_path, sim_report.to_json());
    } else if (*sweep_cmd) {
      auto spec = seng::ExperimentSpec::from_json(read_file(spec_path));
      write_output(out_path, seng::rows_to_csv(seng::run_sweep(spec)));
    } else if (*alloc_cmd) {
      seng::NetworkMap map = seng::NetworkMap::from_json(read_file(map_path));
      const double mu_hat = mu_hat_opt > 0
                                ? mu_hat_opt
                                : seng::mu_hat_plugin(mu_opt, map.t_star());
      auto model = seng::CoverageModel::build(map.num_machines(), M, lambda_opt,
                                              mu_hat);
      seng::SolveOptions opts;
      opts.lex_min = false;
      auto sol = seng::solve(seng::build_allocation_ilp(map, model.p_ith, M), opts);
      auto counts = seng::extract_allocation(map, sol, M);
      nlohmann::json j;
      j["allocation"] = counts;
      j["expected_covered_demand"] = sol.objective_value / map.num_machines();
      write_output(out_path, j.dump(2));
    } else if (*table_cmd) {
      seng::NetworkMap map = seng::NetworkMap::from_json(read_file(map_path));
      const double mu_hat = mu_hat_opt > 0
                                ? mu_hat_opt
                                : seng::mu_hat_plugin(mu_opt, map.t_star());
      auto model = seng::CoverageModel::build(map.num_machines(), M, lambda_opt,
                                              mu_hat);
      seng::SolveOptions opts;
      opts.lex_min = false;
      seng::IPSolution sol;
      if (table_type == "mcrp") {
        std::vector<double> weights(M);
        for (int m = 1; m <= M; ++m) weights[m - 1] = model.p_busy[M - m];
        sol = seng::solve(seng::build_mcrp_ilp(map, weights, M), opts);
      } else if (table_type == "mexcrp") {
        std::vector<std::vector<double>> p_levels(M);
        for (int m = 1; m <= M; ++m)
          p_levels[m - 1] =
              seng::CoverageModel::build(map.num_machines(), m, lambda_opt, mu_hat)
                  .p_ith;
        sol = seng::solve(seng::build_mexcrp_ilp(map, p_levels, M), opts);
      } else {
        throw std::runtime_error("table type must be mcrp or mexcrp");
      }
      write_output(out_path, table_json(seng::extract_compliance_table(
                                 sol, M, map.num_bases())));
    } else if (*tune_cmd) {
      std::vector<seng::NetworkMap> maps;
      for (const auto& p : tune_maps)
        maps.push_back(seng::NetworkMap::from_json(read_file(p)));
      for (int i = 0; i < tune_gen_maps; ++i) {
        seng::MapGenConfig mc = tune_mapcfg;
        mc.seed = seng::mix_seed(tunecfg.seed, 0x9a7, 0, i);
        maps.push_back(seng::generate_map(mc));
      }
      if (maps.empty()) throw std::runtime_error("tune-rp5 needs maps");
      tunecfg.t_star = maps.front().t_star();
      seng::DispatchPolicyConfig dp{seng::dp_from_name(tune_dispatch), 0.8};
      auto result = seng::tune_rp5(maps, M, dp, tunecfg);
      nlohmann::json j;
      j["rd_max"] = result.best.max_redeploy_dist;
      j["rl_max"] = result.best.max_reloc_dist;
      j["min_gain"] = result.best.min_improvement;
      j["grid"] = nlohmann::json::array();
      for (const auto& pt : result.log)
        j["grid"].push_back({{"rd_max", pt.restrictions.max_redeploy_dist},
                             {"rl_max", pt.restrictions.max_reloc_dist},
                             {"min_gain", pt.restrictions.min_improvement},
                             {"mean_fraction", pt.mean_fraction}});
      write_output(out_path, j.dump(2));
    } else if (*mdp_cmd) {
      seng::DiscreteInstance inst = seng::benchmark_instance();
      inst.gamma = gamma;
      seng::DiscreteModel model = seng::enumerate_states(inst);
      auto pi = seng::policy_iteration(model.table, inst.gamma);
      auto vi = seng::value_iteration(model.table, inst.gamma);
      double vi_gap = 0.0;
      for (size_t i = 0; i < vi.size(); ++i)
        vi_gap = std::max(vi_gap, std::fabs(vi[i] - pi.values[i]));
      if (!dump_prefix.empty()) seng::save_policy_dump(model, pi, dump_prefix);

      auto opt = seng::simulate_discrete(
          model,
          [&](int idx, const seng::DiscreteState&) {
            return model.actions[idx][pi.policy[idx]];
          },
          mdp_horizon, runs, mdp_seed);
      auto cov = seng::CoverageModel::build(
          inst.K, inst.M, inst.lambda,
          seng::mu_hat_plugin(inst.mu, inst.t_star));
      seng::RP5Restrictions restr{static_cast<double>(inst.t_star),
                                  static_cast<double>(inst.t_star), 0.0};
      auto heur = seng::simulate_discrete(
          model,
          [&](int, const seng::DiscreteState& s) {
            return seng::heuristic_dp4_rp5_action(inst, cov, restr, 0.8, s);
          },
          mdp_horizon, runs, mdp_seed);

      std::ostringstream csv;
      csv << "policy,mean_fraction,std,runs\n";
      auto emit = [&](const std::string& name, const seng::DiscreteSimResult& r) {
        double var = 0.0;
        for (double f : r.fractions) var += (f - r.mean) * (f - r.mean);
        const double sd = r.fractions.size() > 1
                              ? std::sqrt(var / (r.fractions.size() - 1))
                              : 0.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%zu\n", name.c_str(),
                      r.mean, sd, r.fractions.size());
        csv << buf;
      };
      emit("optimal", opt);
      emit("dp4+rp5", heur);
      char meta[160];
      std::snprintf(meta, sizeof(meta),
                    "# states=%zu pi_iters=%d pi_vi_gap=%.3e\n",
                    model.states.size(), pi.iterations, vi_gap);
      write_output(out_path, meta + csv.str());
    } else if (*report_cmd) {
      auto rows = seng::rows_from_csv(read_file(rows_path));
      write_output(out_path, seng::report(rows, format));
    }
  } catch (const std::exception& ex) {
    nlohmann::json err;
    err["error"] = ex.what();
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
