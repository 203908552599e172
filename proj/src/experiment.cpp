#include "seng/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "seng/util.hpp"

namespace seng {

double mu_hat_plugin(double mu, double t_star) {
  return 1.0 / (t_star + 1.0 / mu);
}

namespace {

std::vector<double> mexcrp_level_probs(int K, double lambda, double mu_hat,
                                       int level) {
  // P_i recomputed for a system of `level` engineers.
  CoverageModel m = CoverageModel::build(K, level, lambda, mu_hat);
  return m.p_ith;
}

std::unique_ptr<RelocationPolicy> make_relocation_policy(
    const NetworkMap& map, int M, const RelocationPolicyConfig& rp,
    const CoverageModel& model, const std::vector<int>& allocation) {
  switch (rp.kind) {
    case RPKind::RP1: {
      std::vector<int> home;
      for (int r = 0; r < map.num_bases(); ++r)
        for (int i = 0; i < allocation[r]; ++i) home.push_back(r);
      return std::make_unique<StaticRelocation>(std::move(home));
    }
    case RPKind::RP2: {
      // Level weights: level m has m idle = M-m busy engineers.
      std::vector<double> weights(M);
      for (int m = 1; m <= M; ++m) weights[m - 1] = model.p_busy[M - m];
      SolveOptions opts;
      opts.lex_min = false;
      IPSolution sol = solve(build_mcrp_ilp(map, weights, M), opts);
      return std::make_unique<ComplianceRelocation>(
          extract_compliance_table(sol, M, map.num_bases()), "rp2");
    }
    case RPKind::RP3: {
      std::vector<std::vector<double>> p_levels(M);
      for (int m = 1; m <= M; ++m)
        p_levels[m - 1] = mexcrp_level_probs(map.num_machines(), model.lambda,
                                             model.mu_hat, m);
      SolveOptions opts;
      opts.lex_min = false;
      IPSolution sol = solve(build_mexcrp_ilp(map, p_levels, M), opts);
      return std::make_unique<ComplianceRelocation>(
          extract_compliance_table(sol, M, map.num_bases()), "rp3");
    }
    case RPKind::RP4:
      return std::make_unique<DmexclpRelocation>(model.p_ith, RP5Restrictions{},
                                                 "rp4");
    case RPKind::RP5:
      return std::make_unique<DmexclpRelocation>(model.p_ith, rp.restrictions,
                                                 "rp5");
  }
  throw std::invalid_argument("unknown relocation policy kind");
}

}  // namespace

PolicySetup make_setup(const NetworkMap& map, int M,
                       const DispatchPolicyConfig& dp,
                       const RelocationPolicyConfig& rp, const SimConfig& sim,
                       double mu_hat) {
  PolicySetup setup;
  setup.model = CoverageModel::build(map.num_machines(), M, sim.lambda, mu_hat);
  SolveOptions opts;
  opts.lex_min = false;
  IPSolution sol = solve(build_allocation_ilp(map, setup.model.p_ith, M), opts);
  setup.allocation = extract_allocation(map, sol, M);
  setup.dispatch = make_dispatch_policy(dp, &setup.model, sim.mu);
  setup.relocate = make_relocation_policy(map, M, rp, setup.model, setup.allocation);
  return setup;
}

MuHatResult calibrate_for(const NetworkMap& map, int M,
                          const DispatchPolicyConfig& dp,
                          const RelocationPolicyConfig& rp,
                          const SimConfig& sim) {
  auto measure = [&](const CoverageModel& model) {
    SolveOptions opts;
    opts.lex_min = false;
    IPSolution sol = solve(build_allocation_ilp(map, model.p_ith, M), opts);
    auto allocation = extract_allocation(map, sol, M);
    auto dpol = make_dispatch_policy(dp, &model, sim.mu);
    auto rpol = make_relocation_policy(map, M, rp, model, allocation);
    SimConfig cfg = sim;
    cfg.t_star = map.t_star();
    SimReport rep = run_simulation(map, allocation, *dpol, *rpol, cfg);
    return rep.repairs_completed > 0 ? rep.mean_broken_duration : -1.0;
  };
  return calibrate_mu_hat(map.num_machines(), M, sim.lambda, sim.mu,
                          map.t_star(), measure);
}

std::string dispatch_config_name(const DispatchPolicyConfig& dp) {
  return dp_name(dp.kind);
}

std::string relocate_config_name(const RelocationPolicyConfig& rp) {
  return rp_name(rp.kind);
}

std::vector<ResultRow> run_sweep(const ExperimentSpec& spec) {
  if (spec.map_configs.empty() || spec.engineers.empty() || spec.mus.empty() ||
      spec.dispatch.empty() || spec.relocate.empty() ||
      spec.maps_per_config < 1)
    throw std::invalid_argument("experiment spec is incomplete");

  // Shared map replicates per map config.
  std::vector<std::vector<NetworkMap>> maps(spec.map_configs.size());
  for (size_t c = 0; c < spec.map_configs.size(); ++c) {
    maps[c].reserve(spec.maps_per_config);
    for (int rep = 0; rep < spec.maps_per_config; ++rep) {
      MapGenConfig mc = spec.map_configs[c];
      mc.seed = mix_seed(spec.base_seed, 0x9a7, c, rep);
      maps[c].push_back(generate_map(mc));
    }
  }

  struct Cell {
    size_t config, mi, ui, di, ri;
  };
  std::vector<Cell> cells;
  for (size_t c = 0; c < spec.map_configs.size(); ++c)
    for (size_t mi = 0; mi < spec.engineers.size(); ++mi)
      for (size_t ui = 0; ui < spec.mus.size(); ++ui)
        for (size_t di = 0; di < spec.dispatch.size(); ++di)
          for (size_t ri = 0; ri < spec.relocate.size(); ++ri)
            cells.push_back({c, mi, ui, di, ri});

  std::vector<ResultRow> rows(cells.size());
  std::vector<std::string> failures(cells.size());
  parallel_for(cells.size(), [&](size_t ci) {
    const Cell& cell = cells[ci];
    const auto& mc = spec.map_configs[cell.config];
    const int M = spec.engineers[cell.mi];
    const double mu = spec.mus[cell.ui];

    ResultRow row;
    row.K = mc.K;
    row.R = mc.R;
    row.M = M;
    row.d = mc.d;
    row.t_star = mc.t_star;
    row.lambda = spec.lambda;
    row.mu = mu;
    row.dispatch = dispatch_config_name(spec.dispatch[cell.di]);
    row.relocate = relocate_config_name(spec.relocate[cell.ri]);

    const auto start = std::chrono::steady_clock::now();
    try {
      std::vector<double> fractions;
      fractions.reserve(spec.maps_per_config);
      for (int rep = 0; rep < spec.maps_per_config; ++rep) {
        const NetworkMap& map = maps[cell.config][rep];
        SimConfig sim;
        sim.lambda = spec.lambda;
        sim.mu = mu;
        sim.t_star = map.t_star();
        sim.horizon = spec.horizon;
        sim.warmup = spec.warmup;
        sim.seed = mix_seed(spec.base_seed, cell.config * 1000 + rep, M,
                            static_cast<std::uint64_t>(mu * 1e6));
        double mu_hat = mu_hat_plugin(mu, map.t_star());
        if (spec.calibrate)
          mu_hat = calibrate_for(map, M, spec.dispatch[cell.di],
                                 spec.relocate[cell.ri], sim)
                       .mu_hat;
        PolicySetup setup = make_setup(map, M, spec.dispatch[cell.di],
                                       spec.relocate[cell.ri], sim, mu_hat);
        SimReport rep_out = run_simulation(map, setup.allocation,
                                           *setup.dispatch, *setup.relocate, sim);
        fractions.push_back(rep_out.fraction_on_time);
      }
      double mean = 0.0;
      for (double f : fractions) mean += f;
      mean /= fractions.size();
      double var = 0.0;
      for (double f : fractions) var += (f - mean) * (f - mean);
      row.mean_fraction = mean;
      row.std_fraction =
          fractions.size() > 1 ? std::sqrt(var / (fractions.size() - 1)) : 0.0;
      row.runs = static_cast<int>(fractions.size());
    } catch (const std::exception& ex) {
      failures[ci] = ex.what();
      row.runs = 0;
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    rows[ci] = row;
  });

  for (size_t ci = 0; ci < cells.size(); ++ci)
    if (!failures[ci].empty())
      std::fprintf(stderr, "cell %zu failed: %s\n", ci, failures[ci].c_str());
  return rows;
}

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "K,R,M,d,t_star,lambda,mu,dispatch,relocate,mean_fraction,"
         "std_fraction,runs\n";
  for (const auto& r : rows)
    out << r.K << ',' << r.R << ',' << r.M << ',' << fmt(r.d, "%.4f") << ','
        << fmt(r.t_star, "%.4f") << ',' << fmt(r.lambda, "%.6f") << ','
        << fmt(r.mu, "%.6f") << ',' << r.dispatch << ',' << r.relocate << ','
        << fmt(r.mean_fraction) << ',' << fmt(r.std_fraction) << ',' << r.runs
        << '\n';
  return out.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    ResultRow r;
    auto next = [&]() {
      if (!std::getline(ls, field, ',')) throw std::invalid_argument("bad csv");
      return field;
    };
    r.K = std::stoi(next());
    r.R = std::stoi(next());
    r.M = std::stoi(next());
    r.d = std::stod(next());
    r.t_star = std::stod(next());
    r.lambda = std::stod(next());
    r.mu = std::stod(next());
    r.dispatch = next();
    r.relocate = next();
    r.mean_fraction = std::stod(next());
    r.std_fraction = std::stod(next());
    r.runs = std::stoi(next());
    rows.push_back(r);
  }
  return rows;
}

std::string report(const std::vector<ResultRow>& rows,
                   const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("no rows to report");
  if (format == "csv") return rows_to_csv(rows);
  if (format != "table") throw std::invalid_argument("format must be csv|table");

  // Columns: mu x policy pair; rows: (M, d, t_star).
  std::set<double, std::greater<double>> mus;
  std::set<std::string> pairs;
  for (const auto& r : rows) {
    mus.insert(r.mu);
    pairs.insert(r.dispatch + "+" + r.relocate);
  }
  std::map<std::tuple<int, double, double>,
           std::map<std::pair<double, std::string>, double>>
      grid;
  for (const auto& r : rows)
    grid[{r.M, r.d, r.t_star}][{r.mu, r.dispatch + "+" + r.relocate}] =
        r.mean_fraction;

  std::ostringstream out;
  out << "   M      d     t*";
  for (double mu : mus)
    for (const auto& p : pairs) {
      std::ostringstream h;
      h << p << "(mu=" << fmt(mu, "%.2f") << ")";
      out << ' ' << h.str();
    }
  out << '\n';
  for (const auto& [key, cols] : grid) {
    const auto& [M, d, ts] = key;
    char head[64];
    std::snprintf(head, sizeof(head), "%4d %6.2f %6.1f", M, d, ts);
    out << head;
    for (double mu : mus)
      for (const auto& p : pairs) {
        std::ostringstream h;
        h << p << "(mu=" << fmt(mu, "%.2f") << ")";
        const auto it = cols.find({mu, p});
        const int width = static_cast<int>(h.str().size());
        char cellbuf[64];
        if (it == cols.end())
          std::snprintf(cellbuf, sizeof(cellbuf), " %*s", width, "-");
        else
          std::snprintf(cellbuf, sizeof(cellbuf), " %*.2f", width, it->second);
        out << cellbuf;
      }
    out << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json dp_to_json(const DispatchPolicyConfig& dp) {
  nlohmann::json j;
  j["kind"] = dp_name(dp.kind);
  if (dp.kind == DPKind::DP4) j["alpha"] = dp.alpha;
  return j;
}

DispatchPolicyConfig dp_from_json(const nlohmann::json& j) {
  DispatchPolicyConfig dp;
  dp.kind = dp_from_name(j.at("kind").get<std::string>());
  dp.alpha = j.value("alpha", 0.8);
  return dp;
}

nlohmann::json rp_to_json(const RelocationPolicyConfig& rp) {
  nlohmann::json j;
  j["kind"] = rp_name(rp.kind);
  if (rp.kind == RPKind::RP5) {
    j["rd_max"] = rp.restrictions.max_redeploy_dist;
    j["rl_max"] = rp.restrictions.max_reloc_dist;
    j["min_gain"] = rp.restrictions.min_improvement;
  }
  return j;
}

RelocationPolicyConfig rp_from_json(const nlohmann::json& j) {
  RelocationPolicyConfig rp;
  rp.kind = rp_from_name(j.at("kind").get<std::string>());
  if (rp.kind == RPKind::RP5) {
    rp.restrictions.max_redeploy_dist =
        j.value("rd_max", std::numeric_limits<double>::infinity());
    rp.restrictions.max_reloc_dist =
        j.value("rl_max", std::numeric_limits<double>::infinity());
    rp.restrictions.min_improvement = j.value("min_gain", 0.0);
  }
  return rp;
}

}  // namespace

std::string ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["maps_per_config"] = maps_per_config;
  j["engineers"] = engineers;
  j["mus"] = mus;
  j["lambda"] = lambda;
  j["horizon"] = horizon;
  j["warmup"] = warmup;
  j["base_seed"] = base_seed;
  j["calibrate"] = calibrate;
  j["map_configs"] = nlohmann::json::array();
  for (const auto& mc : map_configs)
    j["map_configs"].push_back({{"K", mc.K}, {"R", mc.R}, {"d", mc.d},
                                {"t_star", mc.t_star}});
  j["dispatch"] = nlohmann::json::array();
  for (const auto& dp : dispatch) j["dispatch"].push_back(dp_to_json(dp));
  j["relocate"] = nlohmann::json::array();
  for (const auto& rp : relocate) j["relocate"].push_back(rp_to_json(rp));
  return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentSpec spec;
  spec.maps_per_config = j.value("maps_per_config", 10);
  spec.engineers = j.at("engineers").get<std::vector<int>>();
  spec.mus = j.at("mus").get<std::vector<double>>();
  spec.lambda = j.value("lambda", 0.01);
  spec.horizon = j.value("horizon", 1000.0);
  spec.warmup = j.value("warmup", 0.0);
  spec.base_seed = j.value("base_seed", std::uint64_t{1});
  spec.calibrate = j.value("calibrate", false);
  for (const auto& mj : j.at("map_configs")) {
    MapGenConfig mc;
    mc.K = mj.at("K").get<int>();
    mc.R = mj.at("R").get<int>();
    mc.d = mj.at("d").get<double>();
    mc.t_star = mj.at("t_star").get<double>();
    spec.map_configs.push_back(mc);
  }
  for (const auto& dj : j.at("dispatch")) spec.dispatch.push_back(dp_from_json(dj));
  for (const auto& rj : j.at("relocate")) spec.relocate.push_back(rp_from_json(rj));
  return spec;
}

}  // namespace seng
