#pragma once

#include <memory>
#include <string>
#include <vector>

#include "seng/coverage.hpp"
#include "seng/dispatch.hpp"
#include "seng/ilp.hpp"
#include "seng/network.hpp"
#include "seng/relocate.hpp"
#include "seng/sim.hpp"

namespace seng {

// One fully wired simulation setup for a map: coverage model, optimal static
// allocation and policy instances. Compliance tables are solved on demand.
struct PolicySetup {
  CoverageModel model;
  std::vector<int> allocation;
  std::unique_ptr<DispatchPolicy> dispatch;
  std::unique_ptr<RelocationPolicy> relocate;
};

// mu_hat plug-in start value 1/(t_star + 1/mu); calibration is opt-in.
double mu_hat_plugin(double mu, double t_star);

PolicySetup make_setup(const NetworkMap& map, int M,
                       const DispatchPolicyConfig& dp,
                       const RelocationPolicyConfig& rp, const SimConfig& sim,
                       double mu_hat);

// Runs the fixed-point mu-hat calibration, measuring mean broken durations
// with the given policy pair.
MuHatResult calibrate_for(const NetworkMap& map, int M,
                          const DispatchPolicyConfig& dp,
                          const RelocationPolicyConfig& rp,
                          const SimConfig& sim);

struct ExperimentSpec {
  std::vector<MapGenConfig> map_configs;
  int maps_per_config = 10;
  std::vector<int> engineers;      // M values
  std::vector<double> mus;         // repair rates
  double lambda = 0.01;
  double horizon = 1000.0;
  double warmup = 0.0;
  std::vector<DispatchPolicyConfig> dispatch;
  std::vector<RelocationPolicyConfig> relocate;
  std::uint64_t base_seed = 1;
  bool calibrate = false;

  std::string to_json() const;
  static ExperimentSpec from_json(const std::string& text);
};

struct ResultRow {
  int K = 0, R = 0, M = 0;
  double d = 0.0, t_star = 0.0, lambda = 0.0, mu = 0.0;
  std::string dispatch;
  std::string relocate;
  double mean_fraction = 0.0;
  double std_fraction = 0.0;
  int runs = 0;
  double runtime_ms = 0.0;
};

// Full cross product of map configs x M x mu x dispatch x relocate; every
// policy pair sees the same map replicates and per-replicate seeds.
std::vector<ResultRow> run_sweep(const ExperimentSpec& spec);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);

// "csv" or "table" (grouped rows M x d x t_star, columns mu x policy).
std::string report(const std::vector<ResultRow>& rows,
                   const std::string& format);

std::string dispatch_config_name(const DispatchPolicyConfig& dp);
std::string relocate_config_name(const RelocationPolicyConfig& rp);

}  // namespace seng
