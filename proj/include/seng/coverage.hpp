#pragma once

#include <functional>
#include <string>
#include <vector>

#include "seng/network.hpp"

namespace seng {

// Stationary distribution P(0..K) of the birth-death process tracking the
// number of broken machines: breakdowns at rate lambda*(K-k), repairs at rate
// mu_hat*min(k, M). Evaluated in log space.
std::vector<double> stationary_distribution(int K, int M, double lambda,
                                            double mu_hat);

// P(S_m) for m = 0..M: probability of m busy engineers. P(S_m) = P(m) for
// m < M, P(S_M) = sum_{k>=M} P(k).
std::vector<double> busy_probabilities(const std::vector<double>& p_broken,
                                       int M);

// P_i, i = 1..M: probability that a call is answered by the i-th engineer in
// a fixed per-machine dispatch order, under the exchangeable-load assumption.
std::vector<double> ith_closest_response_prob(const std::vector<double>& p_busy,
                                              int M);

// Steady-state summary consumed by DP3, RP3-RP5 and the allocation ILP.
struct CoverageModel {
  double lambda = 0.0;
  double mu_hat = 0.0;
  int K = 0;
  int M = 0;
  std::vector<double> p_broken;  // P(0..K)
  std::vector<double> p_busy;    // P(S_0..S_M)
  std::vector<double> p_ith;     // P_1..P_M

  static CoverageModel build(int K, int M, double lambda, double mu_hat);
  std::string to_json() const;
};

// Expected covered demand over `working` machines for engineers standing at
// `positions`: (1/|working|) sum_k sum_i P_i z_ki with z_ki = 1 iff the i-th
// closest engineer is within t_star. Returns 0 for an empty working set.
double expected_covered_demand(const NetworkMap& map,
                               const std::vector<LocRef>& positions,
                               const std::vector<double>& p_ith,
                               const std::vector<int>& working);

// Same sum without the 1/|working| normalization; relocation-improvement
// thresholds are expressed in these units.
double total_covered_demand(const NetworkMap& map,
                            const std::vector<LocRef>& positions,
                            const std::vector<double>& p_ith,
                            const std::vector<int>& working);

struct MuHatResult {
  double mu_hat = 0.0;
  std::vector<double> iterates;  // mu_hat_0, mu_hat_1, ...
};

// Fixed-point calibration of the broken-duration rate: start from
// 1/(t_star + 1/mu) and refine with measured mean broken durations
// (travel + repair, queue wait excluded). `measure` runs a simulation with
// the model built from the current mu_hat and returns the observed mean
// broken duration, or a non-positive value when no repair completed.
MuHatResult calibrate_mu_hat(
    int K, int M, double lambda, double mu, double t_star,
    const std::function<double(const CoverageModel&)>& measure,
    int max_iterations = 3, double rel_tol = 0.01);

}  // namespace seng
