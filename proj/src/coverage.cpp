#include "seng/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace seng {

std::vector<double> stationary_distribution(int K, int M, double lambda,
                                            double mu_hat) {
  if (K < 1 || M < 1) throw std::invalid_argument("K and M must be >= 1");
  if (lambda <= 0 || mu_hat <= 0)
    throw std::invalid_argument("rates must be positive");

  // log P(k) up to the common normalization constant
  const double log_rho = std::log(lambda) - std::log(mu_hat);
  std::vector<double> logp(K + 1);
  for (int k = 0; k <= K; ++k) {
    double lp = std::lgamma(K + 1.0) - std::lgamma(k + 1.0) -
                std::lgamma(K - k + 1.0) + k * log_rho;
    if (k >= M && M <= K)
      lp += std::lgamma(k + 1.0) - std::lgamma(M + 1.0) -
            (k - M) * std::log(static_cast<double>(M));
    logp[k] = lp;
  }
  const double lmax = *std::max_element(logp.begin(), logp.end());
  double norm = 0.0;
  for (double lp : logp) norm += std::exp(lp - lmax);
  std::vector<double> p(K + 1);
  for (int k = 0; k <= K; ++k) p[k] = std::exp(logp[k] - lmax) / norm;
  return p;
}

std::vector<double> busy_probabilities(const std::vector<double>& p_broken,
                                       int M) {
  const int K = static_cast<int>(p_broken.size()) - 1;
  std::vector<double> p_busy(M + 1, 0.0);
  for (int m = 0; m < M; ++m)
    if (m <= K) p_busy[m] = p_broken[m];
  for (int k = M; k <= K; ++k) p_busy[M] += p_broken[k];
  return p_busy;
}

std::vector<double> ith_closest_response_prob(const std::vector<double>& p_busy,
                                              int M) {
  std::vector<double> p_ith(M, 0.0);
  for (int i = 1; i <= M; ++i) {
    double acc = 0.0;
    for (int m = i - 1; m <= M; ++m) {
      if (M - m == 0 || p_busy[m] <= 0.0) continue;
      // (M-m) * P(S_m) * m! (M-i)! / ((m-i+1)! M!)
      double lt = std::log(static_cast<double>(M - m)) + std::log(p_busy[m]) +
                  std::lgamma(m + 1.0) + std::lgamma(M - i + 1.0) -
                  std::lgamma(m - i + 2.0) - std::lgamma(M + 1.0);
      acc += std::exp(lt);
    }
    p_ith[i - 1] = acc;
  }
  return p_ith;
}

CoverageModel CoverageModel::build(int K, int M, double lambda, double mu_hat) {
  CoverageModel model;
  model.lambda = lambda;
  model.mu_hat = mu_hat;
  model.K = K;
  model.M = M;
  model.p_broken = stationary_distribution(K, M, lambda, mu_hat);
  model.p_busy = busy_probabilities(model.p_broken, M);
  model.p_ith = ith_closest_response_prob(model.p_busy, M);
  return model;
}

std::string CoverageModel::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["mu_hat"] = mu_hat;
  j["K"] = K;
  j["M"] = M;
  j["p_broken"] = p_broken;
  j["p_busy"] = p_busy;
  j["p_ith"] = p_ith;
  return j.dump(2);
}

double total_covered_demand(const NetworkMap& map,
                            const std::vector<LocRef>& positions,
                            const std::vector<double>& p_ith,
                            const std::vector<int>& working) {
  double total = 0.0;
  std::vector<double> dist;
  dist.reserve(positions.size());
  for (int k : working) {
    dist.clear();
    for (LocRef pos : positions) dist.push_back(map.travel(pos, map.machine_ref(k)));
    std::sort(dist.begin(), dist.end());
    const size_t n = std::min(dist.size(), p_ith.size());
    for (size_t i = 0; i < n; ++i) {
      if (dist[i] > map.t_star()) break;  // sorted: later ones are farther
      total += p_ith[i];
    }
  }
  return total;
}

double expected_covered_demand(const NetworkMap& map,
                               const std::vector<LocRef>& positions,
                               const std::vector<double>& p_ith,
                               const std::vector<int>& working) {
  if (working.empty()) return 0.0;
  return total_covered_demand(map, positions, p_ith, working) /
         static_cast<double>(working.size());
}

MuHatResult calibrate_mu_hat(
    int K, int M, double lambda, double mu, double t_star,
    const std::function<double(const CoverageModel&)>& measure,
    int max_iterations, double rel_tol) {
  MuHatResult result;
  double mu_hat = 1.0 / (t_star + 1.0 / mu);
  result.iterates.push_back(mu_hat);
  for (int it = 0; it < max_iterations; ++it) {
    CoverageModel model = CoverageModel::build(K, M, lambda, mu_hat);
    double mean_duration = measure(model);
    if (!(mean_duration > 0.0)) break;  // no completed repairs: keep previous
    double next = 1.0 / mean_duration;
    double rel = std::fabs(next - mu_hat) / mu_hat;
    mu_hat = next;
    result.iterates.push_back(mu_hat);
    if (rel < rel_tol) break;
  }
  result.mu_hat = mu_hat;
  return result;
}

}  // namespace seng
