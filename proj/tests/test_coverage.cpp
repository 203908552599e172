#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "seng/coverage.hpp"
#include "seng/network.hpp"

using namespace seng;

namespace {

// Dense linear-system oracle for the birth-death chain: solve pi Q = 0 with
// normalization by Gaussian elimination.
std::vector<double> stationary_by_linear_solve(int K, int M, double lambda,
                                               double mu_hat) {
  const int n = K + 1;
  // Build A^T pi = b where rows are balance equations; replace the last row
  // with normalization.
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (int k = 0; k <= K; ++k) {
    const double up = lambda * (K - k);
    const double down = mu_hat * std::min(k, M);
    A[k][k] -= up + down;
    if (k + 1 <= K) A[k][k + 1] += mu_hat * std::min(k + 1, M);
    if (k - 1 >= 0) A[k][k - 1] += lambda * (K - k + 1);
  }
  for (int k = 0; k <= K; ++k) A[n - 1][k] = 1.0;
  b[n - 1] = 1.0;

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0.0) continue;
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> pi(n);
  for (int k = 0; k < n; ++k) pi[k] = b[k] / A[k][k];
  return pi;
}

// Exchangeable busy-pattern brute force: each subset S of busy engineers with
// |S| = m has probability P(S_m)/C(M,m); P_i is the probability that the
// first i-1 engineers in dispatch order are busy and the i-th is idle.
std::vector<double> p_ith_brute_force(const std::vector<double>& p_busy, int M) {
  std::vector<double> binom(M + 1, 1.0);
  for (int m = 1; m <= M; ++m)
    binom[m] = binom[m - 1] * (M - m + 1) / m;
  std::vector<double> p(M, 0.0);
  for (unsigned mask = 0; mask < (1u << M); ++mask) {
    const int m = __builtin_popcount(mask);
    const double w = p_busy[m] / binom[m];
    for (int i = 1; i <= M; ++i) {
      bool match = !(mask >> (i - 1) & 1u);  // engineer i idle
      for (int j = 0; j < i - 1 && match; ++j)
        if (!(mask >> j & 1u)) match = false;  // engineers 1..i-1 busy
      if (match) p[i - 1] += w;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("two-state chain closed form") {
  auto p = stationary_distribution(1, 1, 0.03, 0.17);
  CHECK(p[0] == doctest::Approx(0.17 / 0.20).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.03 / 0.20).epsilon(1e-12));
}

TEST_CASE("vanishing load concentrates on zero broken machines") {
  auto p = stationary_distribution(10, 3, 1e-9, 0.1);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stationary distribution matches the dense linear solve") {
  auto p = stationary_distribution(4, 2, 0.01, 0.1);
  auto oracle = stationary_by_linear_solve(4, 2, 0.01, 0.1);
  for (int k = 0; k <= 4; ++k)
    CHECK(p[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
}

TEST_CASE("distribution properties over a parameter grid") {
  for (int K : {1, 5, 20, 50}) {
    for (int M : {1, 3, 20}) {
      for (double lambda : {0.005, 0.05}) {
        for (double mu_hat : {0.02, 0.5}) {
          auto p = stationary_distribution(K, M, lambda, mu_hat);
          double sum = 0.0;
          for (double v : p) sum += v;
          CHECK(std::fabs(sum - 1.0) < 1e-10);
          // Detailed balance: lambda (K-k) P(k) = mu_hat min(k+1,M) P(k+1)
          for (int k = 0; k < K; ++k) {
            const double lhs = lambda * (K - k) * p[k];
            const double rhs = mu_hat * std::min(k + 1, M) * p[k + 1];
            CHECK(std::fabs(lhs - rhs) < 1e-10);
          }
          auto busy = busy_probabilities(p, M);
          double bsum = 0.0;
          for (double v : busy) bsum += v;
          CHECK(std::fabs(bsum - 1.0) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("busy probabilities edge cases") {
  auto p = stationary_distribution(4, 2, 0.01, 0.1);
  auto busy = busy_probabilities(p, 2);
  CHECK(busy[0] == p[0]);
  CHECK(busy[1] == p[1]);
  CHECK(busy[2] == doctest::Approx(p[2] + p[3] + p[4]).epsilon(1e-12));

  // M > K: no saturation mass.
  auto p2 = stationary_distribution(2, 5, 0.05, 0.1);
  auto busy2 = busy_probabilities(p2, 5);
  CHECK(busy2[5] == 0.0);
  CHECK(busy2[3] == 0.0);
  CHECK(busy2[0] + busy2[1] + busy2[2] == doctest::Approx(1.0).epsilon(1e-12));

  // M = 1: busy probability is the complement of empty.
  auto p3 = stationary_distribution(6, 1, 0.02, 0.09);
  auto busy3 = busy_probabilities(p3, 1);
  CHECK(busy3[1] == doctest::Approx(1.0 - p3[0]).epsilon(1e-12));
}

TEST_CASE("single engineer response probability") {
  auto p = stationary_distribution(3, 1, 0.01, 0.2);
  auto busy = busy_probabilities(p, 1);
  auto pi = ith_closest_response_prob(busy, 1);
  CHECK(pi[0] == doctest::Approx(busy[0]).epsilon(1e-12));
}

TEST_CASE("saturated system never answers") {
  std::vector<double> busy = {0.0, 0.0, 0.0, 1.0};  // always 3 of 3 busy
  auto pi = ith_closest_response_prob(busy, 3);
  for (double v : pi) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("response probabilities match the busy-pattern brute force") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int M : {2, 3, 4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> busy(M + 1);
      double sum = 0.0;
      for (double& v : busy) {
        v = unit(rng);
        sum += v;
      }
      for (double& v : busy) v /= sum;
      auto got = ith_closest_response_prob(busy, M);
      auto expect = p_ith_brute_force(busy, M);
      double total = 0.0;
      for (int i = 0; i < M; ++i) {
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
        total += got[i];
      }
      CHECK(total <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("expected covered demand hand-checked cases") {
  // Machines at 0, 10, 30 on a line; bases at 0 and 10; t_star = 12.
  std::vector<Location> machines = {{0, LocKind::Machine, 0.0, 0.0},
                                    {1, LocKind::Machine, 10.0, 0.0},
                                    {2, LocKind::Machine, 30.0, 0.0}};
  std::vector<Location> bases = {{0, LocKind::Base, 0.0, 0.0},
                                 {1, LocKind::Base, 10.0, 0.0}};
  NetworkMap map(machines, bases, 12.0);
  std::vector<double> p_ith = {0.7, 0.2};
  std::vector<int> working = {0, 1, 2};

  // Engineers at both bases: machine 0 sees distances {0,10}: P1+P2;
  // machine 1 sees {10,0}: P1+P2; machine 2 sees {30,20}: nothing.
  std::vector<LocRef> both = {map.base_ref(0), map.base_ref(1)};
  CHECK(expected_covered_demand(map, both, p_ith, working) ==
        doctest::Approx((0.9 + 0.9) / 3.0).epsilon(1e-12));

  // No engineer within reach of anything: zero.
  std::vector<LocRef> far = {map.machine_ref(2)};
  CHECK(expected_covered_demand(map, far, p_ith, {0, 1}) ==
        doctest::Approx(0.0));

  // Everyone covers everything: sum of P_i per machine.
  NetworkMap wide(machines, bases, 100.0);
  CHECK(expected_covered_demand(wide, both, p_ith, working) ==
        doctest::Approx(0.9).epsilon(1e-12));

  // Empty working set: zero by convention.
  CHECK(expected_covered_demand(map, both, p_ith, {}) == 0.0);

  CHECK(total_covered_demand(map, both, p_ith, working) ==
        doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("adding an engineer never lowers expected covered demand") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pick_base(0, 3);
  NetworkMap map = generate_map({8, 4, 1.0, 10.0, 77});
  auto model = CoverageModel::build(8, 5, 0.01, 0.1);
  std::vector<int> working;
  for (int k = 0; k < 8; ++k) working.push_back(k);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LocRef> pos;
    const int n = 1 + trial % 4;
    for (int i = 0; i < n; ++i) pos.push_back(map.base_ref(pick_base(rng)));
    const double before = expected_covered_demand(map, pos, model.p_ith, working);
    pos.push_back(map.base_ref(pick_base(rng)));
    const double after = expected_covered_demand(map, pos, model.p_ith, working);
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("mu-hat plug-in start and fixed point") {
  // Plug-in value.
  int calls = 0;
  auto fixed = calibrate_mu_hat(5, 2, 0.01, 0.2, 5.0,
                                [&](const CoverageModel&) {
                                  ++calls;
                                  return 10.0;  // measured duration
                                });
  CHECK(fixed.iterates.front() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(fixed.mu_hat == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(calls >= 1);  // converged immediately: measurement equals plug-in

  // Zero-travel system: durations are pure repairs, mu_hat -> mu.
  auto zero_travel = calibrate_mu_hat(
      5, 2, 0.01, 0.2, 5.0, [&](const CoverageModel&) { return 5.0; });
  CHECK(zero_travel.mu_hat == doctest::Approx(0.2).epsilon(1e-12));

  // Failed measurement keeps the previous value.
  auto kept = calibrate_mu_hat(5, 2, 0.01, 0.2, 5.0,
                               [&](const CoverageModel&) { return -1.0; });
  CHECK(kept.mu_hat == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("coverage model json dump") {
  auto model = CoverageModel::build(4, 2, 0.01, 0.1);
  const std::string j = model.to_json();
  CHECK(j.find("p_ith") != std::string::npos);
  CHECK(j.find("mu_hat") != std::string::npos);
}
