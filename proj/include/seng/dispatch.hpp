#pragma once

#include <memory>
#include <string>

#include "seng/coverage.hpp"
#include "seng/network.hpp"
#include "seng/sim.hpp"

namespace seng {

enum class DPKind { DP1, DP2, DP3, DP4, DP5 };

struct DispatchPolicyConfig {
  DPKind kind = DPKind::DP1;
  double alpha = 0.8;  // repair-time percentile, DP4 only
};

std::string dp_name(DPKind kind);
DPKind dp_from_name(const std::string& name);

// Response time of engineer m to machine k: remaining leg plus travel from
// the destination; busy engineers add the (estimated or known) repair time.
double response_time_idle(const NetworkMap& map, const SystemState& state,
                          int engineer, int machine);

// DP1: closest idle engineer, ties by engineer index; enqueue when none idle.
DispatchDecision dp1_closest(const NetworkMap& map, const SystemState& state,
                             int machine);

// DP2: among idle engineers that reach k within t_star (all idle when none
// can), dispatch the one whose removal leaves the largest number of working
// machines covered by the remaining idle engineers. Ties by closeness, then
// index.
DispatchDecision dp2_coverage(const NetworkMap& map, const SystemState& state,
                              int machine);

// DP3: like DP2 but scored by the expected covered demand of the remaining
// idle engineers over the working machines.
DispatchDecision dp3_expected_coverage(const NetworkMap& map,
                                       const SystemState& state, int machine,
                                       const CoverageModel& model);

// DP4/DP5: pick the engineer (idle or busy) with the smallest response time.
// Busy repair time is the alpha-percentile of Exp(mu) under DP4 and the
// sampled duration under DP5. A busy winner turns into a committed enqueue.
DispatchDecision min_response(const NetworkMap& map, const SystemState& state,
                              int machine, DPKind mode, double alpha, double mu);

class ClosestDispatch : public DispatchPolicy {
 public:
  DispatchDecision on_call(const NetworkMap& map, const SystemState& state,
                           int machine) override {
    return dp1_closest(map, state, machine);
  }
  std::string name() const override { return "dp1"; }
};

class CoverageDispatch : public DispatchPolicy {
 public:
  DispatchDecision on_call(const NetworkMap& map, const SystemState& state,
                           int machine) override {
    return dp2_coverage(map, state, machine);
  }
  std::string name() const override { return "dp2"; }
};

class ExpectedCoverageDispatch : public DispatchPolicy {
 public:
  explicit ExpectedCoverageDispatch(CoverageModel model)
      : model_(std::move(model)) {}
  DispatchDecision on_call(const NetworkMap& map, const SystemState& state,
                           int machine) override {
    return dp3_expected_coverage(map, state, machine, model_);
  }
  std::string name() const override { return "dp3"; }

 private:
  CoverageModel model_;
};

class MinResponseDispatch : public DispatchPolicy {
 public:
  MinResponseDispatch(bool known_repair_time, double alpha, double mu)
      : known_(known_repair_time), alpha_(alpha), mu_(mu) {}
  DispatchDecision on_call(const NetworkMap& map, const SystemState& state,
                           int machine) override {
    return min_response(map, state, machine, known_ ? DPKind::DP5 : DPKind::DP4,
                        alpha_, mu_);
  }
  bool uses_repair_oracle() const override { return known_; }
  std::string name() const override { return known_ ? "dp5" : "dp4"; }

 private:
  bool known_;
  double alpha_;
  double mu_;
};

// `model` is required for DP3 and ignored otherwise.
std::unique_ptr<DispatchPolicy> make_dispatch_policy(
    const DispatchPolicyConfig& config, const CoverageModel* model, double mu);

}  // namespace seng
