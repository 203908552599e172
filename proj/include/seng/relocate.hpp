#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "seng/compliance.hpp"
#include "seng/coverage.hpp"
#include "seng/dispatch.hpp"
#include "seng/network.hpp"
#include "seng/sim.hpp"

namespace seng {

enum class RPKind { RP1, RP2, RP3, RP4, RP5 };

std::string rp_name(RPKind kind);
RPKind rp_from_name(const std::string& name);

struct RP5Restrictions {
  double max_redeploy_dist = std::numeric_limits<double>::infinity();
  double max_reloc_dist = std::numeric_limits<double>::infinity();
  // Strict threshold on the (unnormalized) expected-covered-demand gain of an
  // on-dispatch move; 0 keeps only the positivity requirement and anything
  // above the machine count forbids relocation entirely.
  double min_improvement = 0.0;
};

struct RelocationPolicyConfig {
  RPKind kind = RPKind::RP1;
  RP5Restrictions restrictions;  // RP5 only
};

// One corrective move toward the compliance level of the current idle set
// (minus `exclude_engineer` if given): the cheapest surplus-to-deficit move,
// ties by source base, target base, then engineer index. None when compliant
// or when no engineer is idle.
RelocationDecision apply_compliance_table(const NetworkMap& map,
                                          const SystemState& state,
                                          const ComplianceTable& table,
                                          int exclude_engineer = -1);

// Base for an engineer freed at `machine`: the closest base whose occupancy
// is below the target of the new level, ties by base index.
int compliance_redeploy_base(const NetworkMap& map, const SystemState& state,
                             const ComplianceTable& table, int engineer,
                             int machine);

// DMEXCLP redeployment: the base maximizing expected covered demand over the
// working machines, restricted to bases within max_redeploy_dist of the
// repaired machine (all bases when none is in range). Ties by base index.
int dmexclp_redeploy(const NetworkMap& map, const SystemState& state,
                     const std::vector<double>& p_ith, int engineer,
                     int machine, const RP5Restrictions& restr = {});

// DMEXCLP on-dispatch relocation: the best base pair (r1, r2) moving one idle
// engineer, kept only if the demand gain strictly exceeds min_improvement.
// With a distance cap, pairs beyond max_reloc_dist are not considered and an
// empty candidate set forbids the move.
RelocationDecision dmexclp_relocate_on_dispatch(
    const NetworkMap& map, const SystemState& state,
    const std::vector<double>& p_ith, int dispatched,
    const RP5Restrictions& restr = {});

class StaticRelocation : public RelocationPolicy {
 public:
  explicit StaticRelocation(std::vector<int> home) : home_(std::move(home)) {}
  int redeploy(const NetworkMap&, const SystemState&, int engineer,
               int) override {
    return home_[engineer];
  }
  std::string name() const override { return "rp1"; }
  const std::vector<int>& home() const { return home_; }

 private:
  std::vector<int> home_;  // base index per engineer
};

class ComplianceRelocation : public RelocationPolicy {
 public:
  ComplianceRelocation(ComplianceTable table, std::string name)
      : table_(std::move(table)), name_(std::move(name)) {
    table_.validate();
  }
  RelocationDecision on_dispatch(const NetworkMap& map,
                                 const SystemState& state,
                                 int dispatched) override {
    return apply_compliance_table(map, state, table_, dispatched);
  }
  int redeploy(const NetworkMap& map, const SystemState& state, int engineer,
               int machine) override {
    return compliance_redeploy_base(map, state, table_, engineer, machine);
  }
  std::string name() const override { return name_; }
  const ComplianceTable& table() const { return table_; }

 private:
  ComplianceTable table_;
  std::string name_;
};

class DmexclpRelocation : public RelocationPolicy {
 public:
  DmexclpRelocation(std::vector<double> p_ith, RP5Restrictions restr,
                    std::string name)
      : p_ith_(std::move(p_ith)), restr_(restr), name_(std::move(name)) {}
  RelocationDecision on_dispatch(const NetworkMap& map,
                                 const SystemState& state,
                                 int dispatched) override {
    return dmexclp_relocate_on_dispatch(map, state, p_ith_, dispatched, restr_);
  }
  int redeploy(const NetworkMap& map, const SystemState& state, int engineer,
               int machine) override {
    return dmexclp_redeploy(map, state, p_ith_, engineer, machine, restr_);
  }
  std::string name() const override { return name_; }

 private:
  std::vector<double> p_ith_;
  RP5Restrictions restr_;
  std::string name_;
};

struct TuneGrid {
  std::vector<double> dist_factors = {0.5, 1.0, 2.0, 100.0};  // times t_star
  std::vector<double> thresholds = {0.0, 1.0, 5.0, 100.0};
};

struct TunePoint {
  RP5Restrictions restrictions;
  double mean_fraction = 0.0;
};

struct TuneResult {
  RP5Restrictions best;
  std::vector<TunePoint> log;  // grid order
};

// Simulates every grid point over the given maps with paired seeds and the
// fixed base dispatch policy; returns the restriction triple with the best
// mean on-time fraction, ties by smaller distances then smaller threshold.
TuneResult tune_rp5(const std::vector<NetworkMap>& maps, int M,
                    const DispatchPolicyConfig& base_policy,
                    const SimConfig& sim, const TuneGrid& grid = {});

}  // namespace seng
