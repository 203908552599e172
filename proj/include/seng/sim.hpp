#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "seng/network.hpp"

namespace seng {

enum class MachineStatus { Working, Waiting, InRepair };

struct MachineState {
  MachineStatus status = MachineStatus::Working;
  double call_time = 0.0;  // when the open call arrived (Waiting/InRepair)
};

struct EngineerState {
  LocRef dest = 0;            // l_m: machine or base reference
  double remaining = 0.0;     // d_m: time left to reach dest
  bool en_route = false;      // destination set but arrival not yet processed
  bool repairing = false;
  double dispatch_time = 0.0;      // when sent toward the current machine
  double repair_duration = 0.0;    // sampled when dispatched to a machine
  double repair_completion = 0.0;  // absolute, valid while repairing.
                                   // DP5-only information: other policies must
                                   // not read the repair fields (capability
                                   // flag on DispatchPolicy).
};

enum class EventType {
  None,           // initial state only
  CallArrival,    // type 1
  RepairFinished, // type 2
  ArriveBase,     // type 3
  ArriveMachine,  // type 4
};

struct Event {
  EventType type = EventType::None;
  int machine = -1;
  int engineer = -1;
  int base = -1;
};

struct QueueEntry {
  int machine = -1;
  int committed = -1;  // engineer pre-assigned to this call, or -1
};

struct SystemState {
  double t = 0.0;
  Event event;
  std::vector<EngineerState> engineers;
  std::vector<MachineState> machines;
  std::vector<QueueEntry> queue;  // arrival order

  // F(s): engineers whose destination is a base (idle, possibly traveling).
  std::vector<int> idle_engineers(const NetworkMap& map) const;
  std::vector<int> working_machines() const;
  std::vector<int> in_repair_machines() const;
  bool machine_queued(int k) const;
  int queue_position(int k) const;  // -1 if absent
};

// Type 1: dispatch one idle engineer (or enqueue) plus at most one relocation
// of a different idle engineer; `commit` annotates an enqueue with the busy
// engineer that will serve the call.
struct Type1Action {
  int dispatch = -1;
  int reloc_engineer = -1;
  int reloc_base = -1;
  int commit = -1;
};

// Type 2: the freed engineer goes to exactly one location (queued machine or
// base), plus at most one relocation of an idle engineer.
struct Type2Action {
  LocRef redeploy = -1;
  int reloc_engineer = -1;
  int reloc_base = -1;
};

// Type 3: optionally pull one queued machine.
struct Type3Action {
  int pull_machine = -1;
};

// Type 4 and the initial state have no decision: the vacuous action.
using Action = std::variant<std::monostate, Type1Action, Type2Action, Type3Action>;

struct SimConfig {
  double lambda = 0.01;  // breakdown rate per working machine
  double mu = 0.1;       // repair rate
  double t_star = 0.0;   // must match the map when nonzero
  double horizon = 1000.0;
  double warmup = 0.0;   // calls arriving before this time are not counted
  std::uint64_t seed = 0;
};

struct SimReport {
  long calls_total = 0;
  long calls_on_time = 0;
  double fraction_on_time = 1.0;
  std::vector<double> response_times;  // served calls, arrival order
  long penalties = 0;
  bool no_calls = false;
  // Broken-duration statistics (travel + repair) for mu-hat calibration.
  double mean_broken_duration = 0.0;
  long repairs_completed = 0;

  std::string to_json() const;
};

SystemState initial_state(const NetworkMap& map,
                          const std::vector<int>& allocation, int M);

// All actions permitted in `state` (constraint sets of the per-event action
// spaces). Type-4 states have no decision and yield an empty set; enqueue
// actions are enumerated without commitment annotations.
std::vector<Action> legal_actions(const NetworkMap& map,
                                  const SystemState& state);

bool is_legal(const NetworkMap& map, const SystemState& state,
              const Action& action);

struct AdvanceResult {
  SystemState next;
  int cost = 0;  // machines whose waiting time crossed t_star this interval
};

// Applies the action, samples the next event (deterministic travel arrivals
// race against exponential breakdowns and the stored repair completions) and
// advances all clocks. next.t is +inf when no further event can occur.
AdvanceResult advance(const NetworkMap& map, const SimConfig& config,
                      const SystemState& state, const Action& action,
                      std::mt19937_64& rng);

// Waiting machines that cross t_star in (state.t, until] with no further
// event; used for horizon truncation.
int count_crossings(const NetworkMap& map, const SystemState& state,
                    double until);

struct DispatchDecision {
  enum Kind { Dispatch, EnqueueCommitted, EnqueueUncommitted };
  Kind kind = EnqueueUncommitted;
  int engineer = -1;
  static DispatchDecision dispatch(int m) { return {Dispatch, m}; }
  static DispatchDecision enqueue_committed(int m) { return {EnqueueCommitted, m}; }
  static DispatchDecision enqueue() { return {EnqueueUncommitted, -1}; }
};

class DispatchPolicy {
 public:
  virtual ~DispatchPolicy() = default;
  virtual DispatchDecision on_call(const NetworkMap& map,
                                   const SystemState& state, int machine) = 0;
  // Queue pull for an engineer freed at a type-2 event or arriving at a base
  // (type 3). Default: longest-waiting entry that is uncommitted or committed
  // to this engineer, ties by machine index.
  virtual std::optional<int> queue_pull(const NetworkMap& map,
                                        const SystemState& state, int engineer);
  // DP5 capability: permission to read sampled repair durations.
  virtual bool uses_repair_oracle() const { return false; }
  virtual std::string name() const = 0;
};

struct RelocationDecision {
  enum Kind { None, Move, Redeploy };
  Kind kind = None;
  int engineer = -1;
  int base = -1;
  static RelocationDecision none() { return {}; }
  static RelocationDecision move(int e, int b) { return {Move, e, b}; }
  static RelocationDecision redeploy(int b) { return {Redeploy, -1, b}; }
};

class RelocationPolicy {
 public:
  virtual ~RelocationPolicy() = default;
  // Type-1 event after `dispatched` was sent; may move one other idle
  // engineer to a base.
  virtual RelocationDecision on_dispatch(const NetworkMap& map,
                                         const SystemState& state,
                                         int dispatched) {
    (void)map; (void)state; (void)dispatched;
    return RelocationDecision::none();
  }
  // Type-2 event without a queue pull: base for the freed engineer.
  virtual int redeploy(const NetworkMap& map, const SystemState& state,
                       int engineer, int machine) = 0;
  virtual std::string name() const = 0;
};

// Step hook for traces and invariant checks in tests.
class SimObserver {
 public:
  virtual ~SimObserver() = default;
  virtual void on_step(const NetworkMap& map, const SystemState& before,
                       const Action& action, const SystemState& after,
                       int cost) = 0;
};

SimReport run_simulation(const NetworkMap& map, const std::vector<int>& allocation,
                         DispatchPolicy& dispatch, RelocationPolicy& relocate,
                         const SimConfig& config, SimObserver* observer = nullptr);

// Event-trace CSV: time, event_kind, machine, engineer, action_summary, queue_len.
class TraceWriter : public SimObserver {
 public:
  explicit TraceWriter(std::string path);
  ~TraceWriter() override;
  void on_step(const NetworkMap& map, const SystemState& before,
               const Action& action, const SystemState& after,
               int cost) override;

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace seng
