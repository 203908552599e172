#include "seng/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace seng {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<int> SystemState::idle_engineers(const NetworkMap& map) const {
  std::vector<int> idle;
  for (size_t m = 0; m < engineers.size(); ++m)
    if (map.is_base(engineers[m].dest)) idle.push_back(static_cast<int>(m));
  return idle;
}

std::vector<int> SystemState::working_machines() const {
  std::vector<int> w;
  for (size_t k = 0; k < machines.size(); ++k)
    if (machines[k].status == MachineStatus::Working) w.push_back(static_cast<int>(k));
  return w;
}

std::vector<int> SystemState::in_repair_machines() const {
  std::vector<int> h;
  for (size_t k = 0; k < machines.size(); ++k)
    if (machines[k].status == MachineStatus::InRepair) h.push_back(static_cast<int>(k));
  return h;
}

bool SystemState::machine_queued(int k) const { return queue_position(k) >= 0; }

int SystemState::queue_position(int k) const {
  for (size_t i = 0; i < queue.size(); ++i)
    if (queue[i].machine == k) return static_cast<int>(i);
  return -1;
}

SystemState initial_state(const NetworkMap& map,
                          const std::vector<int>& allocation, int M) {
  if (static_cast<int>(allocation.size()) != map.num_bases())
    throw std::invalid_argument("allocation needs one count per base");
  int sum = std::accumulate(allocation.begin(), allocation.end(), 0);
  if (sum != M)
    throw std::invalid_argument("allocation places " + std::to_string(sum) +
                                " engineers, expected " + std::to_string(M));
  SystemState s;
  s.machines.assign(map.num_machines(), {});
  for (int r = 0; r < map.num_bases(); ++r)
    for (int i = 0; i < allocation[r]; ++i) {
      EngineerState e;
      e.dest = map.base_ref(r);
      s.engineers.push_back(e);
    }
  return s;
}

namespace {

bool in_idle(const std::vector<int>& idle, int m) {
  return std::find(idle.begin(), idle.end(), m) != idle.end();
}

}  // namespace

std::vector<Action> legal_actions(const NetworkMap& map,
                                  const SystemState& state) {
  std::vector<Action> actions;
  const auto idle = state.idle_engineers(map);
  switch (state.event.type) {
    case EventType::CallArrival: {
      actions.emplace_back(Type1Action{});  // enqueue
      for (int m : idle) {
        actions.emplace_back(Type1Action{m, -1, -1, -1});
        for (int n : idle) {
          if (n == m) continue;
          for (int r = 0; r < map.num_bases(); ++r)
            actions.emplace_back(Type1Action{m, n, r, -1});
        }
      }
      break;
    }
    case EventType::RepairFinished: {
      std::vector<LocRef> targets;
      for (const auto& q : state.queue) targets.push_back(map.machine_ref(q.machine));
      for (int r = 0; r < map.num_bases(); ++r) targets.push_back(map.base_ref(r));
      for (LocRef tgt : targets) {
        actions.emplace_back(Type2Action{tgt, -1, -1});
        for (int n : idle)
          for (int r = 0; r < map.num_bases(); ++r)
            actions.emplace_back(Type2Action{tgt, n, r});
      }
      break;
    }
    case EventType::ArriveBase: {
      actions.emplace_back(Type3Action{-1});  // stay
      for (const auto& q : state.queue) actions.emplace_back(Type3Action{q.machine});
      break;
    }
    case EventType::ArriveMachine:
      break;  // no decision
    case EventType::None:
      actions.emplace_back(std::monostate{});
      break;
  }
  return actions;
}

bool is_legal(const NetworkMap& map, const SystemState& state,
              const Action& action) {
  const auto idle = state.idle_engineers(map);
  switch (state.event.type) {
    case EventType::CallArrival: {
      const auto* a = std::get_if<Type1Action>(&action);
      if (!a) return false;
      if (a->dispatch >= 0) {
        if (!in_idle(idle, a->dispatch)) return false;
        if (a->commit >= 0) return false;
      } else {
        // enqueue: no relocation allowed
        if (a->reloc_engineer >= 0 || a->reloc_base >= 0) return false;
        if (a->commit >= 0) {
          const auto& e = state.engineers[a->commit];
          if (map.is_base(e.dest)) return false;  // must be busy
        }
      }
      if (a->reloc_engineer >= 0) {
        if (a->reloc_engineer == a->dispatch) return false;
        if (!in_idle(idle, a->reloc_engineer)) return false;
        if (a->reloc_base < 0 || a->reloc_base >= map.num_bases()) return false;
      }
      return true;
    }
    case EventType::RepairFinished: {
      const auto* a = std::get_if<Type2Action>(&action);
      if (!a) return false;
      if (a->redeploy < 0 || a->redeploy >= map.num_locations()) return false;
      if (map.is_machine(a->redeploy) && !state.machine_queued(a->redeploy))
        return false;
      if (a->reloc_engineer >= 0) {
        if (!in_idle(idle, a->reloc_engineer)) return false;
        if (a->reloc_base < 0 || a->reloc_base >= map.num_bases()) return false;
      }
      return true;
    }
    case EventType::ArriveBase: {
      const auto* a = std::get_if<Type3Action>(&action);
      if (!a) return false;
      if (a->pull_machine >= 0 && !state.machine_queued(a->pull_machine))
        return false;
      return true;
    }
    case EventType::ArriveMachine:
    case EventType::None:
      return std::holds_alternative<std::monostate>(action);
  }
  return false;
}

namespace {

void remove_from_queue(SystemState& s, int machine) {
  int pos = s.queue_position(machine);
  if (pos < 0) throw std::logic_error("machine not in queue");
  s.queue.erase(s.queue.begin() + pos);
}

// Redirect engineer m toward `target`. The remaining time accumulates: the
// engineer finishes the current leg and then travels from its old destination.
void set_destination(const NetworkMap& map, SystemState& s, int m, LocRef target) {
  EngineerState& e = s.engineers[m];
  if (target == e.dest) return;
  e.remaining += map.travel(e.dest, target);
  e.dest = target;
  e.en_route = true;
}

void dispatch_to_machine(const NetworkMap& map, const SimConfig& config,
                         SystemState& s, int m, int machine,
                         std::mt19937_64& rng) {
  EngineerState& e = s.engineers[m];
  e.remaining += map.travel(e.dest, map.machine_ref(machine));
  e.dest = map.machine_ref(machine);
  e.en_route = true;
  e.dispatch_time = s.t;
  std::exponential_distribution<double> rep(config.mu);
  e.repair_duration = rep(rng);
}

void apply_action(const NetworkMap& map, const SimConfig& config,
                  SystemState& s, const Action& action, std::mt19937_64& rng) {
  if (const auto* a1 = std::get_if<Type1Action>(&action)) {
    const int k = s.event.machine;
    if (a1->dispatch >= 0) {
      remove_from_queue(s, k);
      dispatch_to_machine(map, config, s, a1->dispatch, k, rng);
      if (a1->reloc_engineer >= 0)
        set_destination(map, s, a1->reloc_engineer, map.base_ref(a1->reloc_base));
    } else if (a1->commit >= 0) {
      s.queue[s.queue_position(k)].committed = a1->commit;
    }
  } else if (const auto* a2 = std::get_if<Type2Action>(&action)) {
    const int f = s.event.engineer;
    if (map.is_machine(a2->redeploy)) {
      const int q = map.machine_index(a2->redeploy);
      remove_from_queue(s, q);
      dispatch_to_machine(map, config, s, f, q, rng);
    } else {
      set_destination(map, s, f, a2->redeploy);
    }
    if (a2->reloc_engineer >= 0)
      set_destination(map, s, a2->reloc_engineer, map.base_ref(a2->reloc_base));
  } else if (const auto* a3 = std::get_if<Type3Action>(&action)) {
    if (a3->pull_machine >= 0) {
      remove_from_queue(s, a3->pull_machine);
      dispatch_to_machine(map, config, s, s.event.engineer, a3->pull_machine, rng);
    }
  }
}

}  // namespace

int count_crossings(const NetworkMap& map, const SystemState& state,
                    double until) {
  const double t_star = map.t_star();
  int crossings = 0;
  for (const auto& mk : state.machines) {
    if (mk.status != MachineStatus::Waiting) continue;
    if (state.t - mk.call_time <= t_star && until - mk.call_time > t_star)
      ++crossings;
  }
  return crossings;
}

AdvanceResult advance(const NetworkMap& map, const SimConfig& config,
                      const SystemState& state, const Action& action,
                      std::mt19937_64& rng) {
  if (!is_legal(map, state, action)) {
    std::ostringstream msg;
    msg << "illegal action for event type "
        << static_cast<int>(state.event.type) << " at t=" << state.t;
    throw std::invalid_argument(msg.str());
  }
  AdvanceResult res;
  SystemState& s = res.next;
  s = state;
  apply_action(map, config, s, action, rng);

  // Candidate next events: closest traveling arrival (d), earliest repair
  // completion, and an exponential breakdown clock over working machines.
  double d_min = kInf;
  int arr_eng = -1;
  for (size_t m = 0; m < s.engineers.size(); ++m)
    if (s.engineers[m].en_route && s.engineers[m].remaining < d_min) {
      d_min = s.engineers[m].remaining;
      arr_eng = static_cast<int>(m);
    }
  double h_min = kInf;
  int rep_machine = -1;
  for (size_t m = 0; m < s.engineers.size(); ++m) {
    const auto& e = s.engineers[m];
    if (!e.repairing) continue;
    const double left = e.repair_completion - s.t;
    if (left < h_min) {
      h_min = left;
      rep_machine = map.machine_index(e.dest);
    }
  }
  const auto working = s.working_machines();
  double t_break = kInf;
  if (!working.empty()) {
    std::exponential_distribution<double> breakdown(
        config.lambda * static_cast<double>(working.size()));
    t_break = breakdown(rng);
  }

  // Tie order (zero-probability except deterministic arrival ties, which are
  // resolved by engineer index above): repair completion, arrival, breakdown.
  enum { kRepair, kArrival, kBreakdown, kNone } kind = kNone;
  double delta = kInf;
  if (h_min < delta) { delta = h_min; kind = kRepair; }
  if (d_min < delta) { delta = d_min; kind = kArrival; }
  if (t_break < delta) { delta = t_break; kind = kBreakdown; }

  if (kind == kNone) {
    s.t = kInf;
    s.event = Event{};
    res.cost = 0;
    return res;
  }

  const double t_new = state.t + delta;
  res.cost = count_crossings(map, s, t_new);

  for (auto& e : s.engineers)
    if (e.en_route) e.remaining = std::max(0.0, e.remaining - delta);
  s.t = t_new;

  switch (kind) {
    case kBreakdown: {
      std::uniform_int_distribution<size_t> pick(0, working.size() - 1);
      const int k = working[pick(rng)];
      s.machines[k].status = MachineStatus::Waiting;
      s.machines[k].call_time = s.t;
      s.queue.push_back({k, -1});
      s.event = {EventType::CallArrival, k, -1, -1};
      break;
    }
    case kRepair: {
      int eng = -1;
      for (size_t m = 0; m < s.engineers.size(); ++m)
        if (s.engineers[m].repairing &&
            s.engineers[m].dest == map.machine_ref(rep_machine))
          eng = static_cast<int>(m);
      s.machines[rep_machine].status = MachineStatus::Working;
      s.engineers[eng].repairing = false;
      s.event = {EventType::RepairFinished, rep_machine, eng, -1};
      break;
    }
    case kArrival: {
      EngineerState& e = s.engineers[arr_eng];
      e.en_route = false;
      e.remaining = 0.0;
      if (map.is_base(e.dest)) {
        s.event = {EventType::ArriveBase, -1, arr_eng, map.base_index(e.dest)};
      } else {
        const int k = map.machine_index(e.dest);
        e.repairing = true;
        e.repair_completion = s.t + e.repair_duration;
        s.machines[k].status = MachineStatus::InRepair;
        s.event = {EventType::ArriveMachine, k, arr_eng, -1};
      }
      break;
    }
    default:
      break;
  }
  return res;
}

std::optional<int> DispatchPolicy::queue_pull(const NetworkMap& map,
                                              const SystemState& state,
                                              int engineer) {
  (void)map;
  int best = -1;
  double best_call = kInf;
  for (const auto& q : state.queue) {
    if (q.committed >= 0 && q.committed != engineer) continue;
    const double call = state.machines[q.machine].call_time;
    if (call < best_call ||
        (call == best_call && best >= 0 && q.machine < best)) {
      best_call = call;
      best = q.machine;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

namespace {

Action decide(const NetworkMap& map, const SystemState& state,
              DispatchPolicy& dispatch, RelocationPolicy& relocate) {
  switch (state.event.type) {
    case EventType::CallArrival: {
      const int k = state.event.machine;
      DispatchDecision dd = dispatch.on_call(map, state, k);
      Type1Action a;
      if (dd.kind == DispatchDecision::Dispatch) {
        a.dispatch = dd.engineer;
        RelocationDecision rd = relocate.on_dispatch(map, state, dd.engineer);
        if (rd.kind == RelocationDecision::Move) {
          a.reloc_engineer = rd.engineer;
          a.reloc_base = rd.base;
        }
      } else if (dd.kind == DispatchDecision::EnqueueCommitted) {
        a.commit = dd.engineer;
      }
      return a;
    }
    case EventType::RepairFinished: {
      const int m = state.event.engineer;
      Type2Action a;
      if (auto pull = dispatch.queue_pull(map, state, m)) {
        a.redeploy = map.machine_ref(*pull);
      } else {
        a.redeploy = map.base_ref(
            relocate.redeploy(map, state, m, state.event.machine));
      }
      return a;
    }
    case EventType::ArriveBase: {
      Type3Action a;
      if (auto pull = dispatch.queue_pull(map, state, state.event.engineer))
        a.pull_machine = *pull;
      return a;
    }
    default:
      return std::monostate{};
  }
}

}  // namespace

SimReport run_simulation(const NetworkMap& map, const std::vector<int>& allocation,
                         DispatchPolicy& dispatch, RelocationPolicy& relocate,
                         const SimConfig& config, SimObserver* observer) {
  if (config.lambda <= 0 || config.mu <= 0 || config.horizon <= 0)
    throw std::invalid_argument("rates and horizon must be positive");
  if (config.t_star != 0.0 &&
      std::fabs(config.t_star - map.t_star()) > 1e-9)
    throw std::invalid_argument("config t_star does not match the map");

  const double t_star = map.t_star();
  const int M = std::accumulate(allocation.begin(), allocation.end(), 0);
  SystemState state = initial_state(map, allocation, M);
  std::mt19937_64 rng(config.seed);

  SimReport report;
  struct CallTrack {
    double call_time = 0.0;
    bool open = false;
    bool determined = false;
  };
  std::vector<CallTrack> track(map.num_machines());
  double broken_sum = 0.0;

  auto count_call = [&](int k, bool on_time) {
    if (track[k].determined) return;
    track[k].determined = true;
    if (track[k].call_time < config.warmup) return;
    ++report.calls_total;
    if (on_time)
      ++report.calls_on_time;
    else
      ++report.penalties;
  };

  while (true) {
    Action action = decide(map, state, dispatch, relocate);
    AdvanceResult step = advance(map, config, state, action, rng);
    if (step.next.t > config.horizon) {
      // Truncate at the horizon: the sampled post-horizon event is discarded,
      // crossings up to the horizon still count. Actions never change machine
      // statuses, so the pre-action state is enough here.
      for (int k = 0; k < map.num_machines(); ++k) {
        const auto& mk = state.machines[k];
        if (mk.status == MachineStatus::Waiting && track[k].open &&
            state.t - mk.call_time <= t_star &&
            config.horizon - mk.call_time > t_star)
          count_call(k, false);
      }
      break;
    }

    // Per-machine crossing bookkeeping (the same set advance() counted).
    for (int k = 0; k < map.num_machines(); ++k) {
      const auto& before = state.machines[k];
      if (before.status != MachineStatus::Waiting || !track[k].open) continue;
      if (state.t - before.call_time <= t_star &&
          step.next.t - before.call_time > t_star)
        count_call(k, false);
    }

    const Event& ev = step.next.event;
    switch (ev.type) {
      case EventType::CallArrival:
        track[ev.machine] = {step.next.t, true, false};
        break;
      case EventType::ArriveMachine: {
        const double response =
            step.next.t - step.next.machines[ev.machine].call_time;
        if (track[ev.machine].open) {
          if (track[ev.machine].call_time >= config.warmup)
            report.response_times.push_back(response);
          count_call(ev.machine, response <= t_star);
        }
        break;
      }
      case EventType::RepairFinished: {
        broken_sum += step.next.t - step.next.engineers[ev.engineer].dispatch_time;
        ++report.repairs_completed;
        track[ev.machine].open = false;
        break;
      }
      default:
        break;
    }

    if (observer) observer->on_step(map, state, action, step.next, step.cost);
    state = std::move(step.next);
    if (state.t == kInf) break;  // no further events possible
  }

  if (report.calls_total == 0) {
    report.no_calls = true;
    report.fraction_on_time = 1.0;
  } else {
    report.fraction_on_time =
        static_cast<double>(report.calls_on_time) / report.calls_total;
  }
  if (report.repairs_completed > 0)
    report.mean_broken_duration = broken_sum / report.repairs_completed;
  return report;
}

std::string SimReport::to_json() const {
  nlohmann::json j;
  j["calls_total"] = calls_total;
  j["calls_on_time"] = calls_on_time;
  j["fraction_on_time"] = fraction_on_time;
  j["penalties"] = penalties;
  j["response_times"] = response_times;
  j["no_calls"] = no_calls;
  j["mean_broken_duration"] = mean_broken_duration;
  j["repairs_completed"] = repairs_completed;
  return j.dump(2);
}

struct TraceWriter::Impl {
  std::ofstream out;
};

TraceWriter::TraceWriter(std::string path) : impl_(new Impl) {
  impl_->out.open(path);
  impl_->out << "time,event_kind,machine,engineer,action_summary,queue_len\n";
}

TraceWriter::~TraceWriter() { delete impl_; }

namespace {

std::string action_summary(const Action& action) {
  if (const auto* a = std::get_if<Type1Action>(&action)) {
    std::ostringstream os;
    if (a->dispatch >= 0) {
      os << "dispatch:" << a->dispatch;
      if (a->reloc_engineer >= 0)
        os << ";move:" << a->reloc_engineer << "->" << a->reloc_base;
    } else if (a->commit >= 0) {
      os << "enqueue-committed:" << a->commit;
    } else {
      os << "enqueue";
    }
    return os.str();
  }
  if (const auto* a = std::get_if<Type2Action>(&action)) {
    std::ostringstream os;
    os << "redeploy:" << a->redeploy;
    if (a->reloc_engineer >= 0)
      os << ";move:" << a->reloc_engineer << "->" << a->reloc_base;
    return os.str();
  }
  if (const auto* a = std::get_if<Type3Action>(&action))
    return a->pull_machine >= 0 ? "pull:" + std::to_string(a->pull_machine)
                                : "stay";
  return "none";
}

const char* event_name(EventType t) {
  switch (t) {
    case EventType::CallArrival: return "call";
    case EventType::RepairFinished: return "repair_done";
    case EventType::ArriveBase: return "arrive_base";
    case EventType::ArriveMachine: return "arrive_machine";
    default: return "none";
  }
}

}  // namespace

void TraceWriter::on_step(const NetworkMap&, const SystemState&,
                          const Action& action, const SystemState& after,
                          int) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", after.t);
  impl_->out << buf << ',' << event_name(after.event.type) << ','
             << after.event.machine << ',' << after.event.engineer << ','
             << action_summary(action) << ',' << after.queue.size() << '\n';
}

}  // namespace seng
