#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "seng/dispatch.hpp"
#include "seng/network.hpp"
#include "seng/relocate.hpp"
#include "seng/sim.hpp"

using namespace seng;

namespace {

NetworkMap line_map(std::vector<double> machine_x, std::vector<double> base_x,
                    double t_star) {
  std::vector<Location> machines, bases;
  for (size_t i = 0; i < machine_x.size(); ++i)
    machines.push_back({static_cast<int>(i), LocKind::Machine, machine_x[i], 0.0});
  for (size_t i = 0; i < base_x.size(); ++i)
    bases.push_back({static_cast<int>(i), LocKind::Base, base_x[i], 0.0});
  return NetworkMap(machines, bases, t_star);
}

// Engineers conserved, repairs have exactly one dedicated engineer, queue
// holds exactly the waiting machines with nobody en route, time monotone.
struct InvariantChecker : SimObserver {
  long steps = 0;
  long long penalties = 0;

  void on_step(const NetworkMap& map, const SystemState& before,
               const Action& action, const SystemState& after,
               int cost) override {
    ++steps;
    penalties += cost;
    CHECK(is_legal(map, before, action));
    CHECK(after.t >= before.t);
    CHECK(after.engineers.size() == before.engineers.size());
    for (int k = 0; k < map.num_machines(); ++k) {
      int serving = 0;
      for (const auto& e : after.engineers)
        if (e.repairing && e.dest == map.machine_ref(k)) ++serving;
      if (after.machines[k].status == MachineStatus::InRepair)
        CHECK(serving == 1);
      else
        CHECK(serving == 0);

      bool queued = after.machine_queued(k);
      bool waiting = after.machines[k].status == MachineStatus::Waiting;
      bool en_route = false;
      for (const auto& e : after.engineers)
        if (e.dest == map.machine_ref(k) && !e.repairing) en_route = true;
      CHECK(queued == (waiting && !en_route));
    }
  }
};

}  // namespace

TEST_CASE("initial state construction and allocation checks") {
  NetworkMap map = line_map({0, 5}, {1, 4}, 10.0);
  SystemState s = initial_state(map, {2, 1}, 3);
  CHECK(s.engineers.size() == 3);
  CHECK(s.engineers[0].dest == map.base_ref(0));
  CHECK(s.engineers[1].dest == map.base_ref(0));
  CHECK(s.engineers[2].dest == map.base_ref(1));
  for (const auto& m : s.machines) CHECK(m.status == MachineStatus::Working);
  CHECK(s.queue.empty());
  CHECK(s.t == 0.0);
  CHECK_THROWS_AS(initial_state(map, {1, 1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(initial_state(map, {1}, 1), std::invalid_argument);
}

TEST_CASE("type-1 legal actions with no idle engineers") {
  NetworkMap map = line_map({0, 5}, {1}, 10.0);
  SystemState s = initial_state(map, {1}, 1);
  // Engineer busy at machine 1; call from machine 0 just arrived.
  s.engineers[0].dest = map.machine_ref(1);
  s.engineers[0].repairing = true;
  s.machines[1].status = MachineStatus::InRepair;
  s.machines[0].status = MachineStatus::Waiting;
  s.machines[0].call_time = s.t;
  s.queue.push_back({0, -1});
  s.event = {EventType::CallArrival, 0, -1, -1};
  auto actions = legal_actions(map, s);
  REQUIRE(actions.size() == 1);
  const auto* a = std::get_if<Type1Action>(&actions[0]);
  REQUIRE(a != nullptr);
  CHECK(a->dispatch == -1);
}

TEST_CASE("type-2 legal actions match direct constraint enumeration") {
  NetworkMap map = line_map({0, 10}, {2, 8}, 10.0);
  SystemState s = initial_state(map, {2, 1}, 3);
  // Engineer 0 just finished repairing machine 0; engineers 1, 2 idle.
  s.engineers[0].dest = map.machine_ref(0);
  s.machines[0].status = MachineStatus::Working;
  s.event = {EventType::RepairFinished, 0, 0, -1};

  auto actions = legal_actions(map, s);
  // Independent count: every (redeploy target, relocation) combo that
  // is_legal accepts.
  std::set<std::tuple<int, int, int>> expect;
  for (LocRef tgt = 0; tgt < map.num_locations(); ++tgt)
    for (int n = -1; n < 3; ++n)
      for (int r = -1; r < map.num_bases(); ++r) {
        if ((n < 0) != (r < 0)) continue;
        Type2Action a{tgt, n, r};
        if (is_legal(map, s, a)) expect.insert({tgt, n, r});
      }
  CHECK(actions.size() == expect.size());
  // Queue empty, two bases, two idle others: 2 * (1 + 2*2) = 10.
  CHECK(actions.size() == 10);
  for (const auto& act : actions) {
    const auto* a = std::get_if<Type2Action>(&act);
    REQUIRE(a != nullptr);
    CHECK(expect.count({a->redeploy, a->reloc_engineer, a->reloc_base}) == 1);
  }
}

TEST_CASE("type-4 has no decision") {
  NetworkMap map = line_map({0}, {1}, 10.0);
  SystemState s = initial_state(map, {1}, 1);
  s.event = {EventType::ArriveMachine, 0, 0, -1};
  CHECK(legal_actions(map, s).empty());
  CHECK(is_legal(map, s, Action{std::monostate{}}));
  CHECK(!is_legal(map, s, Action{Type3Action{}}));
}

TEST_CASE("advance: deterministic arrival when nothing else can happen") {
  NetworkMap map = line_map({0}, {6}, 10.0);
  SimConfig cfg;
  cfg.lambda = 0.5;
  cfg.mu = 0.3;
  SystemState s = initial_state(map, {1}, 1);
  // The only machine waits; engineer en route with 2.5 left: W = 0, H = 0.
  s.machines[0].status = MachineStatus::Waiting;
  s.machines[0].call_time = -1.0;
  s.engineers[0].dest = map.machine_ref(0);
  s.engineers[0].remaining = 2.5;
  s.engineers[0].en_route = true;
  s.engineers[0].repair_duration = 1.0;
  s.event = {EventType::ArriveBase, -1, 0, 0};  // placeholder decision point
  std::mt19937_64 rng(1);
  auto res = advance(map, cfg, s, Action{Type3Action{}}, rng);
  CHECK(res.next.t == doctest::Approx(2.5));
  CHECK(res.next.event.type == EventType::ArriveMachine);
  CHECK(res.next.event.engineer == 0);
  CHECK(res.next.machines[0].status == MachineStatus::InRepair);
}

TEST_CASE("advance: competing exponentials without travelers") {
  // W = 3 working, H = 1 in repair: P(breakdown next) = 3l/(3l+mu).
  NetworkMap map = line_map({0, 1, 2, 3}, {5}, 10.0);
  SimConfig cfg;
  cfg.lambda = 0.01;
  cfg.mu = 0.2;
  std::mt19937_64 rng(77);
  std::exponential_distribution<double> repair(cfg.mu);

  const int N = 100000;
  int breakdowns = 0;
  for (int i = 0; i < N; ++i) {
    SystemState s = initial_state(map, {2}, 2);
    s.engineers[0].dest = map.machine_ref(3);
    s.engineers[0].repairing = true;
    s.engineers[0].repair_completion = s.t + repair(rng);
    s.machines[3].status = MachineStatus::InRepair;
    s.event = {EventType::ArriveMachine, 3, 0, -1};
    auto res = advance(map, cfg, s, Action{std::monostate{}}, rng);
    if (res.next.event.type == EventType::CallArrival) ++breakdowns;
  }
  const double p = 3 * cfg.lambda / (3 * cfg.lambda + cfg.mu);
  const double sigma = std::sqrt(p * (1 - p) / N);
  CHECK(std::fabs(static_cast<double>(breakdowns) / N - p) < 3 * sigma);
}

TEST_CASE("advance: arrival beats the exponential clock per closed form") {
  // W = 2, H = 1, traveler at distance 4: P(arrival) = exp(-0.22*4).
  NetworkMap map = line_map({0, 1, 2}, {5, 9}, 20.0);
  SimConfig cfg;
  cfg.lambda = 0.01;
  cfg.mu = 0.2;
  std::mt19937_64 rng(4242);
  std::exponential_distribution<double> repair(cfg.mu);

  const int N = 100000;
  int arrivals = 0;
  for (int i = 0; i < N; ++i) {
    SystemState s = initial_state(map, {1, 1}, 2);
    s.engineers[0].dest = map.machine_ref(0);
    s.engineers[0].repairing = true;
    s.engineers[0].repair_completion = s.t + repair(rng);
    s.machines[0].status = MachineStatus::InRepair;
    s.engineers[1].dest = map.base_ref(1);
    s.engineers[1].remaining = 4.0;
    s.engineers[1].en_route = true;
    s.event = {EventType::ArriveMachine, 0, 0, -1};
    auto res = advance(map, cfg, s, Action{std::monostate{}}, rng);
    if (res.next.event.type == EventType::ArriveBase) ++arrivals;
  }
  const double p = std::exp(-0.22 * 4.0);
  CHECK(p == doctest::Approx(0.4148).epsilon(1e-3));
  const double sigma = std::sqrt(p * (1 - p) / N);
  CHECK(std::fabs(static_cast<double>(arrivals) / N - p) < 3 * sigma);
}

TEST_CASE("advance rejects illegal actions") {
  NetworkMap map = line_map({0}, {1}, 10.0);
  SimConfig cfg;
  SystemState s = initial_state(map, {1}, 1);
  s.event = {EventType::ArriveMachine, 0, 0, -1};
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(advance(map, cfg, s, Action{Type1Action{0, -1, -1, -1}}, rng),
                  std::invalid_argument);
}

TEST_CASE("zero distances saturate on-time service") {
  // Machines and bases stacked on one point: responses take zero time.
  NetworkMap map = line_map({0, 0, 0}, {0, 0, 0}, 5.0);
  SimConfig cfg;
  cfg.lambda = 0.5;
  cfg.mu = 1.0;
  cfg.horizon = 200.0;
  cfg.seed = 9;
  ClosestDispatch dp;
  StaticRelocation rp({0, 1, 2});
  SimReport rep = run_simulation(map, {1, 1, 1}, dp, rp, cfg);
  CHECK(rep.calls_total > 50);
  CHECK(rep.fraction_on_time == doctest::Approx(1.0));
  CHECK(rep.penalties == 0);
}

TEST_CASE("no demand reports fraction one with a flag") {
  NetworkMap map = line_map({0, 2}, {1}, 10.0);
  SimConfig cfg;
  cfg.lambda = 1e-9;
  cfg.mu = 0.1;
  cfg.horizon = 10.0;
  ClosestDispatch dp;
  StaticRelocation rp({0});
  SimReport rep = run_simulation(map, {1}, dp, rp, cfg);
  CHECK(rep.no_calls);
  CHECK(rep.calls_total == 0);
  CHECK(rep.fraction_on_time == doctest::Approx(1.0));
}

TEST_CASE("invariants and cost identity over random runs") {
  for (std::uint64_t seed : {11, 22, 33}) {
    NetworkMap map = generate_map({8, 4, 0.8, 6.0, seed});
    SimConfig cfg;
    cfg.lambda = 0.02;
    cfg.mu = 0.15;
    cfg.horizon = 400.0;
    cfg.seed = seed * 13;
    ClosestDispatch dp;
    std::vector<int> home;
    std::vector<int> alloc(4, 0);
    for (int i = 0; i < 5; ++i) {
      alloc[i % 4]++;
    }
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < alloc[r]; ++i) home.push_back(r);
    StaticRelocation rp(home);
    InvariantChecker checker;
    SimReport rep = run_simulation(map, alloc, dp, rp, cfg, &checker);
    CHECK(checker.steps > 100);
    CHECK(rep.calls_total == rep.calls_on_time + rep.penalties);
    if (rep.calls_total > 0)
      CHECK(rep.fraction_on_time + static_cast<double>(rep.penalties) /
                                       rep.calls_total ==
            doctest::Approx(1.0).epsilon(1e-12));
    for (double r : rep.response_times) CHECK(r >= 0.0);
  }
}

TEST_CASE("seed determinism of full runs") {
  NetworkMap map = generate_map({6, 3, 1.0, 8.0, 5});
  SimConfig cfg;
  cfg.lambda = 0.03;
  cfg.mu = 0.2;
  cfg.horizon = 300.0;
  cfg.seed = 123;
  ClosestDispatch dp1, dp2;
  StaticRelocation rp1({0, 1, 2}), rp2({0, 1, 2});
  SimReport a = run_simulation(map, {1, 1, 1}, dp1, rp1, cfg);
  SimReport b = run_simulation(map, {1, 1, 1}, dp2, rp2, cfg);
  CHECK(a.calls_total == b.calls_total);
  CHECK(a.calls_on_time == b.calls_on_time);
  CHECK(a.penalties == b.penalties);
  REQUIRE(a.response_times.size() == b.response_times.size());
  for (size_t i = 0; i < a.response_times.size(); ++i)
    CHECK(a.response_times[i] == b.response_times[i]);
}

TEST_CASE("event trace is written") {
  NetworkMap map = generate_map({4, 2, 1.0, 8.0, 8});
  SimConfig cfg;
  cfg.lambda = 0.05;
  cfg.mu = 0.2;
  cfg.horizon = 100.0;
  cfg.seed = 4;
  ClosestDispatch dp;
  StaticRelocation rp({0, 1});
  const std::string path = "trace_test.csv";
  {
    TraceWriter trace(path);
    run_simulation(map, {1, 1}, dp, rp, cfg, &trace);
  }
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "time,event_kind,machine,engineer,action_summary,queue_len");
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines > 10);
  std::remove(path.c_str());
}

TEST_CASE("report json carries the contract fields") {
  SimReport rep;
  rep.calls_total = 10;
  rep.calls_on_time = 9;
  rep.fraction_on_time = 0.9;
  rep.penalties = 1;
  rep.response_times = {1.0, 2.0};
  const std::string j = rep.to_json();
  CHECK(j.find("\"calls_total\": 10") != std::string::npos);
  CHECK(j.find("fraction_on_time") != std::string::npos);
  CHECK(j.find("penalties") != std::string::npos);
}
