#include "seng/network.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace seng {

namespace {

double euclid(const Location& a, const Location& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

NetworkMap::NetworkMap(std::vector<Location> machines,
                       std::vector<Location> bases, double t_star)
    : machines_(std::move(machines)), bases_(std::move(bases)), t_star_(t_star) {
  if (machines_.empty() || bases_.empty())
    throw std::invalid_argument("map needs at least one machine and one base");
  if (t_star_ <= 0) throw std::invalid_argument("t_star must be positive");
  for (int k = 0; k < num_machines(); ++k) {
    machines_[k].id = k;
    machines_[k].kind = LocKind::Machine;
  }
  for (int r = 0; r < num_bases(); ++r) {
    bases_[r].id = r;
    bases_[r].kind = LocKind::Base;
  }
  const int n = num_locations();
  travel_.assign(static_cast<size_t>(n) * n, 0.0);
  auto loc = [&](int i) -> const Location& {
    return i < num_machines() ? machines_[i] : bases_[i - num_machines()];
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double t = euclid(loc(i), loc(j));
      travel_[i * n + j] = t;
      travel_[j * n + i] = t;
    }
}

LocRef NetworkMap::machine_ref(int k) const {
  if (k < 0 || k >= num_machines()) throw std::out_of_range("unknown machine");
  return k;
}

LocRef NetworkMap::base_ref(int r) const {
  if (r < 0 || r >= num_bases()) throw std::out_of_range("unknown base");
  return num_machines() + r;
}

int NetworkMap::base_index(LocRef l) const {
  if (!is_base(l) || l >= num_locations()) throw std::out_of_range("not a base ref");
  return l - num_machines();
}

int NetworkMap::machine_index(LocRef l) const {
  if (!is_machine(l)) throw std::out_of_range("not a machine ref");
  return l;
}

double NetworkMap::travel(LocRef a, LocRef b) const {
  const int n = num_locations();
  if (a < 0 || b < 0 || a >= n || b >= n)
    throw std::out_of_range("location not in map");
  return travel_[a * n + b];
}

double NetworkMap::travel(const Location& a, const Location& b) const {
  auto ref = [&](const Location& l) {
    return l.kind == LocKind::Machine ? machine_ref(l.id) : base_ref(l.id);
  };
  return travel(ref(a), ref(b));
}

double NetworkMap::max_travel() const {
  double m = 0.0;
  for (double t : travel_) m = std::max(m, t);
  return m;
}

double travel_time(const NetworkMap& map, const Location& a, const Location& b) {
  return map.travel(a, b);
}

std::vector<std::vector<int>> coverage_sets(const NetworkMap& map) {
  std::vector<std::vector<int>> sets(map.num_machines());
  for (int k = 0; k < map.num_machines(); ++k) {
    for (int r = 0; r < map.num_bases(); ++r)
      if (map.travel(map.base_ref(r), map.machine_ref(k)) <= map.t_star())
        sets[k].push_back(r);
    if (sets[k].empty())
      throw std::runtime_error("machine " + std::to_string(k) +
                               " unreachable within t_star");
  }
  return sets;
}

NetworkMap generate_map(const MapGenConfig& config) {
  if (config.K < 1 || config.R < 1 || config.d <= 0 || config.t_star <= 0)
    throw std::invalid_argument("invalid map generation config");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = config.K + config.R;
  const double target_mean = config.t_star / config.d;
  constexpr int kMaxAttempts = 1000;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = unit(rng);
      ys[i] = unit(rng);
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        sum += std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
    const double pairs = 0.5 * n * (n - 1);
    const double mean = sum / pairs;
    if (mean <= 0) continue;  // all points coincide; resample
    const double scale = target_mean / mean;

    std::vector<Location> machines(config.K), bases(config.R);
    for (int k = 0; k < config.K; ++k)
      machines[k] = {k, LocKind::Machine, xs[k] * scale, ys[k] * scale};
    for (int r = 0; r < config.R; ++r)
      bases[r] = {r, LocKind::Base, xs[config.K + r] * scale, ys[config.K + r] * scale};

    NetworkMap map(std::move(machines), std::move(bases), config.t_star);
    bool feasible = true;
    for (int k = 0; k < config.K && feasible; ++k) {
      bool covered = false;
      for (int r = 0; r < config.R && !covered; ++r)
        covered = map.travel(map.base_ref(r), map.machine_ref(k)) <= config.t_star;
      feasible = covered;
    }
    if (!feasible) continue;
    map.density = config.d;
    map.seed = config.seed;
    return map;
  }
  std::ostringstream msg;
  msg << "could not generate a feasible map in " << kMaxAttempts
      << " attempts (K=" << config.K << ", R=" << config.R << ", d=" << config.d
      << ", t_star=" << config.t_star << ", seed=" << config.seed << ")";
  throw std::runtime_error(msg.str());
}

std::string NetworkMap::to_json() const {
  nlohmann::json j;
  j["K"] = num_machines();
  j["R"] = num_bases();
  j["t_star"] = t_star_;
  j["d"] = density;
  j["seed"] = seed;
  auto coords = [](const std::vector<Location>& ls) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : ls) arr.push_back({l.x, l.y});
    return arr;
  };
  j["machine_coords"] = coords(machines_);
  j["base_coords"] = coords(bases_);
  return j.dump(2);
}

NetworkMap NetworkMap::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int K = j.at("K").get<int>();
  const int R = j.at("R").get<int>();
  std::vector<Location> machines(K), bases(R);
  const auto& mc = j.at("machine_coords");
  const auto& bc = j.at("base_coords");
  if (static_cast<int>(mc.size()) != K || static_cast<int>(bc.size()) != R)
    throw std::invalid_argument("coordinate count does not match K/R");
  for (int k = 0; k < K; ++k)
    machines[k] = {k, LocKind::Machine, mc[k][0].get<double>(), mc[k][1].get<double>()};
  for (int r = 0; r < R; ++r)
    bases[r] = {r, LocKind::Base, bc[r][0].get<double>(), bc[r][1].get<double>()};
  NetworkMap map(std::move(machines), std::move(bases), j.at("t_star").get<double>());
  map.density = j.value("d", 0.0);
  map.seed = j.value("seed", std::uint64_t{0});
  return map;
}

}  // namespace seng
