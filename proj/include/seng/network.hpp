#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seng {

// Travel-matrix row index. Machines occupy rows 0..K-1, bases rows K..K+R-1.
using LocRef = int;

enum class LocKind { Machine, Base };

struct Location {
  int id = 0;  // index within its kind, 0-based
  LocKind kind = LocKind::Machine;
  double x = 0.0;
  double y = 0.0;
};

struct MapGenConfig {
  int K = 1;          // machines
  int R = 1;          // base stations
  double d = 1.0;     // map density: mean pairwise distance = t_star / d
  double t_star = 1.0;
  std::uint64_t seed = 0;
};

// Service region: machine/base locations and deterministic pairwise travel
// times in the same units as t_star.
class NetworkMap {
 public:
  NetworkMap() = default;
  // Builds the travel matrix from explicit coordinates (Euclidean times).
  NetworkMap(std::vector<Location> machines, std::vector<Location> bases,
             double t_star);

  int num_machines() const { return static_cast<int>(machines_.size()); }
  int num_bases() const { return static_cast<int>(bases_.size()); }
  int num_locations() const { return num_machines() + num_bases(); }
  double t_star() const { return t_star_; }

  const std::vector<Location>& machines() const { return machines_; }
  const std::vector<Location>& bases() const { return bases_; }

  LocRef machine_ref(int k) const;
  LocRef base_ref(int r) const;
  bool is_base(LocRef l) const { return l >= num_machines(); }
  bool is_machine(LocRef l) const { return l >= 0 && l < num_machines(); }
  int base_index(LocRef l) const;     // LocRef -> base id
  int machine_index(LocRef l) const;  // LocRef -> machine id

  double travel(LocRef a, LocRef b) const;
  double travel(const Location& a, const Location& b) const;
  double max_travel() const;

  // Generation metadata, kept for serialization; zero when built directly.
  double density = 0.0;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static NetworkMap from_json(const std::string& text);

 private:
  std::vector<Location> machines_;
  std::vector<Location> bases_;
  std::vector<double> travel_;  // (K+R)x(K+R), row-major
  double t_star_ = 0.0;
};

// Samples K+R points uniformly in a square and rescales the coordinates so
// the mean pairwise distance equals t_star/d. Resamples (up to a bounded
// number of attempts) until every machine can be reached from at least one
// base within t_star. Deterministic given the seed.
NetworkMap generate_map(const MapGenConfig& config);

double travel_time(const NetworkMap& map, const Location& a, const Location& b);

// N_k = bases within t_star of machine k; never empty on a valid map.
std::vector<std::vector<int>> coverage_sets(const NetworkMap& map);

}  // namespace seng
