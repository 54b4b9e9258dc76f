#pragma once

// Object spawn distributions over furniture surfaces and seeded RNG streams.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "objnav/grid_map.hpp"

namespace objnav {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index); identical whether episodes run
/// serially or in parallel.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6f626a6eU};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

struct ObjectClass {
  std::string name;
  std::vector<std::pair<std::string, double>> distribution;  // furniture id -> probability
};

struct SpawnModel {
  std::vector<ObjectClass> objects;
  bool peaky = false;

  std::size_t size() const { return objects.size(); }

  void validate(const OccupancyMap& map) const {
    if (objects.empty()) throw Error("spawn model has no object classes");
    for (const auto& o : objects) {
      if (o.distribution.empty()) throw Error("object '" + o.name + "' has an empty spawn distribution");
      double total = 0.0;
      std::size_t support = 0;
      for (const auto& [fid, p] : o.distribution) {
        if (!map.has_furniture(fid)) throw Error("object '" + o.name + "' references unknown furniture '" + fid + "'");
        if (!(p >= 0.0)) throw Error("object '" + o.name + "' has a negative spawn probability");
        total += p;
        if (p > 0.0) ++support;
      }
      if (std::abs(total - 1.0) > 1e-9) throw Error("spawn probabilities of '" + o.name + "' do not sum to 1");
      if (peaky && support != 1) throw Error("peaky object '" + o.name + "' must use exactly one furniture");
    }
  }

  friend bool operator==(const SpawnModel&, const SpawnModel&) = default;
};

/// Furniture f ~ P_i, then a surface cell of f uniformly at random.
inline Cell spawn_object(const OccupancyMap& map, const SpawnModel& model, int object, Rng& rng) {
  if (object < 0 || static_cast<std::size_t>(object) >= model.size())
    throw Error("invalid object id " + std::to_string(object));
  const auto& dist = model.objects[static_cast<std::size_t>(object)].distribution;
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t chosen = dist.size();
  for (std::size_t f = 0; f < dist.size(); ++f) {
    acc += dist[f].second;
    if (dist[f].second > 0.0 && u < acc) {
      chosen = f;
      break;
    }
  }
  if (chosen == dist.size()) {  // rounding at the top end of the cumulative sum
    for (std::size_t f = dist.size(); f-- > 0;)
      if (dist[f].second > 0.0) {
        chosen = f;
        break;
      }
  }
  const auto& surface = map.furniture(dist[chosen].first).surface_cells;
  if (surface.empty()) throw Error("furniture '" + dist[chosen].first + "' has an empty surface");
  return surface[uniform_index(rng, surface.size())];
}

}  // namespace objnav
