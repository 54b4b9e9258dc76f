#pragma once

// Farthest point sub-sampling of vantage points.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "objnav/grid_map.hpp"

namespace objnav {

struct VantageSet {
  std::vector<Cell> points;  // points[0] is the start cell
  double coverage_radius = 0.0;

  std::size_t size() const { return points.size(); }
};

namespace detail {
inline std::int64_t squared_cells(Cell a, Cell b) {
  const std::int64_t dr = a.row - b.row;
  const std::int64_t dc = a.col - b.col;
  return dr * dr + dc * dc;
}
}  // namespace detail

/// Max over `cells` of the Euclidean distance (meters) to the nearest point.
inline double coverage_radius(const OccupancyMap& map, const std::vector<Cell>& points,
                              const std::vector<Cell>& cells) {
  if (points.empty()) throw Error("coverage radius of an empty vantage set");
  std::int64_t worst = 0;
  for (Cell c : cells) {
    std::int64_t best = detail::squared_cells(c, points.front());
    for (Cell p : points) best = std::min(best, detail::squared_cells(c, p));
    worst = std::max(worst, best);
  }
  return std::sqrt(static_cast<double>(worst)) * map.cell_size();
}

/// Coverage over every feasible cell of the map: the epsilon of the cover.
inline double coverage_radius(const OccupancyMap& map, const std::vector<Cell>& points) {
  return coverage_radius(map, points, map.feasible_cells());
}

/// Greedy farthest point sampling under the Euclidean metric, seeded at
/// `start` and restricted to start's connected component. Each new point
/// maximizes the min-distance to the points already chosen; ties go to the
/// lowest (row, col).
inline VantageSet farthest_point_sample(const OccupancyMap& map, Cell start, std::size_t k) {
  if (!map.feasible(start)) throw Error("FPS start " + to_string(start) + " is not feasible");
  if (k == 0) throw Error("FPS requires k >= 1");
  const std::vector<Cell> pool = map.component_cells(map.component(start));
  if (k > pool.size())
    throw Error("FPS k=" + std::to_string(k) + " exceeds the " + std::to_string(pool.size()) +
                " reachable feasible cells");

  VantageSet out;
  out.points.reserve(k);
  out.points.push_back(start);
  std::vector<std::int64_t> nearest(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) nearest[i] = detail::squared_cells(pool[i], start);
  while (out.points.size() < k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i)
      if (nearest[i] > nearest[best]) best = i;
    const Cell pick = pool[best];
    out.points.push_back(pick);
    for (std::size_t i = 0; i < pool.size(); ++i)
      nearest[i] = std::min(nearest[i], detail::squared_cells(pool[i], pick));
  }
  std::int64_t worst = 0;
  for (auto v : nearest) worst = std::max(worst, v);
  out.coverage_radius = std::sqrt(static_cast<double>(worst)) * map.cell_size();
  return out;
}

}  // namespace objnav
