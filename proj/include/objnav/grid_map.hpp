#pragma once

// Occupancy-grid scene model: parsing, wall-distance transform, collision-free
// shortest paths and visibility sets.

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "objnav/common.hpp"

namespace objnav {

enum class Occupancy : std::uint8_t { Feasible = 0, Obstacle = 1 };

struct FurnitureRegion {
  std::string id;
  std::vector<Cell> cells;          // row-major order
  std::vector<Cell> surface_cells;  // subset of cells where objects may rest
};

class OccupancyMap {
 public:
  OccupancyMap() = default;
  OccupancyMap(Grid<Occupancy> cells, double cell_size, std::vector<FurnitureRegion> furniture)
      : cells_(std::move(cells)), cell_size_(cell_size), furniture_(std::move(furniture)) {
    if (!(cell_size_ > 0.0)) throw Error("cell_size must be positive");
    for (const auto& f : furniture_) {
      if (f.cells.empty() || f.surface_cells.empty())
        throw Error("furniture '" + f.id + "' has no cells");
      for (Cell c : f.cells)
        if (!cells_.contains(c) || cells_[c] != Occupancy::Obstacle)
          throw Error("furniture '" + f.id + "' covers a non-obstacle cell " + to_string(c));
      for (Cell c : f.surface_cells)
        if (!std::binary_search(f.cells.begin(), f.cells.end(), c))
          throw Error("furniture '" + f.id + "' surface cell outside the region");
    }
    build_components();
  }

  int width() const { return cells_.width(); }
  int height() const { return cells_.height(); }
  double cell_size() const { return cell_size_; }
  const Grid<Occupancy>& cells() const { return cells_; }
  const std::vector<FurnitureRegion>& furniture() const { return furniture_; }

  bool contains(Cell c) const { return cells_.contains(c); }
  bool feasible(Cell c) const { return contains(c) && cells_[c] == Occupancy::Feasible; }

  const FurnitureRegion& furniture(std::string_view id) const {
    for (const auto& f : furniture_)
      if (f.id == id) return f;
    throw Error("unknown furniture '" + std::string(id) + "'");
  }
  bool has_furniture(std::string_view id) const {
    return std::any_of(furniture_.begin(), furniture_.end(), [&](const auto& f) { return f.id == id; });
  }

  std::vector<Cell> feasible_cells() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_.at(i) == Occupancy::Feasible) out.push_back(cells_.cell(i));
    return out;
  }
  std::size_t feasible_count() const {
    return static_cast<std::size_t>(
        std::count(cells_.data().begin(), cells_.data().end(), Occupancy::Feasible));
  }

  /// Connected-component label of a feasible cell (-1 for obstacles).
  int component(Cell c) const { return component_[c]; }
  int component_count() const { return static_cast<int>(component_sizes_.size()); }
  /// Label of the largest component; lowest label wins ties.
  int largest_component() const {
    if (component_sizes_.empty()) return -1;
    return static_cast<int>(std::max_element(component_sizes_.begin(), component_sizes_.end()) -
                            component_sizes_.begin());
  }
  std::vector<Cell> component_cells(int label) const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < component_.size(); ++i)
      if (component_.at(i) == label) out.push_back(component_.cell(i));
    return out;
  }

 private:
  void build_components();

  Grid<Occupancy> cells_;
  double cell_size_ = 0.1;
  std::vector<FurnitureRegion> furniture_;
  Grid<int> component_;
  std::vector<std::size_t> component_sizes_;
};

/// One motion step of the 8-connected grid: straight moves cost 1, diagonal sqrt(2).
struct Move {
  int dr;
  int dc;
  bool diagonal;
};
inline constexpr std::array<Move, 8> kMoves{{{-1, 0, false},
                                              {1, 0, false},
                                              {0, -1, false},
                                              {0, 1, false},
                                              {-1, -1, true},
                                              {-1, 1, true},
                                              {1, -1, true},
                                              {1, 1, true}}};

/// Diagonal moves may not cut the corner of an obstacle.
inline bool can_move(const OccupancyMap& map, Cell from, const Move& m) {
  const Cell to{from.row + m.dr, from.col + m.dc};
  if (!map.feasible(to)) return false;
  if (!m.diagonal) return true;
  return map.feasible({from.row + m.dr, from.col}) && map.feasible({from.row, from.col + m.dc});
}

inline void OccupancyMap::build_components() {
  component_ = Grid<int>(height(), width(), -1);
  component_sizes_.clear();
  std::vector<Cell> stack;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_.at(i) != Occupancy::Feasible || component_.at(i) != -1) continue;
    const int label = static_cast<int>(component_sizes_.size());
    std::size_t size = 0;
    stack.push_back(cells_.cell(i));
    component_.at(i) = label;
    while (!stack.empty()) {
      const Cell c = stack.back();
      stack.pop_back();
      ++size;
      for (const auto& m : kMoves) {
        if (!can_move(*this, c, m)) continue;
        const Cell n{c.row + m.dr, c.col + m.dc};
        if (component_[n] == -1) {
          component_[n] = label;
          stack.push_back(n);
        }
      }
    }
    component_sizes_.push_back(size);
  }
}

/// Parses the ASCII legend: '.' feasible, '#' obstacle, 'A'-'Z' furniture
/// (obstacle cells grouped by letter; every cell of a letter is surface).
inline OccupancyMap parse_map(std::string_view text, double cell_size = 0.1) {
  std::vector<std::string> rows;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(line);
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty() || rows.front().empty()) throw Error("map is empty");

  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  Grid<Occupancy> cells(height, width, Occupancy::Feasible);
  std::map<char, std::vector<Cell>> groups;
  for (int r = 0; r < height; ++r) {
    if (static_cast<int>(rows[r].size()) != width)
      throw Error("ragged map: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                  " columns, expected " + std::to_string(width));
    for (int c = 0; c < width; ++c) {
      const char ch = rows[r][c];
      if (ch == '.') continue;
      if (ch == '#' || (ch >= 'A' && ch <= 'Z')) {
        cells[{r, c}] = Occupancy::Obstacle;
        if (ch != '#') groups[ch].push_back({r, c});
        continue;
      }
      throw Error(std::string("unknown map character '") + ch + "' at " + to_string({r, c}));
    }
  }
  std::vector<FurnitureRegion> furniture;
  for (auto& [letter, group] : groups)
    furniture.push_back({std::string(1, letter), group, group});
  return OccupancyMap(std::move(cells), cell_size, std::move(furniture));
}

inline OccupancyMap load_map(const std::string& path, double cell_size = 0.1) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open map file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str(), cell_size);
}

namespace detail {

// Exact 1D squared distance transform (lower envelope of parabolas).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  int first = 0;
  while (first < n && f[first] == kInf) ++first;
  if (first == n) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace detail

/// Euclidean distance (meters) from every cell to the nearest obstacle or
/// map-border cell center. Obstacle and border cells hold 0.
inline Grid<double> wall_distance(const OccupancyMap& map) {
  const int h = map.height();
  const int w = map.width();
  Grid<double> sq(h, w, kInf);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (!map.feasible({r, c}) || r == 0 || c == 0 || r == h - 1 || c == w - 1) sq[{r, c}] = 0.0;

  std::vector<double> f(h), d(h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = sq[{r, c}];
    detail::edt_1d(f, d);
    for (int r = 0; r < h; ++r) sq[{r, c}] = d[r];
  }
  f.resize(w);
  d.resize(w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) f[c] = sq[{r, c}];
    detail::edt_1d(f, d);
    for (int c = 0; c < w; ++c) sq[{r, c}] = d[c];
  }
  Grid<double> out(h, w, 0.0);
  for (std::size_t i = 0; i < sq.size(); ++i) out.at(i) = std::sqrt(sq.at(i)) * map.cell_size();
  return out;
}

namespace detail {

// Path cost as exact step counts; the double key is a pure function of them.
struct StepCost {
  int straight = 0;
  int diagonal = 0;
  double key() const { return straight + diagonal * kSqrt2; }
  double meters(double cell_size) const { return key() * cell_size; }
};

inline StepCost octile(Cell a, Cell b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return {std::max(dr, dc) - std::min(dr, dc), std::min(dr, dc)};
}

struct QueueEntry {
  double priority;
  std::size_t index;
  bool operator>(const QueueEntry& o) const {
    return priority > o.priority || (priority == o.priority && index > o.index);
  }
};

}  // namespace detail

/// Single-source shortest 8-connected path lengths (meters) to every cell;
/// kInf for obstacles and unreachable cells.
inline Grid<double> shortest_paths_from(const OccupancyMap& map, Cell source) {
  if (!map.feasible(source)) throw Error("shortest-path source " + to_string(source) + " is not feasible");
  const auto& grid = map.cells();
  std::vector<detail::StepCost> cost(grid.size());
  std::vector<bool> done(grid.size(), false), seen(grid.size(), false);
  std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>, std::greater<>> open;
  const std::size_t s = grid.index(source);
  seen[s] = true;
  open.push({0.0, s});
  while (!open.empty()) {
    const auto [prio, idx] = open.top();
    open.pop();
    if (done[idx]) continue;
    done[idx] = true;
    const Cell c = grid.cell(idx);
    for (const auto& m : kMoves) {
      if (!can_move(map, c, m)) continue;
      const std::size_t n = grid.index({c.row + m.dr, c.col + m.dc});
      if (done[n]) continue;
      detail::StepCost next = cost[idx];
      (m.diagonal ? next.diagonal : next.straight) += 1;
      if (!seen[n] || next.key() < cost[n].key()) {
        seen[n] = true;
        cost[n] = next;
        open.push({next.key(), n});
      }
    }
  }
  Grid<double> out(map.height(), map.width(), kInf);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (done[i]) out.at(i) = cost[i].meters(map.cell_size());
  return out;
}

/// A* shortest-path length between two feasible cells in meters (kInf when
/// disconnected). The octile heuristic is consistent for this move set.
inline double astar_distance(const OccupancyMap& map, Cell a, Cell b) {
  if (!map.feasible(a)) throw Error("A* endpoint " + to_string(a) + " is not feasible");
  if (!map.feasible(b)) throw Error("A* endpoint " + to_string(b) + " is not feasible");
  if (a == b) return 0.0;
  if (map.component(a) != map.component(b)) return kInf;
  const auto& grid = map.cells();
  std::vector<detail::StepCost> cost(grid.size());
  std::vector<bool> done(grid.size(), false), seen(grid.size(), false);
  std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>, std::greater<>> open;
  const std::size_t start = grid.index(a);
  const std::size_t goal = grid.index(b);
  seen[start] = true;
  open.push({detail::octile(a, b).key(), start});
  while (!open.empty()) {
    const auto [prio, idx] = open.top();
    open.pop();
    if (done[idx]) continue;
    if (idx == goal) return cost[idx].meters(map.cell_size());
    done[idx] = true;
    const Cell c = grid.cell(idx);
    for (const auto& m : kMoves) {
      if (!can_move(map, c, m)) continue;
      const Cell nc{c.row + m.dr, c.col + m.dc};
      const std::size_t n = grid.index(nc);
      if (done[n]) continue;
      detail::StepCost next = cost[idx];
      (m.diagonal ? next.diagonal : next.straight) += 1;
      if (!seen[n] || next.key() < cost[n].key()) {
        seen[n] = true;
        cost[n] = next;
        open.push({next.key() + detail::octile(nc, b).key(), n});
      }
    }
  }
  return kInf;
}

/// Cells strictly between a and b on the Bresenham segment.
inline std::vector<Cell> segment_interior(Cell a, Cell b) {
  std::vector<Cell> out;
  int r = a.row, c = a.col;
  const int dr = std::abs(b.row - a.row), dc = std::abs(b.col - a.col);
  const int sr = a.row < b.row ? 1 : -1, sc = a.col < b.col ? 1 : -1;
  int err = dc - dr;
  while (!(r == b.row && c == b.col)) {
    const int e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      c += sc;
    }
    if (e2 < dc) {
      err += dc;
      r += sr;
    }
    if (!(r == b.row && c == b.col)) out.push_back({r, c});
  }
  return out;
}

/// Membership predicate of the visibility set V(x).
inline bool visible(const OccupancyMap& map, Cell x, Cell y, double r_vis, bool occlusion) {
  if (!map.contains(y) || !within_range(x, y, map.cell_size(), r_vis)) return false;
  if (!occlusion) return true;
  for (Cell c : segment_interior(x, y))
    if (!map.feasible(c)) return false;
  return true;
}

/// All cells (feasible or not) inside the r_vis ball around x, row-major.
inline std::vector<Cell> visibility_set(const OccupancyMap& map, Cell x, double r_vis, bool occlusion = false) {
  if (!map.feasible(x)) throw Error("vantage cell " + to_string(x) + " is not feasible");
  if (!(r_vis > 0.0)) throw Error("r_vis must be positive");
  const int reach = static_cast<int>(std::ceil(r_vis / map.cell_size())) + 1;
  std::vector<Cell> out;
  for (int r = std::max(0, x.row - reach); r <= std::min(map.height() - 1, x.row + reach); ++r)
    for (int c = std::max(0, x.col - reach); c <= std::min(map.width() - 1, x.col + reach); ++c)
      if (visible(map, x, {r, c}, r_vis, occlusion)) out.push_back({r, c});
  return out;
}

/// Symmetric matrix of path lengths over an ordered node list.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  DistanceMatrix(std::size_t n, std::vector<double> values) : n_(n), d_(std::move(values)) {
    if (d_.size() != n * n) throw Error("distance matrix has wrong size");
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  double max_entry() const { return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end()); }
  bool all_finite() const {
    return std::all_of(d_.begin(), d_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Pairwise collision-free distances over a fixed list of cells, computed
/// once at construction (one Dijkstra sweep per source) and immutable after.
class DistanceOracle {
 public:
  DistanceOracle(const OccupancyMap& map, std::vector<Cell> points) : points_(std::move(points)) {
    const std::size_t n = points_.size();
    table_ = DistanceMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Grid<double> from = shortest_paths_from(map, points_[i]);
      for (std::size_t j = i + 1; j < n; ++j) table_.set(i, j, from[points_[j]]);
    }
  }

  const std::vector<Cell>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return table_(i, j); }
  const DistanceMatrix& matrix() const { return table_; }
  /// D_M over the cached entries.
  double diameter() const { return table_.max_entry(); }

 private:
  std::vector<Cell> points_;
  DistanceMatrix table_;
};

/// Upper bound on the scene diameter restricted to the component of `seed`:
/// twice the eccentricity of `seed`.
inline double diameter_upper_bound(const OccupancyMap& map, Cell seed) {
  const Grid<double> d = shortest_paths_from(map, seed);
  double ecc = 0.0;
  for (double v : d.data())
    if (std::isfinite(v)) ecc = std::max(ecc, v);
  return 2.0 * ecc;
}

}  // namespace objnav
