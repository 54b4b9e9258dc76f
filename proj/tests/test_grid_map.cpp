#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "objnav/grid_map.hpp"

using namespace objnav;

namespace {

OccupancyMap random_map(int h, int w, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution wall(density);
  std::string text;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) text += wall(rng) ? '#' : '.';
    text += '\n';
  }
  return parse_map(text);
}

// Plain Bellman-Ford style relaxation on doubles; no heap, no step counts.
Grid<double> relax_all(const OccupancyMap& map, Cell src) {
  Grid<double> d(map.height(), map.width(), kInf);
  d[src] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < map.height(); ++r)
      for (int c = 0; c < map.width(); ++c) {
        if (!std::isfinite(d[{r, c}])) continue;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const Cell n{r + dr, c + dc};
            if (!map.feasible(n)) continue;
            if (dr != 0 && dc != 0 && (!map.feasible({r + dr, c}) || !map.feasible({r, c + dc}))) continue;
            const double cand = d[{r, c}] + (dr != 0 && dc != 0 ? std::sqrt(2.0) : 1.0) * map.cell_size();
            if (cand < d[n] - 1e-12) {
              d[n] = cand;
              changed = true;
            }
          }
      }
  }
  return d;
}

}  // namespace

TEST(ParseMap, LegendAndFurniture) {
  const auto m = parse_map("#####\n#.A.#\n#.AB#\n#####\n", 0.05);
  EXPECT_EQ(m.height(), 4);
  EXPECT_EQ(m.width(), 5);
  EXPECT_DOUBLE_EQ(m.cell_size(), 0.05);
  EXPECT_TRUE(m.feasible({1, 1}));
  EXPECT_FALSE(m.feasible({1, 2}));
  EXPECT_FALSE(m.feasible({0, 0}));
  EXPECT_FALSE(m.feasible({-1, 0}));
  ASSERT_EQ(m.furniture().size(), 2u);
  EXPECT_EQ(m.furniture("A").cells, (std::vector<Cell>{{1, 2}, {2, 2}}));
  EXPECT_EQ(m.furniture("A").surface_cells, m.furniture("A").cells);
  EXPECT_EQ(m.furniture("B").cells, (std::vector<Cell>{{2, 3}}));
  EXPECT_EQ(m.feasible_count(), 3u);
  EXPECT_THROW(m.furniture("Z"), Error);
}

TEST(ParseMap, Errors) {
  EXPECT_THROW(parse_map(""), Error);
  EXPECT_THROW(parse_map("\n\n"), Error);
  EXPECT_THROW(parse_map("...\n..\n"), Error);
  EXPECT_THROW(parse_map("..x\n...\n"), Error);
  EXPECT_THROW(parse_map("...\n", 0.0), Error);
  EXPECT_NO_THROW(parse_map("...\r\n...\r\n"));
}

TEST(OccupancyMap, FurnitureMustBeObstacle) {
  Grid<Occupancy> g(2, 2, Occupancy::Feasible);
  EXPECT_THROW(OccupancyMap(g, 0.1, {{"A", {{0, 0}}, {{0, 0}}}}), Error);
  g[{0, 0}] = Occupancy::Obstacle;
  EXPECT_NO_THROW(OccupancyMap(g, 0.1, {{"A", {{0, 0}}, {{0, 0}}}}));
  EXPECT_THROW(OccupancyMap(g, 0.1, {{"A", {{0, 0}}, {{1, 1}}}}), Error);
}

TEST(OccupancyMap, Components) {
  const auto m = parse_map("..#...\n..#...\n..#...\n");
  EXPECT_EQ(m.component_count(), 2);
  EXPECT_EQ(m.component({0, 0}), m.component({2, 1}));
  EXPECT_NE(m.component({0, 0}), m.component({0, 3}));
  EXPECT_EQ(m.component({0, 2}), -1);
  EXPECT_EQ(m.largest_component(), m.component({0, 5}));
  EXPECT_EQ(m.component_cells(m.largest_component()).size(), 9u);
  // Diagonal contact through a corner does not connect.
  const auto d = parse_map(".#\n#.\n");
  EXPECT_EQ(d.component_count(), 2);
}

TEST(Movement, NoCornerCutting) {
  const auto m = parse_map("..\n#.\n");
  EXPECT_FALSE(can_move(m, {0, 0}, {1, 1, true}));
  EXPECT_TRUE(can_move(m, {0, 0}, {0, 1, false}));
  EXPECT_NEAR(astar_distance(m, {0, 0}, {1, 1}), 0.2, 1e-12);
}

TEST(WallDistance, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const int h = 5 + static_cast<int>(seed * 3 % 36);
    const int w = 5 + static_cast<int>(seed * 7 % 36);
    const auto m = random_map(h, w, 0.15, seed);
    const auto wd = wall_distance(m);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        long best = std::numeric_limits<long>::max();
        for (int r2 = 0; r2 < h; ++r2)
          for (int c2 = 0; c2 < w; ++c2) {
            const bool source = !m.feasible({r2, c2}) || r2 == 0 || c2 == 0 || r2 == h - 1 || c2 == w - 1;
            if (source) best = std::min(best, long(r - r2) * (r - r2) + long(c - c2) * (c - c2));
          }
        ASSERT_EQ(wd[(Cell{r, c})], std::sqrt(double(best)) * m.cell_size()) << "seed " << seed << " cell " << r << "," << c;
      }
  }
}

TEST(WallDistance, EmptyInteriorRing) {
  const auto m = parse_map(".......\n.......\n.......\n.......\n.......\n.......\n.......\n");
  const auto wd = wall_distance(m);
  EXPECT_DOUBLE_EQ(wd[(Cell{3, 3})], 0.3);
  EXPECT_DOUBLE_EQ(wd[(Cell{0, 3})], 0.0);
  EXPECT_DOUBLE_EQ(wd[(Cell{1, 1})], 0.1);
}

TEST(AStar, OctileOnEmptyMap) {
  std::string text;
  for (int r = 0; r < 25; ++r) text += std::string(31, '.') + "\n";
  const auto m = parse_map(text);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Cell a{int(rng() % 25), int(rng() % 31)};
    const Cell b{int(rng() % 25), int(rng() % 31)};
    const int dr = std::abs(a.row - b.row), dc = std::abs(a.col - b.col);
    const double expected = ((std::max(dr, dc) - std::min(dr, dc)) + std::min(dr, dc) * std::sqrt(2.0)) * 0.1;
    ASSERT_EQ(astar_distance(m, a, b), expected);
  }
}

TEST(AStar, MatchesRelaxationOracle) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto m = random_map(20, 24, 0.25, seed * 11);
    const auto cells = m.feasible_cells();
    const Cell src = cells[seed * 13 % cells.size()];
    const auto oracle = relax_all(m, src);
    const auto dj = shortest_paths_from(m, src);
    for (std::size_t i = 0; i < cells.size(); i += 3) {
      const double a = astar_distance(m, src, cells[i]);
      if (!std::isfinite(oracle[cells[i]])) {
        EXPECT_TRUE(std::isinf(a));
        EXPECT_TRUE(std::isinf(dj[cells[i]]));
      } else {
        EXPECT_NEAR(a, oracle[cells[i]], 1e-9);
        EXPECT_EQ(a, dj[cells[i]]);
      }
    }
  }
}

TEST(AStar, Symmetric) {
  const auto m = random_map(18, 18, 0.2, 5);
  const auto cells = m.feasible_cells();
  for (std::size_t i = 0; i + 7 < cells.size(); i += 7)
    EXPECT_EQ(astar_distance(m, cells[i], cells[i + 7]), astar_distance(m, cells[i + 7], cells[i]));
}

TEST(AStar, Errors) {
  const auto m = parse_map("..#..\n..#..\n");
  EXPECT_THROW(astar_distance(m, {0, 2}, {0, 0}), Error);
  EXPECT_THROW(astar_distance(m, {0, 0}, {5, 5}), Error);
  EXPECT_TRUE(std::isinf(astar_distance(m, {0, 0}, {0, 4})));
  EXPECT_EQ(astar_distance(m, {0, 0}, {0, 0}), 0.0);
}

TEST(Visibility, MembershipEqualsPredicate) {
  const auto m = random_map(30, 30, 0.15, 21);
  const auto cells = m.feasible_cells();
  for (bool occl : {false, true}) {
    for (std::size_t k = 0; k < cells.size(); k += 97) {
      const Cell x = cells[k];
      const auto set = visibility_set(m, x, 0.55, occl);
      std::size_t expected = 0;
      for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 30; ++c) {
          const double d = std::hypot(r - x.row, c - x.col) * 0.1;
          bool in = d <= 0.55 + 1e-9;
          if (in && occl)
            for (Cell s : segment_interior(x, {r, c}))
              if (!m.feasible(s)) in = false;
          const bool member = std::find(set.begin(), set.end(), Cell{r, c}) != set.end();
          ASSERT_EQ(member, in) << "x " << to_string(x) << " y " << r << "," << c;
          expected += in ? 1 : 0;
        }
      EXPECT_EQ(set.size(), expected);
    }
  }
}

TEST(Visibility, OcclusionIsSubset) {
  const auto m = random_map(30, 30, 0.3, 8);
  for (Cell x : m.feasible_cells()) {
    const auto open = visibility_set(m, x, 0.4, false);
    for (Cell y : visibility_set(m, x, 0.4, true))
      ASSERT_NE(std::find(open.begin(), open.end(), y), open.end());
  }
}

TEST(Visibility, RadiusBoundaryAndErrors) {
  const auto m = parse_map(".....\n.....\n.....\n");
  EXPECT_TRUE(visible(m, {0, 0}, {0, 3}, 0.3, false));
  EXPECT_FALSE(visible(m, {0, 0}, {0, 4}, 0.3, false));
  EXPECT_THROW(visibility_set(m, {0, 0}, 0.0), Error);
  EXPECT_THROW(visibility_set(parse_map("#.\n"), {0, 0}, 1.0), Error);
  const auto wall = parse_map(".#.\n");
  EXPECT_FALSE(visible(wall, {0, 0}, {0, 2}, 1.0, true));
  EXPECT_TRUE(visible(wall, {0, 0}, {0, 2}, 1.0, false));
}

TEST(SegmentInterior, Basic) {
  EXPECT_TRUE(segment_interior({0, 0}, {0, 1}).empty());
  EXPECT_EQ(segment_interior({0, 0}, {0, 3}), (std::vector<Cell>{{0, 1}, {0, 2}}));
  EXPECT_EQ(segment_interior({0, 0}, {3, 3}), (std::vector<Cell>{{1, 1}, {2, 2}}));
}

TEST(DistanceOracle, MatchesAStarAndIsSymmetric) {
  const auto m = random_map(22, 22, 0.2, 4);
  const int comp = m.largest_component();
  const auto cells = m.component_cells(comp);
  std::vector<Cell> pts;
  for (std::size_t i = 0; i < cells.size(); i += cells.size() / 6) pts.push_back(cells[i]);
  const DistanceOracle o(m, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(o(i, i), 0.0);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      EXPECT_EQ(o(i, j), o(j, i));
      EXPECT_NEAR(o(i, j), astar_distance(m, pts[i], pts[j]), 1e-12);
    }
  }
  EXPECT_LE(o.diameter(), diameter_upper_bound(m, pts[0]) + 1e-12);
}
