#pragma once

// Solver runtime table over a range of vantage-point counts.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "objnav/planner.hpp"
#include "objnav/spawn.hpp"

namespace objnav {

struct BenchInstance {
  DistanceMatrix dist;
  std::vector<double> weights;
};

using InstanceGenerator = std::function<BenchInstance(std::size_t k, Rng& rng)>;

/// Start plus k points uniform in a side x side square, Euclidean distances,
/// weights uniform in [0, 1] rescaled to sum to 1.
inline InstanceGenerator euclidean_instances(double side = 9.0) {
  return [side](std::size_t k, Rng& rng) {
    std::vector<std::pair<double, double>> pts(k + 1);
    for (auto& p : pts) p = {side * uniform01(rng), side * uniform01(rng)};
    DistanceMatrix d(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t j = i + 1; j <= k; ++j)
        d.set(i, j, std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second));
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) total += (x = uniform01(rng) + 1e-6);
    for (auto& x : w) x /= total;
    return BenchInstance{std::move(d), std::move(w)};
  };
}

struct BenchRow {
  std::size_t k = 0;
  std::string solver;  // "dp", "branch_and_bound" or "greedy"
  std::size_t instances = 0;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
  double mean_objective = 0.0;
  std::size_t optimal = 0;  // instances solved to proven optimality
};

struct BenchOptions {
  std::size_t k_min = 4;
  std::size_t k_max = 12;
  std::size_t instances = 3;
  SolverBudget budget{};
  std::size_t dp_max_points = 20;  // the DP row is skipped above this k
  double alpha_p = 0.5;
  std::uint64_t seed = 7;
};

/// Every solver sees the same instances for a given k. Greedy rows are always
/// present; the DP row only up to dp_max_points.
inline std::vector<BenchRow> solver_bench(const BenchOptions& opt, const InstanceGenerator& gen = euclidean_instances()) {
  if (opt.k_min < 1 || opt.k_min > opt.k_max) throw Error("bench needs 1 <= k_min <= k_max");
  if (opt.instances < 1) throw Error("bench needs at least one instance per k");
  opt.budget.validate();
  std::vector<BenchRow> rows;
  for (std::size_t k = opt.k_min; k <= opt.k_max; ++k) {
    std::vector<BenchInstance> batch;
    for (std::size_t i = 0; i < opt.instances; ++i) {
      Rng rng = stream_rng(opt.seed, k * 1000 + i);
      batch.push_back(gen(k, rng));
    }
    auto measure = [&](const std::string& name, auto&& solve) {
      BenchRow row{k, name, batch.size(), 0.0, 0.0, 0.0, 0};
      for (const auto& inst : batch) {
        const auto t0 = std::chrono::steady_clock::now();
        const Plan p = solve(inst);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.mean_seconds += s;
        row.max_seconds = std::max(row.max_seconds, s);
        row.mean_objective += p.objective;
        row.optimal += p.optimal ? 1 : 0;
      }
      row.mean_seconds /= static_cast<double>(batch.size());
      row.mean_objective /= static_cast<double>(batch.size());
      rows.push_back(row);
    };
    if (k <= opt.dp_max_points)
      measure("dp", [&](const BenchInstance& in) { return wmlp_exact(in.dist, in.weights, {opt.budget, 64}); });
    measure("branch_and_bound",
            [&](const BenchInstance& in) { return wmlp_branch_and_bound(in.dist, in.weights, opt.budget).plan; });
    measure("greedy", [&](const BenchInstance& in) { return greedy_plan(in.dist, in.weights, opt.alpha_p); });
  }
  return rows;
}

}  // namespace objnav
