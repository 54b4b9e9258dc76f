#pragma once

// Weighted minimum latency planning over vantage points: exact subset DP,
// anytime branch-and-bound, one-step greedy and a geometric TSP baseline.
//
// Every solver works on a DistanceMatrix whose node 0 is the robot start and
// node p+1 is planned point p. Plans report orders as 0-based point indices.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "objnav/grid_map.hpp"

namespace objnav {

struct Plan {
  std::vector<std::size_t> order;  // visit sequence of point indices; the start is implicit
  std::vector<double> weights;     // per point, indexed like the input points
  std::vector<double> latency;     // cumulative distance on arrival at order[l]
  double objective = 0.0;          // sum_l weights[order[l]] * latency[l]
  bool optimal = false;

  double length() const { return latency.empty() ? 0.0 : latency.back(); }
};

struct SolverBudget {
  double time_limit_s = 30.0;
  std::uint64_t node_limit = 0;  // 0 = unlimited

  void validate() const {
    if (!std::isfinite(time_limit_s) && node_limit == 0)
      throw Error("solver budget needs a finite time limit or a node limit");
    if (time_limit_s <= 0.0) throw Error("solver time limit must be positive");
  }
};

inline void check_instance(const DistanceMatrix& dist, std::size_t k) {
  if (k == 0) throw Error("planning needs at least one point");
  if (dist.size() != k + 1) throw Error("distance matrix must have one row per point plus the start");
  if (!dist.all_finite()) throw Error("infinite distance between planned points");
}

/// Cumulative latencies of an order.
inline std::vector<double> latencies(const DistanceMatrix& dist, const std::vector<std::size_t>& order) {
  std::vector<double> out;
  out.reserve(order.size());
  double total = 0.0;
  std::size_t prev = 0;
  for (std::size_t p : order) {
    total += dist(prev, p + 1);
    out.push_back(total);
    prev = p + 1;
  }
  return out;
}

/// sum_l w_{pi(l)} * sum_{j<=l} d(pi(j-1), pi(j))
inline double plan_objective(const DistanceMatrix& dist, const std::vector<double>& weights,
                             const std::vector<std::size_t>& order) {
  const auto lat = latencies(dist, order);
  double obj = 0.0;
  for (std::size_t l = 0; l < order.size(); ++l) obj += weights[order[l]] * lat[l];
  return obj;
}

inline Plan make_plan(const DistanceMatrix& dist, std::vector<double> weights, std::vector<std::size_t> order,
                      bool optimal) {
  Plan p;
  p.latency = latencies(dist, order);
  p.objective = plan_objective(dist, weights, order);
  p.order = std::move(order);
  p.weights = std::move(weights);
  p.optimal = optimal;
  return p;
}

/// Exact dynamic program over (visited subset, last point). The cost of moving
/// from `last` to `next` after visiting `subset` is d(last, next) * leg_factor(subset),
/// so the template covers both weighted latency and plain tour length.
template <typename LegFactor>
std::vector<std::size_t> subset_dp(const DistanceMatrix& dist, std::size_t k, LegFactor&& leg_factor) {
  if (k > 24) throw Error("subset DP limited to 24 points");
  const std::size_t states = std::size_t{1} << k;
  std::vector<double> cost(states * k, kInf);
  std::vector<std::uint8_t> parent(states * k, 0xFF);
  for (std::size_t j = 0; j < k; ++j) cost[(std::size_t{1} << j) * k + j] = dist(0, j + 1) * leg_factor(std::size_t{0});

  for (std::size_t s = 1; s < states; ++s) {
    const double factor = leg_factor(s);
    for (std::size_t j = 0; j < k; ++j) {
      if (!(s >> j & 1U)) continue;
      const double base = cost[s * k + j];
      if (base == kInf) continue;
      for (std::size_t n = 0; n < k; ++n) {
        if (s >> n & 1U) continue;
        const std::size_t t = s | (std::size_t{1} << n);
        const double c = base + dist(j + 1, n + 1) * factor;
        if (c < cost[t * k + n]) {
          cost[t * k + n] = c;
          parent[t * k + n] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }
  const std::size_t full = states - 1;
  std::size_t last = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (cost[full * k + j] < cost[full * k + last]) last = j;
  std::vector<std::size_t> order(k);
  std::size_t s = full;
  for (std::size_t pos = k; pos-- > 0;) {
    order[pos] = last;
    const std::uint8_t p = parent[s * k + last];
    s &= ~(std::size_t{1} << last);
    last = p;
  }
  return order;
}

/// arg max over unvisited x of alpha_p / d(current, x) + (1 - alpha_p) * score(x);
/// ties go to the lowest point index. `current` is a node id (0 = start).
inline std::size_t greedy_next(const DistanceMatrix& dist, std::size_t current, const std::vector<std::size_t>& unvisited,
                               const std::vector<double>& scores, double alpha_p) {
  if (unvisited.empty()) throw Error("greedy step with no unvisited points");
  if (alpha_p < 0.0 || alpha_p > 1.0) throw Error("alpha_p must lie in [0, 1]");
  std::size_t best = unvisited.front();
  double best_value = -kInf;
  for (std::size_t p : unvisited) {
    const double d = dist(current, p + 1);
    if (!(d > 0.0)) throw Error("zero distance to unvisited point " + std::to_string(p) + " (duplicate point)");
    const double value = alpha_p / d + (1.0 - alpha_p) * scores[p];
    if (value > best_value || (value == best_value && p < best)) {
      best_value = value;
      best = p;
    }
  }
  return best;
}

inline Plan greedy_plan(const DistanceMatrix& dist, const std::vector<double>& scores, double alpha_p) {
  const std::size_t k = scores.size();
  check_instance(dist, k);
  std::vector<std::size_t> unvisited(k);
  std::iota(unvisited.begin(), unvisited.end(), 0);
  std::vector<std::size_t> order;
  std::size_t current = 0;
  while (!unvisited.empty()) {
    const std::size_t next = greedy_next(dist, current, unvisited, scores, alpha_p);
    order.push_back(next);
    unvisited.erase(std::find(unvisited.begin(), unvisited.end(), next));
    current = next + 1;
  }
  return make_plan(dist, scores, std::move(order), k == 1);
}

struct BranchAndBoundResult {
  Plan plan;
  std::uint64_t nodes = 0;
  std::vector<double> incumbent_trace;  // objective after each improvement, seed first
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const DistanceMatrix& dist, const std::vector<double>& w, const SolverBudget& budget)
      : dist_(dist), w_(w), k_(w.size()), budget_(budget), visited_(k_, false),
        start_(std::chrono::steady_clock::now()) {}

  BranchAndBoundResult run(std::vector<std::size_t> seed) {
    best_order_ = std::move(seed);
    best_ = plan_objective(dist_, w_, best_order_);
    trace_.push_back(best_);
    path_.reserve(k_);
    complete_ = true;
    search(0, 0.0, 0.0);
    BranchAndBoundResult out;
    out.plan = make_plan(dist_, w_, best_order_, complete_);
    out.nodes = nodes_;
    out.incumbent_trace = trace_;
    return out;
  }

 private:
  bool out_of_budget() {
    if (budget_.node_limit != 0 && nodes_ >= budget_.node_limit) return true;
    if ((nodes_ & 1023U) == 0 && std::isfinite(budget_.time_limit_s)) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() >= budget_.time_limit_s) timed_out_ = true;
    }
    return timed_out_;
  }

  void search(std::size_t node, double latency, double g) {
    if (path_.size() == k_) {
      if (g < best_) {
        best_ = g;
        best_order_ = path_;
        trace_.push_back(best_);
      }
      return;
    }
    if (out_of_budget()) {
      complete_ = false;
      return;
    }
    ++nodes_;

    // Lower bound: every unvisited u is reached no earlier than latency + d(node, u).
    double bound = g;
    std::vector<std::pair<double, std::size_t>> children;
    children.reserve(k_ - path_.size());
    for (std::size_t u = 0; u < k_; ++u) {
      if (visited_[u]) continue;
      const double d = dist_(node, u + 1);
      bound += w_[u] * (latency + d);
      children.push_back({d / std::max(w_[u], 1e-12), u});
    }
    if (bound >= best_ - 1e-12) return;
    std::sort(children.begin(), children.end());
    for (const auto& [key, u] : children) {
      const double d = dist_(node, u + 1);
      visited_[u] = true;
      path_.push_back(u);
      search(u + 1, latency + d, g + w_[u] * (latency + d));
      path_.pop_back();
      visited_[u] = false;
      if (!complete_ && (timed_out_ || (budget_.node_limit != 0 && nodes_ >= budget_.node_limit))) return;
    }
  }

  const DistanceMatrix& dist_;
  const std::vector<double>& w_;
  std::size_t k_;
  SolverBudget budget_;
  std::vector<bool> visited_;
  std::vector<std::size_t> path_;
  std::vector<std::size_t> best_order_;
  double best_ = kInf;
  std::vector<double> trace_;
  std::uint64_t nodes_ = 0;
  bool complete_ = true;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Depth-first branch-and-bound seeded with the greedy plan. Anytime: when
/// the budget runs out the incumbent is returned with optimal = false.
inline BranchAndBoundResult wmlp_branch_and_bound(const DistanceMatrix& dist, const std::vector<double>& weights,
                                                  const SolverBudget& budget, double seed_alpha_p = 0.5) {
  check_instance(dist, weights.size());
  budget.validate();
  const Plan seed = greedy_plan(dist, weights, seed_alpha_p);
  return detail::BranchAndBound(dist, weights, budget).run(seed.order);
}

struct ExactOptions {
  SolverBudget budget{};
  std::size_t dp_max_points = 20;  // above this the anytime branch-and-bound takes over
};

inline void check_weights(const std::vector<double>& weights) {
  for (double w : weights)
    if (!(w >= 0.0 && w <= 1.0)) throw Error("plan weights must lie in [0, 1]");
}

/// Minimizes sum_l w_{pi(l)} * latency_l. Exact subset DP with leg factor
/// W_total - W(visited) for up to dp_max_points points.
inline Plan wmlp_exact(const DistanceMatrix& dist, const std::vector<double>& weights, const ExactOptions& opts = {}) {
  const std::size_t k = weights.size();
  check_instance(dist, k);
  check_weights(weights);
  if (k > opts.dp_max_points) return wmlp_branch_and_bound(dist, weights, opts.budget).plan;

  const std::size_t states = std::size_t{1} << k;
  std::vector<double> visited_weight(states, 0.0);
  for (std::size_t s = 1; s < states; ++s)
    visited_weight[s] = visited_weight[s & (s - 1)] + weights[static_cast<std::size_t>(std::countr_zero(s))];
  const double total = visited_weight[states - 1];
  auto order = subset_dp(dist, k, [&](std::size_t s) { return total - visited_weight[s]; });
  return make_plan(dist, weights, std::move(order), true);
}

/// 2-opt on an open path anchored at the start; only strictly improving
/// segment reversals are applied, so the length never increases.
inline void two_opt_open(const DistanceMatrix& dist, std::vector<std::size_t>& order) {
  const std::size_t k = order.size();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const std::size_t a = i == 0 ? 0 : order[i - 1] + 1;
        const std::size_t first = order[i] + 1;
        const std::size_t last = order[j] + 1;
        double delta = dist(a, last) - dist(a, first);
        if (j + 1 < k) {
          const std::size_t b = order[j + 1] + 1;
          delta += dist(first, b) - dist(last, b);
        }
        if (delta < -1e-12) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }
}

/// Shortest open tour from the start through every point. Held-Karp up to
/// dp_max_points, nearest neighbour improved by 2-opt above. Weights are
/// ignored; the plan carries uniform weights 1/k.
inline Plan tsp_baseline(const DistanceMatrix& dist, std::size_t k, std::size_t dp_max_points = 20) {
  check_instance(dist, k);
  std::vector<double> uniform(k, 1.0 / static_cast<double>(k));
  if (k <= dp_max_points) {
    auto order = subset_dp(dist, k, [](std::size_t) { return 1.0; });
    return make_plan(dist, std::move(uniform), std::move(order), true);
  }
  std::vector<std::size_t> order;
  std::vector<bool> used(k, false);
  std::size_t current = 0;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = k;
    for (std::size_t p = 0; p < k; ++p)
      if (!used[p] && (best == k || dist(current, p + 1) < dist(current, best + 1))) best = p;
    used[best] = true;
    order.push_back(best);
    current = best + 1;
  }
  two_opt_open(dist, order);
  return make_plan(dist, std::move(uniform), std::move(order), false);
}

/// Open-path length of an order starting at node 0.
inline double tour_length(const DistanceMatrix& dist, const std::vector<std::size_t>& order) {
  const auto lat = latencies(dist, order);
  return lat.empty() ? 0.0 : lat.back();
}

}  // namespace objnav
