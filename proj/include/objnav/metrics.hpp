#pragma once

// Ground-truth spotting probabilities, expected path length, SPL and regret.

#include <algorithm>
#include <vector>

#include "objnav/planner.hpp"
#include "objnav/spawn.hpp"

namespace objnav {

/// p_i(x) = sum_f P_i(f) * |surface(f) in V(x)| / |surface(f)|
inline double gt_spot_probability(const OccupancyMap& map, const SpawnModel& model, int object, Cell x, double r_vis,
                                  bool occlusion = false) {
  if (object < 0 || static_cast<std::size_t>(object) >= model.size())
    throw Error("invalid object id " + std::to_string(object));
  double p = 0.0;
  for (const auto& [fid, prob] : model.objects[static_cast<std::size_t>(object)].distribution) {
    if (prob <= 0.0) continue;
    const auto& surface = map.furniture(fid).surface_cells;
    std::size_t seen = 0;
    for (Cell y : surface)
      if (visible(map, x, y, r_vis, occlusion)) ++seen;
    p += prob * static_cast<double>(seen) / static_cast<double>(surface.size());
  }
  return std::clamp(p, 0.0, 1.0);
}

/// P(E) * L_M + (1 - P(E)) * sum_l p(x_{pi(l)}) * latency_l
inline double expected_path_length(const Plan& plan, const std::vector<double>& probabilities, double failure_prob,
                                   double L_M) {
  double sum = 0.0;
  for (std::size_t l = 0; l < plan.order.size(); ++l) sum += probabilities.at(plan.order[l]) * plan.latency[l];
  return failure_prob * L_M + (1.0 - failure_prob) * sum;
}

/// Contribution S * p* / max(p*, l) of one episode; p* = l = 0 contributes S.
inline double spl_term(bool success, double path_length, double shortest) {
  if (path_length < 0.0 || shortest < 0.0) throw Error("SPL lengths must be non-negative");
  if (!success) return 0.0;
  const double denom = std::max(shortest, path_length);
  return denom == 0.0 ? 1.0 : shortest / denom;
}

/// Mean SPL over records exposing success, path_length and shortest.
template <typename Records>
double spl(const Records& records) {
  if (std::empty(records)) return 0.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    sum += spl_term(r.success, r.path_length, r.shortest);
    ++n;
  }
  return sum / static_cast<double>(n);
}

struct MetricSummary {
  double success_rate = 0.0;
  double spl = 0.0;
  double mean_loss = 0.0;
  std::size_t episodes = 0;
};

template <typename Records>
MetricSummary summarize(const Records& records) {
  MetricSummary m;
  for (const auto& r : records) {
    m.success_rate += r.success ? 1.0 : 0.0;
    m.mean_loss += r.loss;
    ++m.episodes;
  }
  if (m.episodes == 0) return m;
  m.success_rate /= static_cast<double>(m.episodes);
  m.mean_loss /= static_cast<double>(m.episodes);
  m.spl = spl(records);
  return m;
}

/// Exact WMLP plan over the same points using ground-truth probabilities.
inline Plan benchmark_plan(const DistanceMatrix& dist, const std::vector<double>& gt_probabilities,
                           const ExactOptions& opts = {}) {
  return wmlp_exact(dist, gt_probabilities, opts);
}

struct RegretLedger {
  std::vector<std::pair<double, double>> terms;  // (learner, benchmark) expected path lengths

  void add(double learner, double benchmark) { terms.emplace_back(learner, benchmark); }
  double cumulative() const {
    double r = 0.0;
    for (const auto& [a, b] : terms) r += a - b;
    return r;
  }
};

struct RegretPoint {
  std::size_t t;
  double cumulative;
  double average;
};

inline std::vector<RegretPoint> regret_curve(const RegretLedger& ledger) {
  std::vector<RegretPoint> out;
  out.reserve(ledger.terms.size());
  double r = 0.0;
  for (std::size_t i = 0; i < ledger.terms.size(); ++i) {
    r += ledger.terms[i].first - ledger.terms[i].second;
    out.push_back({i + 1, r, r / static_cast<double>(i + 1)});
  }
  return out;
}

}  // namespace objnav
