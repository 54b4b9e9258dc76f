#pragma once

// Episode simulation: spawn an object, plan a route over farthest-point
// vantage points, traverse it until the object is spotted, and feed the
// resulting signals to the bandit during training.

#include <algorithm>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "objnav/bandit.hpp"
#include "objnav/features.hpp"
#include "objnav/metrics.hpp"
#include "objnav/planner.hpp"
#include "objnav/sampling.hpp"
#include "objnav/spawn.hpp"

namespace objnav {

enum class PlannerKind { Exact, Greedy, Tsp };

inline std::string to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::Exact: return "exact";
    case PlannerKind::Greedy: return "greedy";
    case PlannerKind::Tsp: return "tsp";
  }
  return "exact";
}
inline PlannerKind parse_planner_kind(const std::string& s) {
  if (s == "exact") return PlannerKind::Exact;
  if (s == "greedy") return PlannerKind::Greedy;
  if (s == "tsp") return PlannerKind::Tsp;
  throw Error("unknown planner '" + s + "' (expected exact, greedy or tsp)");
}

struct PlannerConfig {
  PlannerKind kind = PlannerKind::Exact;
  double alpha_p = 0.5;
  ExactOptions exact{};
};

/// Where plan weights come from.
enum class ScoreSource { Learned, GroundTruth };

struct EpisodeConfig {
  double r_vis_train = 1.0;
  double r_vis_eval = 2.5;
  double failure_prob = 0.0;
  double L_M = 0.0;  // 0 selects k * (k + 1) * diameter bound
  bool occlusion = false;

  void validate() const {
    if (!(r_vis_train > 0.0) || !(r_vis_eval > 0.0)) throw Error("visibility ranges must be positive");
    if (!(failure_prob >= 0.0 && failure_prob < 1.0)) throw Error("failure probability must lie in [0, 1)");
    if (L_M < 0.0) throw Error("L_M must be non-negative");
  }
};

/// Immutable scene data shared by all episodes of a run.
class Scene {
 public:
  Scene(OccupancyMap map, SpawnModel spawn, FeatureConfig features, std::size_t vantage_k, EpisodeConfig episode)
      : map_(std::make_shared<const OccupancyMap>(std::move(map))),
        spawn_(std::move(spawn)),
        features_(std::make_shared<const FeatureBuilder>(*map_, features)),
        vantage_k_(vantage_k),
        episode_(episode) {
    spawn_.validate(*map_);
    episode_.validate();
    if (static_cast<int>(spawn_.size()) != features.n_objects)
      throw Error("feature n_objects does not match the number of object classes");
    const int comp = map_->largest_component();
    if (comp < 0) throw Error("map has no feasible cells");
    start_pool_ = map_->component_cells(comp);
    if (vantage_k_ < 1 || vantage_k_ + 1 > start_pool_.size())
      throw Error("vantage_k must be >= 1 and smaller than the reachable feasible area");
    const double diameter = diameter_upper_bound(*map_, start_pool_.front());
    const double k = static_cast<double>(vantage_k_);
    if (episode_.L_M == 0.0) episode_.L_M = k * (k + 1.0) * diameter;
    if (!(episode_.L_M > k * k * diameter / 2.0))
      throw Error("L_M must exceed the latency of any length-k path");
  }

  const OccupancyMap& map() const { return *map_; }
  const SpawnModel& spawn() const { return spawn_; }
  const FeatureBuilder& features() const { return *features_; }
  const std::vector<Cell>& start_pool() const { return start_pool_; }
  std::size_t vantage_k() const { return vantage_k_; }
  const EpisodeConfig& episode() const { return episode_; }
  double L_M() const { return episode_.L_M; }

 private:
  std::shared_ptr<const OccupancyMap> map_;
  SpawnModel spawn_;
  std::shared_ptr<const FeatureBuilder> features_;
  std::size_t vantage_k_;
  EpisodeConfig episode_;
  std::vector<Cell> start_pool_;
};

struct EpisodeRecord {
  std::size_t index = 0;
  int object = 0;
  Cell spawn;
  Cell start;
  std::vector<Cell> points;  // planned vantage points (start excluded)
  DistanceMatrix distances;  // node 0 = start, node p+1 = points[p]
  Plan plan;
  std::size_t visited = 0;  // plan points traversed (0 when spotted from the start)
  std::vector<Signal> signals;
  bool failure = false;
  bool success = false;
  double path_length = 0.0;  // distance actually driven
  double loss = 0.0;         // realized L(y, J)
  double shortest = kInf;    // shortest path from start to any cell that sees the object
  double learner_expected = 0.0;
  double benchmark_expected = 0.0;
};

/// Feasible cells within r_vis of y, restricted to `pool` when given (kept in
/// pool order), otherwise in row-major order. Each becomes a +1 signal.
inline std::vector<Signal> augment_positives(const OccupancyMap& map, Cell y, double r_vis, int object,
                                             std::optional<std::span<const Cell>> pool = std::nullopt) {
  std::vector<Signal> out;
  auto consider = [&](Cell c) {
    if (map.feasible(c) && within_range(c, y, map.cell_size(), r_vis)) out.push_back({c, +1, object});
  };
  if (pool) {
    for (Cell c : *pool) consider(c);
    return out;
  }
  const int reach = static_cast<int>(std::ceil(r_vis / map.cell_size())) + 1;
  for (int r = y.row - reach; r <= y.row + reach; ++r)
    for (int c = y.col - reach; c <= y.col + reach; ++c) consider({r, c});
  return out;
}

/// Realized loss recomputed from a record: the latency of the first plan point whose
/// ball contains y and no earlier ball does; L_M on failure or no sighting.
inline double realized_loss(const OccupancyMap& map, const EpisodeRecord& rec, double r_vis, bool occlusion,
                            double L_M) {
  if (rec.failure) return L_M;
  if (visible(map, rec.start, rec.spawn, r_vis, occlusion)) return 0.0;
  for (std::size_t l = 0; l < rec.plan.order.size(); ++l)
    if (visible(map, rec.points[rec.plan.order[l]], rec.spawn, r_vis, occlusion)) return rec.plan.latency[l];
  return L_M;
}

/// Executes rec.plan from rec.start against rec.spawn: the start is inspected
/// first, then the plan in order, stopping at the first sighting. Fills
/// success, visited, signals, path_length and loss.
inline void traverse(const OccupancyMap& map, EpisodeRecord& rec, double r_vis, bool occl, double L_M) {
  rec.signals.clear();
  rec.success = false;
  rec.path_length = 0.0;
  rec.visited = 0;
  const std::size_t k = rec.plan.order.size();
  std::optional<std::size_t> spotted_at;  // 0 = start, l+1 = plan position l
  if (!rec.failure) {
    if (visible(map, rec.start, rec.spawn, r_vis, occl)) {
      spotted_at = 0;
    } else {
      for (std::size_t l = 0; l < k; ++l)
        if (visible(map, rec.points[rec.plan.order[l]], rec.spawn, r_vis, occl)) {
          spotted_at = l + 1;
          break;
        }
    }
  }
  if (spotted_at) {
    rec.success = true;
    if (*spotted_at == 0) {
      rec.signals.push_back({rec.start, +1, rec.object});
    } else {
      rec.visited = *spotted_at;
      for (std::size_t l = 0; l < rec.visited; ++l)
        rec.signals.push_back({rec.points[rec.plan.order[l]], l + 1 == rec.visited ? +1 : -1, rec.object});
      rec.path_length = rec.plan.latency[rec.visited - 1];
    }
    rec.loss = rec.path_length;
  } else {
    rec.visited = k;
    for (std::size_t l = 0; l < k; ++l) rec.signals.push_back({rec.points[rec.plan.order[l]], -1, rec.object});
    rec.path_length = rec.plan.length();
    rec.loss = L_M;
  }
}

struct EpisodeOptions {
  const BanditModel* bandit = nullptr;  // required for ScoreSource::Learned
  ScoreSource source = ScoreSource::Learned;
  PlannerConfig planner{};
  double r_vis = 1.0;
  bool track_regret = false;
};

inline std::vector<double> gt_weights(const Scene& scene, int object, const std::vector<Cell>& points, double r_vis) {
  std::vector<double> w;
  w.reserve(points.size());
  for (Cell p : points)
    w.push_back(gt_spot_probability(scene.map(), scene.spawn(), object, p, r_vis, scene.episode().occlusion));
  return w;
}

inline std::vector<double> learned_weights(const Scene& scene, const BanditModel& bandit, int object,
                                           const std::vector<Cell>& points) {
  std::vector<double> w;
  w.reserve(points.size());
  for (Cell p : points) w.push_back(bandit.score(object, scene.features()(object, p)).probability);
  return w;
}

inline Plan make_route(const PlannerConfig& planner, const DistanceMatrix& dist, const std::vector<double>& weights) {
  switch (planner.kind) {
    case PlannerKind::Exact: return wmlp_exact(dist, weights, planner.exact);
    case PlannerKind::Greedy: return greedy_plan(dist, weights, planner.alpha_p);
    case PlannerKind::Tsp: return tsp_baseline(dist, weights.size(), planner.exact.dp_max_points);
  }
  throw Error("unknown planner kind");
}

/// One episode. Random draws happen in a fixed order (start, object, spawn
/// cell, failure) so different planners see identical episodes per stream.
inline EpisodeRecord run_episode(const Scene& scene, const EpisodeOptions& opt, Rng& rng, std::size_t index = 0) {
  const auto& map = scene.map();
  const bool occl = scene.episode().occlusion;
  EpisodeRecord rec;
  rec.index = index;
  rec.start = scene.start_pool()[uniform_index(rng, scene.start_pool().size())];
  rec.object = static_cast<int>(uniform_index(rng, scene.spawn().size()));
  rec.spawn = spawn_object(map, scene.spawn(), rec.object, rng);
  rec.failure = uniform01(rng) < scene.episode().failure_prob;

  const VantageSet vantage = farthest_point_sample(map, rec.start, scene.vantage_k() + 1);
  rec.points.assign(vantage.points.begin() + 1, vantage.points.end());
  rec.distances = DistanceOracle(map, vantage.points).matrix();

  std::vector<double> weights;
  if (opt.planner.kind == PlannerKind::Tsp) {
    weights.assign(rec.points.size(), 1.0 / static_cast<double>(rec.points.size()));
  } else if (opt.source == ScoreSource::GroundTruth) {
    weights = gt_weights(scene, rec.object, rec.points, opt.r_vis);
  } else {
    if (opt.bandit == nullptr) throw Error("learned scores requested without a bandit");
    weights = learned_weights(scene, *opt.bandit, rec.object, rec.points);
  }
  rec.plan = make_route(opt.planner, rec.distances, weights);

  traverse(map, rec, opt.r_vis, occl, scene.L_M());

  const Grid<double> from_start = shortest_paths_from(map, rec.start);
  const int reach = static_cast<int>(std::ceil(opt.r_vis / map.cell_size())) + 1;
  for (int r = rec.spawn.row - reach; r <= rec.spawn.row + reach; ++r)
    for (int c = rec.spawn.col - reach; c <= rec.spawn.col + reach; ++c) {
      const Cell cell{r, c};
      if (map.feasible(cell) && visible(map, cell, rec.spawn, opt.r_vis, occl))
        rec.shortest = std::min(rec.shortest, from_start[cell]);
    }

  if (opt.track_regret) {
    const auto gt = gt_weights(scene, rec.object, rec.points, opt.r_vis);
    const double p = scene.episode().failure_prob;
    rec.learner_expected = expected_path_length(rec.plan, gt, p, scene.L_M());
    const Plan best = benchmark_plan(rec.distances, gt, opt.planner.exact);
    rec.benchmark_expected = expected_path_length(best, gt, p, scene.L_M());
  }
  return rec;
}

struct TrainOptions {
  PlannerConfig planner{};
  std::size_t episodes = 200;
  std::uint64_t seed = 1;
  bool augment = true;
  bool track_regret = true;
  std::function<void(const EpisodeRecord&, const BanditModel&)> observer;  // called after each episode's update
};

struct TrainResult {
  std::vector<EpisodeRecord> records;
  RegretLedger regret;
  MetricSummary summary;  // Train SPL lives in summary.spl
};

/// Signals fed to the bandit for a record: nothing unless the object was
/// spotted; otherwise the traversal signals followed by augmented positives
/// (vantage pool order) not already present.
inline std::vector<Signal> training_signals(const Scene& scene, const EpisodeRecord& rec, double r_vis, bool augment) {
  if (!rec.success) return {};
  std::vector<Signal> out = rec.signals;
  if (!augment) return out;
  std::vector<Cell> pool{rec.start};
  pool.insert(pool.end(), rec.points.begin(), rec.points.end());
  for (const Signal& s : augment_positives(scene.map(), rec.spawn, r_vis, rec.object, std::span<const Cell>(pool))) {
    const bool present = std::any_of(out.begin(), out.end(), [&](const Signal& o) { return o.point == s.point; });
    if (!present) out.push_back(s);
  }
  return out;
}

/// Sequential online training with the bandit's scores driving the planner.
inline TrainResult train(const Scene& scene, BanditModel& bandit, const TrainOptions& opt) {
  TrainResult out;
  out.records.reserve(opt.episodes);
  const double r_vis = scene.episode().r_vis_train;
  for (std::size_t t = 0; t < opt.episodes; ++t) {
    bandit.set_episode(static_cast<int>(t) + 1);
    Rng rng = stream_rng(opt.seed, t);
    EpisodeOptions eo{&bandit, ScoreSource::Learned, opt.planner, r_vis, opt.track_regret};
    EpisodeRecord rec = run_episode(scene, eo, rng, t);
    const auto signals = training_signals(scene, rec, r_vis, opt.augment);
    if (!signals.empty()) {
      std::vector<int> signs;
      std::vector<Vector> phis;
      for (const auto& s : signals) {
        signs.push_back(s.value);
        phis.push_back(scene.features()(s.object, s.point));
      }
      bandit.update(rec.object, signs, phis);
    }
    if (opt.track_regret) out.regret.add(rec.learner_expected, rec.benchmark_expected);
    if (opt.observer) opt.observer(rec, bandit);
    out.records.push_back(std::move(rec));
  }
  out.summary = summarize(out.records);
  return out;
}

struct EvalOptions {
  ScoreSource source = ScoreSource::Learned;
  PlannerConfig planner{};
  std::size_t episodes = 300;
  std::uint64_t seed = 1000;
  unsigned jobs = 1;
  bool track_regret = false;
};

struct EvalResult {
  std::vector<EpisodeRecord> records;
  MetricSummary summary;
};

/// Frozen-parameter evaluation at r_vis_eval. Episodes are independent
/// streams, so any job count yields the same records.
inline EvalResult evaluate(const Scene& scene, const BanditModel* bandit, const EvalOptions& opt) {
  EvalResult out;
  out.records.resize(opt.episodes);
  const EpisodeOptions eo{bandit, opt.source, opt.planner, scene.episode().r_vis_eval, opt.track_regret};
  const unsigned jobs = std::max(1U, opt.jobs);
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](unsigned job) {
    try {
      for (std::size_t i = job; i < opt.episodes; i += jobs) {
        Rng rng = stream_rng(opt.seed, i);
        out.records[i] = run_episode(scene, eo, rng, i);
      }
    } catch (...) {
      errors[job] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.summary = summarize(out.records);
  return out;
}

}  // namespace objnav
