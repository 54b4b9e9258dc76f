#pragma once

// Scenario files: JSON description of a map, object classes, spawn
// distributions and every hyperparameter of a run.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "objnav/simulator.hpp"

namespace objnav {

struct ScenarioConfig {
  std::string map_path;
  double cell_size = 0.1;
  SpawnModel spawn;
  std::size_t vantage_k = 25;
  FeatureConfig features{};
  BanditConfig bandit{};
  PlannerConfig planner{};
  EpisodeConfig episode{};
  std::uint64_t train_seed = 1;
  std::uint64_t eval_seed = 1001;
  std::size_t train_episodes = 200;
  std::size_t eval_episodes = 300;
  bool augment = true;
  std::vector<std::string> overrides;  // fields allowed outside the documented search ranges

  std::filesystem::path base_dir;  // directory of the scenario file; not serialized

  bool overridden(const std::string& field) const {
    return std::find(overrides.begin(), overrides.end(), field) != overrides.end();
  }

  /// Range checks against the documented hyperparameter search space.
  void validate() const {
    features.validate();
    episode.validate();
    auto check = [&](const std::string& field, bool ok, const std::string& range) {
      if (!ok && !overridden(field))
        throw Error("scenario field '" + field + "' outside " + range + " (list it under \"overrides\" to allow)");
    };
    check("eta", bandit.eta >= 0.01 && bandit.eta <= 100.0, "[0.01, 100]");
    check("alpha", bandit.alpha >= 0.1 && bandit.alpha <= 10.0, "[0.1, 10]");
    check("vantage_k", vantage_k == 25 || vantage_k == 50, "{25, 50}");
    check("alpha_p", planner.alpha_p >= 0.1 && planner.alpha_p <= 0.9, "[0.1, 0.9]");
    const std::set<int> pe{10, 20, 30, 50};
    check("pe_dim", pe.count(features.pe_dim) == 1, "{10, 20, 30, 50}");
    check("sigmoid_scale", features.sigmoid_scale >= 10.0 && features.sigmoid_scale <= 20.0, "[10, 20]");
    const std::set<int> patch{37, 75, 150};
    check("patch_cells", patch.count(features.patch_cells) == 1, "{37, 75, 150}");
    if (!(bandit.eta > 0.0)) throw Error("eta must be positive");
    if (bandit.alpha < 0.0) throw Error("alpha must be non-negative");
    if (planner.alpha_p < 0.0 || planner.alpha_p > 1.0) throw Error("alpha_p must lie in [0, 1]");
    if (vantage_k < 1) throw Error("vantage_k must be >= 1");
    planner.exact.budget.validate();
  }

  std::filesystem::path resolved_map_path() const {
    std::filesystem::path p(map_path);
    return p.is_absolute() ? p : base_dir / p;
  }

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
};

inline nlohmann::json to_json(const ScenarioConfig& s) {
  using nlohmann::json;
  json j;
  j["map"] = s.map_path;
  j["cell_size"] = s.cell_size;
  j["peaky"] = s.spawn.peaky;
  j["objects"] = json::array();
  for (const auto& o : s.spawn.objects) {
    json spawn = json::array();
    for (const auto& [fid, p] : o.distribution) spawn.push_back({{"furniture", fid}, {"p", p}});
    j["objects"].push_back({{"name", o.name}, {"spawn", spawn}});
  }
  j["vantage_k"] = s.vantage_k;
  j["features"] = {{"patch_cells", s.features.patch_cells},
                   {"pe_dim", s.features.pe_dim},
                   {"normalization", to_string(s.features.normalization)},
                   {"sigmoid_scale", s.features.sigmoid_scale}};
  j["bandit"] = {{"eta", s.bandit.eta},
                 {"alpha", s.bandit.alpha},
                 {"B", s.bandit.B},
                 {"delta", s.bandit.delta},
                 {"horizon", s.bandit.horizon},
                 {"c_mult", s.bandit.c_mult},
                 {"side", s.bandit.side == ConfidenceSide::Lower ? "lower" : "upper"},
                 {"disjoint", s.bandit.disjoint},
                 {"project", s.bandit.project},
                 {"theoretical_alpha", s.bandit.theoretical_alpha},
                 {"refactor_every", s.bandit.refactor_every}};
  j["planner"] = {{"kind", to_string(s.planner.kind)},
                  {"alpha_p", s.planner.alpha_p},
                  {"time_limit_s", s.planner.exact.budget.time_limit_s},
                  {"node_limit", s.planner.exact.budget.node_limit},
                  {"dp_max_points", s.planner.exact.dp_max_points}};
  j["episode"] = {{"r_vis_train", s.episode.r_vis_train},
                  {"r_vis_eval", s.episode.r_vis_eval},
                  {"failure_prob", s.episode.failure_prob},
                  {"L_M", s.episode.L_M},
                  {"occlusion", s.episode.occlusion}};
  j["seeds"] = {{"train", s.train_seed}, {"eval", s.eval_seed}};
  j["train_episodes"] = s.train_episodes;
  j["eval_episodes"] = s.eval_episodes;
  j["augment"] = s.augment;
  j["overrides"] = s.overrides;
  return j;
}

/// Missing fields keep their defaults; unknown planner/normalization names
/// and malformed values raise Error.
inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig s;
  try {
    s.map_path = j.at("map").get<std::string>();
    s.cell_size = j.value("cell_size", s.cell_size);
    s.spawn.peaky = j.value("peaky", false);
    for (const auto& o : j.at("objects")) {
      ObjectClass oc;
      oc.name = o.at("name").get<std::string>();
      for (const auto& e : o.at("spawn")) oc.distribution.emplace_back(e.at("furniture").get<std::string>(), e.at("p").get<double>());
      s.spawn.objects.push_back(std::move(oc));
    }
    s.vantage_k = j.value("vantage_k", s.vantage_k);
    s.features.n_objects = static_cast<int>(s.spawn.objects.size());
    if (j.contains("features")) {
      const auto& f = j["features"];
      s.features.patch_cells = f.value("patch_cells", s.features.patch_cells);
      s.features.pe_dim = f.value("pe_dim", s.features.pe_dim);
      s.features.normalization = parse_normalization(f.value("normalization", std::string("l2")));
      s.features.sigmoid_scale = f.value("sigmoid_scale", s.features.sigmoid_scale);
    }
    if (j.contains("bandit")) {
      const auto& b = j["bandit"];
      s.bandit.eta = b.value("eta", s.bandit.eta);
      s.bandit.alpha = b.value("alpha", s.bandit.alpha);
      s.bandit.B = b.value("B", s.bandit.B);
      s.bandit.delta = b.value("delta", s.bandit.delta);
      s.bandit.horizon = b.value("horizon", s.bandit.horizon);
      s.bandit.c_mult = b.value("c_mult", s.bandit.c_mult);
      const auto side = b.value("side", std::string("lower"));
      if (side != "lower" && side != "upper") throw Error("bandit side must be lower or upper");
      s.bandit.side = side == "lower" ? ConfidenceSide::Lower : ConfidenceSide::Upper;
      s.bandit.disjoint = b.value("disjoint", s.bandit.disjoint);
      s.bandit.project = b.value("project", s.bandit.project);
      s.bandit.theoretical_alpha = b.value("theoretical_alpha", s.bandit.theoretical_alpha);
      s.bandit.refactor_every = b.value("refactor_every", s.bandit.refactor_every);
    }
    s.bandit.k = static_cast<int>(s.vantage_k);
    if (j.contains("planner")) {
      const auto& p = j["planner"];
      s.planner.kind = parse_planner_kind(p.value("kind", std::string("exact")));
      s.planner.alpha_p = p.value("alpha_p", s.planner.alpha_p);
      s.planner.exact.budget.time_limit_s = p.value("time_limit_s", s.planner.exact.budget.time_limit_s);
      s.planner.exact.budget.node_limit = p.value("node_limit", s.planner.exact.budget.node_limit);
      s.planner.exact.dp_max_points = p.value("dp_max_points", s.planner.exact.dp_max_points);
    }
    if (j.contains("episode")) {
      const auto& e = j["episode"];
      s.episode.r_vis_train = e.value("r_vis_train", s.episode.r_vis_train);
      s.episode.r_vis_eval = e.value("r_vis_eval", s.episode.r_vis_eval);
      s.episode.failure_prob = e.value("failure_prob", s.episode.failure_prob);
      s.episode.L_M = e.value("L_M", s.episode.L_M);
      s.episode.occlusion = e.value("occlusion", s.episode.occlusion);
    }
    if (j.contains("seeds")) {
      s.train_seed = j["seeds"].value("train", s.train_seed);
      s.eval_seed = j["seeds"].value("eval", s.eval_seed);
    }
    s.train_episodes = j.value("train_episodes", s.train_episodes);
    s.eval_episodes = j.value("eval_episodes", s.eval_episodes);
    s.augment = j.value("augment", s.augment);
    s.overrides = j.value("overrides", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed scenario: ") + e.what());
  }
  s.validate();
  return s;
}

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return to_json(a) == to_json(b);
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  ScenarioConfig s = scenario_from_json(j);
  s.base_dir = path.parent_path();
  return s;
}

/// Loads the map and builds the immutable scene.
inline Scene build_scene(const ScenarioConfig& s) {
  const auto map_file = s.resolved_map_path();
  if (!std::filesystem::exists(map_file)) throw Error("map file not found: " + map_file.string());
  return Scene(load_map(map_file.string(), s.cell_size), s.spawn, s.features, s.vantage_k, s.episode);
}

inline BanditModel make_bandit(const ScenarioConfig& s) {
  return BanditModel(s.bandit, s.features.dimension(), s.features.n_objects, s.features.sigmoid_scale);
}

inline TrainOptions train_options(const ScenarioConfig& s) {
  TrainOptions o;
  o.planner = s.planner;
  o.episodes = s.train_episodes;
  o.seed = s.train_seed;
  o.augment = s.augment;
  o.track_regret = true;
  return o;
}

/// One draw from the documented search space (k and the planner stay fixed).
inline ScenarioConfig sample_hyperparameters(const ScenarioConfig& base, Rng& rng) {
  ScenarioConfig s = base;
  s.bandit.eta = std::pow(10.0, -2.0 + 4.0 * uniform01(rng));
  s.bandit.alpha = 0.1 + 9.9 * uniform01(rng);
  s.planner.alpha_p = 0.1 + 0.8 * uniform01(rng);
  const int patches[] = {37, 75, 150};
  s.features.patch_cells = patches[uniform_index(rng, 3)];
  const int pes[] = {10, 20, 30, 50};
  s.features.pe_dim = pes[uniform_index(rng, 4)];
  s.features.normalization = uniform_index(rng, 2) == 0 ? Normalization::L2 : Normalization::MeanVar;
  return s;
}

}  // namespace objnav
