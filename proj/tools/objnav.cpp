// objnav: train, evaluate, plan and benchmark object-search agents on grid maps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "objnav/objnav.hpp"

namespace fs = std::filesystem;
using namespace objnav;

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("OBJNAV_LOG_LEVEL");
  if (env == nullptr) return Level::Info;
  const std::string v(env);
  if (v == "error") return Level::Error;
  if (v == "warn") return Level::Warn;
  if (v == "debug") return Level::Debug;
  return Level::Info;
}

void log(Level lvl, const std::string& msg) {
  static const Level threshold = log_level();
  if (lvl > threshold) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << '\n';
}

std::string to_text(const std::function<void(std::ostream&)>& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + " is not valid JSON: " + e.what());
  }
}

std::string summary_line(const std::string& label, const MetricSummary& m) {
  std::ostringstream os;
  os << label << ": episodes=" << m.episodes << " success=" << fmt(m.success_rate) << " spl=" << fmt(m.spl);
  return os.str();
}

struct TrainArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::size_t random_search = 0;
};

int cmd_train(const TrainArgs& a) {
  ScenarioConfig sc = load_scenario(a.scenario);
  if (a.seed) sc.train_seed = *a.seed;
  if (a.episodes) sc.train_episodes = *a.episodes;
  const fs::path out(a.out);
  ensure_dir(out);

  if (a.random_search > 0) {
    Rng rng = stream_rng(sc.train_seed, 0x5eed);
    ScenarioConfig best = sc;
    double best_spl = -1.0;
    std::ostringstream table;
    table << "trial,eta,alpha,alpha_p,patch_cells,pe_dim,normalization,train_spl\n";
    for (std::size_t i = 0; i < a.random_search; ++i) {
      ScenarioConfig cand = sample_hyperparameters(sc, rng);
      cand.validate();
      Scene scene = build_scene(cand);
      BanditModel bandit = make_bandit(cand);
      TrainOptions topt = train_options(cand);
      topt.track_regret = false;
      const double s = train(scene, bandit, topt).summary.spl;
      table << i << ',' << fmt(cand.bandit.eta) << ',' << fmt(cand.bandit.alpha) << ',' << fmt(cand.planner.alpha_p)
            << ',' << cand.features.patch_cells << ',' << cand.features.pe_dim << ','
            << to_string(cand.features.normalization) << ',' << fmt(s) << '\n';
      log(Level::Info, "trial " + std::to_string(i) + " train spl " + fmt(s));
      if (s > best_spl) {
        best_spl = s;
        best = cand;
      }
    }
    write_text_file(out / "random_search.csv", table.str());
    write_text_file(out / "best_scenario.json", to_json(best).dump(2) + "\n");
    best.base_dir = sc.base_dir;
    sc = best;
  }

  Scene scene = build_scene(sc);
  BanditModel bandit = make_bandit(sc);
  log(Level::Info, "training " + std::to_string(sc.train_episodes) + " episodes, D=" +
                       std::to_string(sc.features.dimension()) + ", k=" + std::to_string(sc.vantage_k));
  const TrainResult res = train(scene, bandit, train_options(sc));
  write_text_file(out / "checkpoint.json", bandit.to_json().dump() + "\n");
  write_text_file(out / "train_episodes.csv",
                  to_text([&](std::ostream& os) { write_episodes_csv(os, res.records, sc.spawn); }));
  write_text_file(out / "train_summary.csv",
                  to_text([&](std::ostream& os) { write_summary_csv(os, "train", res.summary); }));
  write_text_file(out / "train_regret.csv", to_text([&](std::ostream& os) { write_regret_csv(os, res.regret); }));
  std::cout << summary_line("train", res.summary) << '\n';
  return 0;
}

struct EvalArgs {
  std::string scenario;
  std::string out;
  std::string checkpoint;
  bool gt_scores = false;
  bool tsp = false;
  std::string planner;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  unsigned jobs = 1;
  bool no_heatmap = false;
};

int cmd_eval(const EvalArgs& a) {
  if (a.gt_scores && a.tsp) throw Error("--gt-scores and --tsp are conflicting score sources");
  if (a.gt_scores && !a.checkpoint.empty()) throw Error("--gt-scores and --checkpoint are conflicting score sources");
  if (!a.gt_scores && !a.tsp && a.checkpoint.empty())
    throw Error("eval needs exactly one score source: --checkpoint, --gt-scores or --tsp");
  if (a.tsp && !a.checkpoint.empty()) log(Level::Warn, "--tsp ignores --checkpoint");

  ScenarioConfig sc = load_scenario(a.scenario);
  if (a.seed) sc.eval_seed = *a.seed;
  if (a.episodes) sc.eval_episodes = *a.episodes;
  if (!a.planner.empty()) sc.planner.kind = parse_planner_kind(a.planner);
  if (a.tsp) sc.planner.kind = PlannerKind::Tsp;
  const fs::path out(a.out);
  Scene scene = build_scene(sc);

  std::optional<BanditModel> bandit;
  EvalOptions eo;
  eo.planner = sc.planner;
  eo.episodes = sc.eval_episodes;
  eo.seed = sc.eval_seed;
  eo.jobs = a.jobs;
  std::string label;
  if (a.tsp) {
    eo.source = ScoreSource::GroundTruth;  // unused by the TSP planner
    label = "tsp";
  } else if (a.gt_scores) {
    eo.source = ScoreSource::GroundTruth;
    label = "gt_" + to_string(sc.planner.kind);
  } else {
    bandit = BanditModel::from_json(read_json(a.checkpoint), sc.bandit, sc.features.sigmoid_scale);
    if (bandit->dimension() != sc.features.dimension() || bandit->n_objects() != sc.features.n_objects)
      throw Error("checkpoint " + a.checkpoint + " does not match the scenario feature layout");
    bandit->set_episode(static_cast<int>(sc.train_episodes));
    eo.source = ScoreSource::Learned;
    label = "learned_" + to_string(sc.planner.kind);
  }
  ensure_dir(out);
  log(Level::Info, "evaluating " + std::to_string(eo.episodes) + " episodes (" + label + ")");
  const EvalResult res = evaluate(scene, bandit ? &*bandit : nullptr, eo);
  write_text_file(out / "eval_episodes.csv",
                  to_text([&](std::ostream& os) { write_episodes_csv(os, res.records, sc.spawn); }));
  write_text_file(out / "eval_summary.csv",
                  to_text([&](std::ostream& os) { write_summary_csv(os, label, res.summary); }));
  if (!a.tsp && !a.no_heatmap) {
    std::vector<Grid<double>> grids;
    for (int i = 0; i < sc.features.n_objects; ++i)
      grids.push_back(score_grid(scene, i, bandit ? &*bandit : nullptr, sc.episode.r_vis_eval));
    write_text_file(out / "heatmap.svg", to_text([&](std::ostream& os) { write_heatmap_svg(os, scene, grids); }));
  }
  std::cout << summary_line(label, res.summary) << '\n';
  return 0;
}

struct PlanArgs {
  std::string map;
  std::string points;
  std::string out;
  std::string planner = "exact";
  double alpha_p = 0.5;
  double cell_size = 0.1;
  double time_limit = 30.0;
};

// points file: {"start": [row, col], "points": [{"cell": [row, col], "score": p}, ...]}
int cmd_plan(const PlanArgs& a) {
  const OccupancyMap map = load_map(a.map, a.cell_size);
  const nlohmann::json in = read_json(a.points);
  std::vector<Cell> cells;
  std::vector<double> scores;
  try {
    const auto s = in.at("start");
    cells.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
    for (const auto& p : in.at("points")) {
      cells.push_back({p.at("cell").at(0).get<int>(), p.at("cell").at(1).get<int>()});
      scores.push_back(p.at("score").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed points file " + a.points + ": " + e.what());
  }
  for (Cell c : cells)
    if (!map.feasible(c)) throw Error("point " + to_string(c) + " is not a feasible cell");
  PlannerConfig pc;
  pc.kind = parse_planner_kind(a.planner);
  pc.alpha_p = a.alpha_p;
  pc.exact.budget.time_limit_s = a.time_limit;
  const DistanceOracle oracle(map, cells);
  const Plan plan = make_route(pc, oracle.matrix(), scores);
  nlohmann::json j;
  j["planner"] = a.planner;
  j["objective"] = plan.objective;
  j["optimal"] = plan.optimal;
  j["length"] = plan.length();
  j["waypoints"] = nlohmann::json::array();
  for (std::size_t l = 0; l < plan.order.size(); ++l) {
    const Cell c = cells[plan.order[l] + 1];
    j["waypoints"].push_back(
        {{"row", c.row}, {"col", c.col}, {"score", scores[plan.order[l]]}, {"latency", plan.latency[l]}});
  }
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty())
    std::cout << text;
  else
    write_text_file(a.out, text);
  return 0;
}

struct BenchArgs {
  BenchOptions opt;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  const auto rows = solver_bench(a.opt);
  const std::string text = to_text([&](std::ostream& os) { write_bench_csv(os, rows); });
  if (a.out.empty())
    std::cout << text;
  else
    write_text_file(a.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object search with learned spotting likelihoods and minimum-latency planning.\n"
               "Log level: OBJNAV_LOG_LEVEL=error|warn|info|debug (default info)."};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train the bandit online and write checkpoint.json plus CSVs");
  train_cmd->add_option("--scenario", ta.scenario, "Scenario JSON file")->required();
  train_cmd->add_option("--out", ta.out, "Output directory")->required();
  train_cmd->add_option("--seed", ta.seed, "Override the scenario training seed");
  train_cmd->add_option("--episodes", ta.episodes, "Override the number of training episodes T");
  train_cmd->add_option("--random-search", ta.random_search,
                        "Sample N hyperparameter sets, keep the best by Train SPL (0 = off)")
      ->capture_default_str();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate with frozen scores and write summary, episodes and heatmap");
  eval_cmd->add_option("--scenario", ea.scenario, "Scenario JSON file")->required();
  eval_cmd->add_option("--out", ea.out, "Output directory")->required();
  eval_cmd->add_option("--checkpoint", ea.checkpoint, "Bandit checkpoint from train");
  eval_cmd->add_flag("--gt-scores", ea.gt_scores, "Use ground-truth spotting probabilities");
  eval_cmd->add_flag("--tsp", ea.tsp, "Score-free shortest-tour baseline");
  eval_cmd->add_option("--planner", ea.planner, "Override planner: exact, greedy or tsp");
  eval_cmd->add_option("--seed", ea.seed, "Override the scenario evaluation seed");
  eval_cmd->add_option("--episodes", ea.episodes, "Override the number of evaluation episodes N");
  eval_cmd->add_option("--jobs", ea.jobs, "Worker threads (results do not depend on it)")->capture_default_str();
  eval_cmd->add_flag("--no-heatmap", ea.no_heatmap, "Skip heatmap.svg");

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Order scored vantage points on a map; prints waypoint JSON");
  plan_cmd->add_option("--map", pa.map, "Map text file")->required();
  plan_cmd->add_option("--points", pa.points, "JSON with start and scored points")->required();
  plan_cmd->add_option("--out", pa.out, "Output file (default stdout)");
  plan_cmd->add_option("--planner", pa.planner, "exact, greedy or tsp")->capture_default_str();
  plan_cmd->add_option("--alpha-p", pa.alpha_p, "Greedy trade-off between distance and score")->capture_default_str();
  plan_cmd->add_option("--cell-size", pa.cell_size, "Cell side in meters")->capture_default_str();
  plan_cmd->add_option("--time-limit", pa.time_limit, "Exact solver time limit in seconds")->capture_default_str();

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Solver runtime per number of vantage points (CSV)");
  bench_cmd->add_option("--k-min", ba.opt.k_min, "Smallest k")->capture_default_str();
  bench_cmd->add_option("--k-max", ba.opt.k_max, "Largest k")->capture_default_str();
  bench_cmd->add_option("--budget", ba.opt.budget.time_limit_s, "Per-instance time limit in seconds")
      ->capture_default_str();
  bench_cmd->add_option("--instances", ba.opt.instances, "Instances per k")->capture_default_str();
  bench_cmd->add_option("--dp-max", ba.opt.dp_max_points, "Largest k solved by the subset DP")->capture_default_str();
  bench_cmd->add_option("--seed", ba.opt.seed, "Instance seed")->capture_default_str();
  bench_cmd->add_option("--out", ba.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(ta);
    if (eval_cmd->parsed()) return cmd_eval(ea);
    if (plan_cmd->parsed()) return cmd_plan(pa);
    if (bench_cmd->parsed()) return cmd_bench(ba);
  } catch (const Error& e) {
    log(Level::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log(Level::Error, std::string("unexpected failure: ") + e.what());
    return 1;
  }
  return 0;
}
