// Runs a handful of ground-truth-scored episodes on the reference kitchen and
// prints each route next to the TSP route for the same episode.
//
//   demo_search [scenario.json] [episodes]

#include <cstdio>
#include <string>

#include "objnav/objnav.hpp"

using namespace objnav;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : std::string(OBJNAV_SOURCE_DIR) + "/scenarios/kitchen1_peaky.json";
  const std::size_t episodes = argc > 2 ? std::stoul(argv[2]) : 5;
  try {
    const ScenarioConfig sc = load_scenario(path);
    const Scene scene = build_scene(sc);
    PlannerConfig tsp = sc.planner;
    tsp.kind = PlannerKind::Tsp;
    for (std::size_t i = 0; i < episodes; ++i) {
      Rng a = stream_rng(sc.eval_seed, i);
      Rng b = stream_rng(sc.eval_seed, i);
      const auto gt = run_episode(scene, {nullptr, ScoreSource::GroundTruth, sc.planner, sc.episode.r_vis_eval}, a, i);
      const auto base = run_episode(scene, {nullptr, ScoreSource::GroundTruth, tsp, sc.episode.r_vis_eval}, b, i);
      std::printf("episode %zu: %s at %s, start %s\n", i, sc.spawn.objects[gt.object].name.c_str(),
                  to_string(gt.spawn).c_str(), to_string(gt.start).c_str());
      std::printf("  gt-scored route: %zu stops, %.2f m driven\n", gt.visited, gt.path_length);
      std::printf("  tsp route:       %zu stops, %.2f m driven\n", base.visited, base.path_length);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  return 0;
}
