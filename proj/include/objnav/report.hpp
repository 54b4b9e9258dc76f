#pragma once

// CSV and SVG artifacts written by the command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "objnav/bench.hpp"
#include "objnav/simulator.hpp"

namespace objnav {

/// Shortest round-trip decimal form; "inf" for infinities.
inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_episodes_csv(std::ostream& out, const std::vector<EpisodeRecord>& records,
                               const SpawnModel& spawn) {
  out << "episode,object,start_row,start_col,spawn_row,spawn_col,failure,success,visited,path_length,shortest,spl,"
         "loss,learner_expected,benchmark_expected\n";
  for (const auto& r : records) {
    out << r.index << ',' << spawn.objects.at(static_cast<std::size_t>(r.object)).name << ',' << r.start.row << ','
        << r.start.col << ',' << r.spawn.row << ',' << r.spawn.col << ',' << (r.failure ? 1 : 0) << ','
        << (r.success ? 1 : 0) << ',' << r.visited << ',' << fmt(r.path_length) << ',' << fmt(r.shortest) << ','
        << fmt(spl_term(r.success, r.path_length, std::isfinite(r.shortest) ? r.shortest : 0.0)) << ','
        << fmt(r.loss) << ',' << fmt(r.learner_expected) << ',' << fmt(r.benchmark_expected) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const std::string& label, const MetricSummary& m) {
  out << "run,episodes,success_rate,spl,mean_loss\n";
  out << label << ',' << m.episodes << ',' << fmt(m.success_rate) << ',' << fmt(m.spl) << ',' << fmt(m.mean_loss)
      << '\n';
}

inline void write_regret_csv(std::ostream& out, const RegretLedger& ledger) {
  out << "t,learner_expected,benchmark_expected,cumulative_regret,average_regret\n";
  const auto curve = regret_curve(ledger);
  for (std::size_t i = 0; i < curve.size(); ++i)
    out << curve[i].t << ',' << fmt(ledger.terms[i].first) << ',' << fmt(ledger.terms[i].second) << ','
        << fmt(curve[i].cumulative) << ',' << fmt(curve[i].average) << '\n';
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "k,solver,instances,mean_seconds,max_seconds,mean_objective,optimal\n";
  for (const auto& r : rows)
    out << r.k << ',' << r.solver << ',' << r.instances << ',' << fmt(r.mean_seconds) << ',' << fmt(r.max_seconds)
        << ',' << fmt(r.mean_objective) << ',' << r.optimal << '\n';
}

/// Per-cell likelihood grid; NaN marks cells without a score.
inline Grid<double> score_grid(const Scene& scene, int object, const BanditModel* bandit, double r_vis) {
  const auto& map = scene.map();
  Grid<double> g(map.height(), map.width(), std::nan(""));
  for (Cell c : map.feasible_cells()) {
    g[c] = bandit ? bandit->score(object, scene.features()(object, c)).probability
                  : gt_spot_probability(map, scene.spawn(), object, c, r_vis, scene.episode().occlusion);
  }
  return g;
}

inline std::string heat_color(double v) {
  // dark blue -> teal -> yellow
  const double t = std::clamp(v, 0.0, 1.0);
  const double r = t < 0.5 ? 30 + 2 * t * 20 : 50 + (t - 0.5) * 2 * 203;
  const double gch = t < 0.5 ? 40 + 2 * t * 140 : 180 + (t - 0.5) * 2 * 51;
  const double b = t < 0.5 ? 110 + 2 * t * 30 : 140 - (t - 0.5) * 2 * 110;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(r), static_cast<int>(gch), static_cast<int>(b));
  return buf;
}

/// One panel per object class, scores in [0, 1]; obstacles grey, furniture brown.
inline void write_heatmap_svg(std::ostream& out, const Scene& scene, const std::vector<Grid<double>>& grids,
                              int px = 4) {
  const auto& map = scene.map();
  const int gap = 16;
  const int label = 18;
  const int n = static_cast<int>(grids.size());
  const int pw = map.width() * px;
  const int ph = map.height() * px;
  const int width = n * pw + (n + 1) * gap;
  const int height = ph + label + 2 * gap;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::vector<bool> is_furniture(static_cast<std::size_t>(map.height() * map.width()), false);
  for (const auto& f : map.furniture())
    for (Cell c : f.cells) is_furniture[static_cast<std::size_t>(c.row * map.width() + c.col)] = true;
  for (int i = 0; i < n; ++i) {
    const int x0 = gap + i * (pw + gap);
    const int y0 = gap + label;
    out << "<text x=\"" << x0 << "\" y=\"" << gap + 12 << "\">"
        << scene.spawn().objects[static_cast<std::size_t>(i)].name << "</text>\n";
    out << "<g transform=\"translate(" << x0 << ',' << y0 << ")\">\n";
    for (int r = 0; r < map.height(); ++r)
      for (int c = 0; c < map.width(); ++c) {
        const double v = grids[static_cast<std::size_t>(i)][{r, c}];
        std::string color;
        if (!std::isnan(v))
          color = heat_color(v);
        else
          color = is_furniture[static_cast<std::size_t>(r * map.width() + c)] ? "#8b6a4a" : "#555555";
        out << "<rect x=\"" << c * px << "\" y=\"" << r * px << "\" width=\"" << px << "\" height=\"" << px
            << "\" fill=\"" << color << "\"/>\n";
      }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace objnav
