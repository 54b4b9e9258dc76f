#pragma once

// Feature map phi(i, x) and the scaled logistic link.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "objnav/grid_map.hpp"

namespace objnav {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kPatchSide = 16;

enum class Normalization { L2, MeanVar };

inline std::string to_string(Normalization n) { return n == Normalization::L2 ? "l2" : "mean_var"; }
inline Normalization parse_normalization(const std::string& s) {
  if (s == "l2") return Normalization::L2;
  if (s == "mean_var") return Normalization::MeanVar;
  throw Error("unknown normalization '" + s + "' (expected l2 or mean_var)");
}

struct FeatureConfig {
  int n_objects = 5;
  int patch_cells = 75;  // side of the wall-distance window, resampled to 16x16
  int pe_dim = 20;
  Normalization normalization = Normalization::L2;
  double sigmoid_scale = 1.0;

  int dimension() const { return n_objects + kPatchSide * kPatchSide + pe_dim; }

  void validate() const {
    if (n_objects < 1) throw Error("n_objects must be >= 1");
    if (patch_cells < 1) throw Error("patch_cells must be >= 1");
    if (pe_dim < 0 || pe_dim % 2 != 0) throw Error("pe_dim must be a non-negative even number");
    if (!(sigmoid_scale > 0.0)) throw Error("sigmoid_scale must be positive");
  }

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// sigma(z) = e^{zs} / (1 + e^{zs}), evaluated without overflow and clamped
/// to the open interval (0, 1).
inline double sigmoid(double z, double s = 1.0) {
  const double t = z * s;
  double v;
  if (t >= 0.0) {
    v = 1.0 / (1.0 + std::exp(-t));
  } else {
    const double e = std::exp(t);
    v = e / (1.0 + e);
  }
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  static const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(v, lo, hi);
}

/// Sinusoidal encoding of a cell: dim/2 entries for the row, dim/2 for the
/// column. Entry m of a block is sin (m even) or cos (m odd) of
/// coord / 10000^(4*(m/2)/dim).
inline Vector sinusoidal_pe(Cell x, int dim) {
  if (dim < 0 || dim % 2 != 0) throw Error("positional encoding dimension must be even, got " + std::to_string(dim));
  Vector out(dim);
  const int half = dim / 2;
  const double coords[2] = {static_cast<double>(x.row), static_cast<double>(x.col)};
  for (int b = 0; b < 2; ++b) {
    for (int m = 0; m < half; ++m) {
      const int j = m / 2;
      const double freq = std::pow(10000.0, -4.0 * j / dim);
      const double arg = coords[b] * freq;
      out[b * half + m] = (m % 2 == 0) ? std::sin(arg) : std::cos(arg);
    }
  }
  return out;
}

/// Bilinear sample of a grid at fractional (row, col); out-of-map reads 0.
inline double bilinear(const Grid<double>& g, double r, double c) {
  const int r0 = static_cast<int>(std::floor(r));
  const int c0 = static_cast<int>(std::floor(c));
  const double fr = r - r0;
  const double fc = c - c0;
  auto at = [&](int rr, int cc) { return g.contains({rr, cc}) ? g[{rr, cc}] : 0.0; };
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c0 + 1)) +
         fr * ((1 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1));
}

/// 16x16 resampling of the patch_cells-wide window centered at x.
inline Vector wall_patch(const Grid<double>& wall, Cell x, int patch_cells) {
  Vector out(kPatchSide * kPatchSide);
  const double step = static_cast<double>(patch_cells) / kPatchSide;
  const double origin = -0.5 * patch_cells + 0.5 * step;
  for (int u = 0; u < kPatchSide; ++u)
    for (int v = 0; v < kPatchSide; ++v)
      out[u * kPatchSide + v] = bilinear(wall, x.row + origin + u * step, x.col + origin + v * step);
  return out;
}

inline void normalize(Vector& v, Normalization n) {
  if (n == Normalization::L2) {
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return;
  }
  const double mean = v.mean();
  v.array() -= mean;
  const double sd = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
  if (sd < 1e-12) {
    v.setZero();
    return;
  }
  v /= sd;
}

/// Builds phi(i, x) = normalize([one_hot(i) | wall patch | positional code]).
/// Holds the wall-distance transform of the map it was built for.
class FeatureBuilder {
 public:
  FeatureBuilder(const OccupancyMap& map, FeatureConfig config)
      : map_(&map), config_(config), wall_(wall_distance(map)) {
    config_.validate();
  }

  const FeatureConfig& config() const { return config_; }
  int dimension() const { return config_.dimension(); }
  const Grid<double>& wall() const { return wall_; }

  Vector raw(int object, Cell x) const {
    if (object < 0 || object >= config_.n_objects)
      throw Error("invalid object id " + std::to_string(object));
    if (!map_->feasible(x)) throw Error("feature cell " + to_string(x) + " is not feasible");
    Vector phi = Vector::Zero(dimension());
    phi[object] = 1.0;
    phi.segment(config_.n_objects, kPatchSide * kPatchSide) = wall_patch(wall_, x, config_.patch_cells);
    phi.tail(config_.pe_dim) = sinusoidal_pe(x, config_.pe_dim);
    return phi;
  }

  Vector operator()(int object, Cell x) const {
    Vector phi = raw(object, x);
    normalize(phi, config_.normalization);
    return phi;
  }

 private:
  const OccupancyMap* map_;
  FeatureConfig config_;
  Grid<double> wall_;
};

}  // namespace objnav
