#pragma once

// Generalized-linear contextual bandit: confidence-adjusted scoring, online
// Newton updates with an incrementally maintained inverse precision matrix,
// Mahalanobis slab projection and the theoretical exploration schedule.

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "objnav/features.hpp"

namespace objnav {

/// Which side of the confidence interval scores are taken from.
enum class ConfidenceSide { Lower, Upper };

struct BanditConfig {
  double eta = 1.0;     // learning rate
  double alpha = 0.1;   // exploration parameter
  int k = 25;           // path length; precision matrix starts at k*I
  double B = 1.0;       // range bound on theta^T phi
  double delta = 0.1;   // confidence level for the theoretical schedule
  int horizon = 200;    // T for the theoretical schedule
  double c_mult = 1.0;  // constant hidden by the big-O of the schedule
  ConfidenceSide side = ConfidenceSide::Lower;
  bool disjoint = true;            // separate parameters per object class
  bool project = false;            // slab projection before scoring and updating
  bool theoretical_alpha = false;  // replace alpha by the schedule
  int refactor_every = 512;

  friend bool operator==(const BanditConfig&, const BanditConfig&) = default;
};

struct Signal {
  Cell point;
  int value = -1;  // +1 spotted, -1 not spotted
  int object = 0;
};

/// theta, M, M^{-1} and the update counter of one parameter set.
struct ClassState {
  Vector theta;
  Matrix M;
  Matrix Minv;
  std::int64_t c = 1;
  int since_refactor = 0;

  static ClassState initial(int dim, int k) {
    if (dim < 1) throw Error("bandit dimension must be >= 1");
    if (k < 1) throw Error("bandit k must be >= 1");
    ClassState s;
    s.theta = Vector::Zero(dim);
    s.M = Matrix::Identity(dim, dim) * static_cast<double>(k);
    s.Minv = Matrix::Identity(dim, dim) / static_cast<double>(k);
    return s;
  }
  int dimension() const { return static_cast<int>(theta.size()); }
};

struct Score {
  double probability = 0.5;
  double delta_hat = 0.0;  // theta^T phi (after projection when enabled)
  double width = 0.0;      // epsilon = sqrt(alpha * phi^T M^{-1} phi)
};

inline void check_feature(const ClassState& s, const Vector& phi) {
  if (phi.size() != s.theta.size())
    throw Error("feature dimension " + std::to_string(phi.size()) + " does not match bandit dimension " +
                std::to_string(s.theta.size()));
  if (!phi.allFinite()) throw Error("non-finite feature vector");
}

/// Mahalanobis projection of theta onto the slab |theta^T phi| <= B under the
/// metric M (given M^{-1}). Closed form: a move along M^{-1} phi.
inline Vector slab_project(const Vector& theta, const Matrix& Minv, const Vector& phi, double B) {
  if (!(B > 0.0)) throw Error("slab bound B must be positive");
  const double dot = theta.dot(phi);
  if (std::abs(dot) <= B) return theta;
  const Vector u = Minv * phi;
  const double q = phi.dot(u);
  if (!(q > 0.0)) throw Error("slab projection with a zero feature vector");
  const double excess = dot - std::copysign(B, dot);
  return theta - (excess / q) * u;
}

/// Exploration schedule alpha(k, D, T, delta, B) evaluated at episode t.
inline double theoretical_alpha(int k, int D, int T, double delta, double B, int t, double c_mult = 1.0) {
  if (!(delta > 0.0 && delta < std::exp(-1.0))) throw Error("delta must lie in (0, 1/e)");
  if (t < 0 || t > T) throw Error("episode index must satisfy 0 <= t <= T");
  if (k < 1 || D < 1) throw Error("k and D must be positive");
  if (B < 0.0) throw Error("B must be non-negative");
  const double c_sigma = std::exp(B) / (1.0 + std::exp(B));
  const double c_sigma_prime = std::exp(-B) / ((1.0 + std::exp(-B)) * (1.0 + std::exp(-B)));
  const double ratio2 = (c_sigma / c_sigma_prime) * (c_sigma / c_sigma_prime);
  const double odds = c_sigma / (1.0 - c_sigma);
  const double tt = static_cast<double>(t);
  const double term1 = k * B * B;
  const double term2 = ratio2 * D * std::log(1.0 + (tt * odds + std::log((tt + 1.0) / delta)) / k);
  const double term3 = (ratio2 + (1.0 + B) / c_sigma_prime) * std::log(k * (tt + 1.0) / delta);
  return c_mult * (term1 + term2 + term3);
}

/// sigma(theta^T phi -/+ eps) with eps^2 = alpha * phi^T M^{-1} phi. With
/// `project_B` set, theta is first projected onto the slab for this phi.
inline Score lcb_score(const ClassState& s, const Vector& phi, double alpha, double sigmoid_scale,
                       ConfidenceSide side = ConfidenceSide::Lower, double project_B = 0.0) {
  check_feature(s, phi);
  if (alpha < 0.0) throw Error("alpha must be non-negative");
  const Vector u = s.Minv * phi;
  const double q = std::max(0.0, phi.dot(u));
  Score out;
  out.delta_hat = project_B > 0.0 ? slab_project(s.theta, s.Minv, phi, project_B).dot(phi) : s.theta.dot(phi);
  out.width = std::sqrt(alpha * q);
  const double z = side == ConfidenceSide::Lower ? out.delta_hat - out.width : out.delta_hat + out.width;
  out.probability = sigmoid(z, sigmoid_scale);
  return out;
}

/// Recomputes M^{-1} from M through a Cholesky factorization.
inline void refactor(ClassState& s) {
  Eigen::LLT<Matrix> llt(s.M);
  if (llt.info() != Eigen::Success) throw Error("precision matrix lost positive definiteness");
  s.Minv = llt.solve(Matrix::Identity(s.M.rows(), s.M.cols()));
  s.since_refactor = 0;
}

struct UpdateRule {
  double eta = 1.0;
  double sigmoid_scale = 1.0;
  double project_B = 0.0;  // > 0 enables the slab projection step
  int refactor_every = 512;
};

/// One online Newton step per signal, in order:
///   M <- M + phi phi^T
///   theta <- theta + eta * sigma(-s theta^T phi) * s * M^{-1} phi
/// An empty signal list leaves the state untouched.
inline void newton_update(ClassState& state, std::span<const int> signs, std::span<const Vector> features,
                          const UpdateRule& rule) {
  if (signs.size() != features.size()) throw Error("signal and feature lists differ in length");
  for (std::size_t j = 0; j < signs.size(); ++j) {
    const int sj = signs[j];
    if (sj != 1 && sj != -1) throw Error("signal values must be +1 or -1");
    check_feature(state, features[j]);
  }
  for (std::size_t j = 0; j < signs.size(); ++j) {
    const Vector& phi = features[j];
    const double sj = signs[j];
    if (rule.project_B > 0.0) state.theta = slab_project(state.theta, state.Minv, phi, rule.project_B);

    state.M.noalias() += phi * phi.transpose();
    const Vector u = state.Minv * phi;
    state.Minv.noalias() -= (u * u.transpose()) / (1.0 + phi.dot(u));
    if (++state.since_refactor >= rule.refactor_every) refactor(state);

    const double margin = state.theta.dot(phi);
    const double gain = rule.eta * sigmoid(-sj * margin, rule.sigmoid_scale) * sj;
    state.theta.noalias() += gain * (state.Minv * phi);
    ++state.c;
  }
}

namespace detail {
inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace detail

inline std::uint64_t state_hash(const ClassState& s, std::uint64_t h = 1469598103934665603ULL) {
  h = detail::fnv1a(h, s.theta.data(), sizeof(double) * static_cast<std::size_t>(s.theta.size()));
  h = detail::fnv1a(h, s.M.data(), sizeof(double) * static_cast<std::size_t>(s.M.size()));
  h = detail::fnv1a(h, s.Minv.data(), sizeof(double) * static_cast<std::size_t>(s.Minv.size()));
  h = detail::fnv1a(h, &s.c, sizeof(s.c));
  return h;
}

/// Per-class (disjoint) or shared bandit parameters over a fixed feature space.
class BanditModel {
 public:
  BanditModel(BanditConfig config, int dimension, int n_objects, double sigmoid_scale)
      : config_(config), dimension_(dimension), n_objects_(n_objects), sigmoid_scale_(sigmoid_scale) {
    if (n_objects < 1) throw Error("bandit needs at least one object class");
    if (!(sigmoid_scale > 0.0)) throw Error("sigmoid scale must be positive");
    if (!(config.eta > 0.0)) throw Error("eta must be positive");
    if (config.alpha < 0.0) throw Error("alpha must be non-negative");
    states_.assign(config.disjoint ? n_objects : 1, ClassState::initial(dimension, config.k));
  }

  const BanditConfig& config() const { return config_; }
  int dimension() const { return dimension_; }
  int n_objects() const { return n_objects_; }
  double sigmoid_scale() const { return sigmoid_scale_; }
  std::size_t parameter_sets() const { return states_.size(); }

  const ClassState& state(int object) const { return states_.at(slot(object)); }
  ClassState& state(int object) { return states_.at(slot(object)); }

  /// Episode index driving the theoretical schedule.
  void set_episode(int t) { episode_ = t; }
  int episode() const { return episode_; }

  double current_alpha() const {
    if (!config_.theoretical_alpha) return config_.alpha;
    const int t = std::min(episode_, config_.horizon);
    return theoretical_alpha(config_.k, dimension_, config_.horizon, config_.delta, config_.B, t, config_.c_mult);
  }

  Score score(int object, const Vector& phi) const {
    return lcb_score(state(object), phi, current_alpha(), sigmoid_scale_, config_.side,
                     config_.project ? config_.B : 0.0);
  }

  void update(int object, std::span<const int> signs, std::span<const Vector> features) {
    UpdateRule rule{config_.eta, sigmoid_scale_, config_.project ? config_.B : 0.0, config_.refactor_every};
    newton_update(state(object), signs, features, rule);
  }

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& s : states_) h = state_hash(s, h);
    return h;
  }

  nlohmann::json to_json() const;
  static BanditModel from_json(const nlohmann::json& j, BanditConfig config, double sigmoid_scale);

  friend bool operator==(const BanditModel& a, const BanditModel& b) {
    if (a.states_.size() != b.states_.size() || a.dimension_ != b.dimension_) return false;
    for (std::size_t i = 0; i < a.states_.size(); ++i) {
      const auto& x = a.states_[i];
      const auto& y = b.states_[i];
      if (x.c != y.c || x.theta != y.theta || x.M != y.M || x.Minv != y.Minv) return false;
    }
    return true;
  }

 private:
  std::size_t slot(int object) const {
    if (object < 0 || object >= n_objects_) throw Error("invalid object id " + std::to_string(object));
    return config_.disjoint ? static_cast<std::size_t>(object) : 0;
  }

  BanditConfig config_;
  int dimension_;
  int n_objects_;
  double sigmoid_scale_;
  int episode_ = 1;
  std::vector<ClassState> states_;
};

inline constexpr int kCheckpointVersion = 1;

namespace detail {
inline nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> v(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return v;
}
inline Matrix matrix_from_json(const nlohmann::json& j, int dim) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
    throw Error("checkpoint matrix has wrong size");
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = v[static_cast<std::size_t>(r) * dim + c];
  return m;
}
}  // namespace detail

inline nlohmann::json BanditModel::to_json() const {
  nlohmann::json j;
  j["format"] = "objnav-bandit";
  j["version"] = kCheckpointVersion;
  j["dimension"] = dimension_;
  j["n_objects"] = n_objects_;
  j["disjoint"] = config_.disjoint;
  j["classes"] = nlohmann::json::array();
  for (const auto& s : states_) {
    nlohmann::json cj;
    cj["theta"] = std::vector<double>(s.theta.data(), s.theta.data() + s.theta.size());
    cj["M"] = detail::matrix_to_json(s.M);
    cj["Minv"] = detail::matrix_to_json(s.Minv);
    cj["c"] = s.c;
    cj["since_refactor"] = s.since_refactor;
    j["classes"].push_back(std::move(cj));
  }
  return j;
}

inline BanditModel BanditModel::from_json(const nlohmann::json& j, BanditConfig config, double sigmoid_scale) {
  try {
    if (j.at("format").get<std::string>() != "objnav-bandit") throw Error("not a bandit checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error("unsupported checkpoint version " + j.at("version").dump());
    const int dim = j.at("dimension").get<int>();
    const int n = j.at("n_objects").get<int>();
    config.disjoint = j.at("disjoint").get<bool>();
    BanditModel model(config, dim, n, sigmoid_scale);
    const auto& classes = j.at("classes");
    if (classes.size() != model.states_.size()) throw Error("checkpoint class count mismatch");
    for (std::size_t i = 0; i < classes.size(); ++i) {
      auto& s = model.states_[i];
      const auto theta = classes[i].at("theta").get<std::vector<double>>();
      if (theta.size() != static_cast<std::size_t>(dim)) throw Error("checkpoint theta has wrong size");
      s.theta = Eigen::Map<const Vector>(theta.data(), dim);
      s.M = detail::matrix_from_json(classes[i].at("M"), dim);
      s.Minv = detail::matrix_from_json(classes[i].at("Minv"), dim);
      s.c = classes[i].at("c").get<std::int64_t>();
      s.since_refactor = classes[i].at("since_refactor").get<int>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed bandit checkpoint: ") + e.what());
  }
}

}  // namespace objnav
