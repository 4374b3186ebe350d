#pragma once

// Estimating innate opinions from an expressed-opinion oracle:
//   s_u = (1+w_u) z*_u - S_u,  S_u = sum_{(u,v) in E} w_uv z*_v.
// Below the degree threshold S_u is computed exactly in O(d_u); above it,
// S_u is estimated by weighted neighbor sampling, either with the plain
// mean estimator (additive error) or the collision estimator (multiplicative
// error with ~sqrt(d_u) samples), median-amplified across repetitions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"
#include "fjest/opinions.hpp"
#include "fjest/random.hpp"

namespace fjest {

enum class SMethod { MeanSampling, Collision };

struct SEstimatorConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  std::int64_t threshold = 400;     // degrees below this take the exact path
  int repetitions = 5;              // odd; median across repetitions
  SMethod method = SMethod::MeanSampling;
  double collision_floor = 0.5;     // assumed lower bound c on z* values
  std::int64_t sample_override = 0; // >0: fixed samples per repetition
};

namespace detail {

inline void validate_s_config(const SEstimatorConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    throw ValidationError("SEstimatorConfig: epsilon must be in (0, 1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw ValidationError("SEstimatorConfig: delta must be in (0, 1)");
  if (cfg.repetitions < 1 || cfg.repetitions % 2 == 0)
    throw ValidationError("SEstimatorConfig: repetitions must be odd and >= 1");
  if (cfg.threshold < 0) throw ValidationError("SEstimatorConfig: threshold must be >= 0");
  if (!(cfg.collision_floor > 0.0 && cfg.collision_floor < 1.0))
    throw ValidationError("SEstimatorConfig: collision_floor must be in (0, 1)");
}

inline double median_in_place(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Tallies weighted-with-replacement neighbor draws by local arc index, then
// reads each distinct sampled neighbor's opinion once.
struct NeighborTally {
  std::vector<std::int64_t> counts;
  void reset(std::int64_t d) { counts.assign(static_cast<std::size_t>(d), 0); }
  void draw(const Graph& g, VertexId u, std::int64_t k, RandomStream& rng) {
    for (std::int64_t i = 0; i < k; ++i) ++counts[g.sample_neighbor_arc(u, rng)];
  }
};

}  // namespace detail

inline std::int64_t mean_sample_count(double w_u, double eps) {
  return static_cast<std::int64_t>(std::ceil(10.0 * w_u * w_u / (eps * eps)));
}

inline std::int64_t collision_sample_count(std::int64_t d_u, double eps, double c) {
  return static_cast<std::int64_t>(
      std::ceil(9.0 * std::sqrt(static_cast<double>(d_u)) / (eps * c)));
}

inline double estimate_s_exact(const Graph& g, const Oracle& z_oracle, VertexId u) {
  const double wu = g.weighted_degree(u);
  double s = (1.0 + wu) * z_oracle(u);
  const auto nb = g.neighbors(u);
  const auto ws = g.neighbor_weights(u);
  for (std::size_t k = 0; k < nb.size(); ++k) s -= ws[k] * z_oracle(nb[k]);
  return s;
}

// Mean estimator for S_u (Y = w_u * mean of sampled z values); additive
// +-epsilon per repetition with constant probability, median across reps.
inline double estimate_S_mean(const Graph& g, const Oracle& z_oracle, VertexId u,
                              const SEstimatorConfig& cfg, RandomStream& rng) {
  detail::validate_s_config(cfg);
  const auto d = g.unweighted_degree(u);
  if (d == 0) throw NoNeighborError("estimate_S_mean: vertex has no neighbors");
  const double wu = g.weighted_degree(u);
  const std::int64_t k = cfg.sample_override > 0 ? cfg.sample_override
                                                 : mean_sample_count(wu, cfg.epsilon);
  const auto nb = g.neighbors(u);
  std::vector<double> z_cache(static_cast<std::size_t>(d),
                              std::numeric_limits<double>::quiet_NaN());
  detail::NeighborTally tally;
  std::vector<double> reps;
  reps.reserve(cfg.repetitions);
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    tally.reset(d);
    tally.draw(g, u, k, rng);
    double sum = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
      if (tally.counts[j] == 0) continue;
      if (std::isnan(z_cache[j])) z_cache[j] = z_oracle(nb[j]);
      sum += static_cast<double>(tally.counts[j]) * z_cache[j];
    }
    reps.push_back(wu * sum / static_cast<double>(k));
  }
  return detail::median_in_place(reps);
}

// Collision estimator: S~ = w_u^2 * C(m,2)^{-1} * sum_t C(c_t,2) z*_t / w_ut
// over distinct sampled neighbors t with multiplicities c_t. Falls back to
// the mean estimator when m < 3 (the pair count degenerates).
inline double estimate_S_collision(const Graph& g, const Oracle& z_oracle, VertexId u,
                                   const SEstimatorConfig& cfg, RandomStream& rng) {
  detail::validate_s_config(cfg);
  const auto d = g.unweighted_degree(u);
  if (d == 0) throw NoNeighborError("estimate_S_collision: vertex has no neighbors");
  const double wu = g.weighted_degree(u);
  const std::int64_t m = cfg.sample_override > 0
                             ? cfg.sample_override
                             : collision_sample_count(d, cfg.epsilon, cfg.collision_floor);
  if (m < 3) return estimate_S_mean(g, z_oracle, u, cfg, rng);
  const auto nb = g.neighbors(u);
  const auto ws = g.neighbor_weights(u);
  const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  std::vector<double> z_cache(static_cast<std::size_t>(d),
                              std::numeric_limits<double>::quiet_NaN());
  detail::NeighborTally tally;
  std::vector<double> reps;
  reps.reserve(cfg.repetitions);
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    tally.reset(d);
    tally.draw(g, u, m, rng);
    double sum = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
      const auto c = tally.counts[j];
      if (c < 2) continue;  // only colliding neighbors contribute
      if (std::isnan(z_cache[j])) z_cache[j] = z_oracle(nb[j]);
      sum += 0.5 * static_cast<double>(c) * static_cast<double>(c - 1) * z_cache[j] / ws[j];
    }
    reps.push_back(wu * wu * sum / pairs);
  }
  return detail::median_in_place(reps);
}

// Full innate-opinion estimate: exact below the degree threshold, sampled
// above it via cfg.method.
inline double estimate_s(const Graph& g, const Oracle& z_oracle, VertexId u,
                         const SEstimatorConfig& cfg, RandomStream& rng) {
  detail::validate_s_config(cfg);
  if (g.unweighted_degree(u) < cfg.threshold) return estimate_s_exact(g, z_oracle, u);
  const double s_tilde = cfg.method == SMethod::MeanSampling
                             ? estimate_S_mean(g, z_oracle, u, cfg, rng)
                             : estimate_S_collision(g, z_oracle, u, cfg, rng);
  return (1.0 + g.weighted_degree(u)) * z_oracle(u) - s_tilde;
}

}  // namespace fjest
