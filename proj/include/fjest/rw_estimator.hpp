#pragma once

// Lazy random walks with timeout against an innate-opinion oracle. One walk
// step from v: stay with probability 1/2, move to neighbor w with probability
// w_vw / (2(1+w_v)), terminate with the remaining 1/2 - w_v/(2(1+w_v)).
// Summing the visited opinions scaled by the walk matrix diagonal recovers
// the equilibrium entry z*_u = ((I+L)^{-1} s)_u in expectation.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"
#include "fjest/opinions.hpp"
#include "fjest/random.hpp"

namespace fjest {

enum class DenominatorMode {
  DiagIPlusL,      // divide visited opinions by 1 + w_v (solver-exact)
  WeightedDegree,  // divide by w_v (literal pseudocode variant)
};

struct WalkConfig {
  std::int64_t num_walks = 4000;
  std::int64_t max_steps = 600;
  std::uint64_t seed = 0;
  DenominatorMode denominator_mode = DenominatorMode::DiagIPlusL;
  bool include_step_zero = true;
  int threads = 1;  // batch fan-out only; outputs are schedule-independent
};

struct StepOutcome {
  enum class Kind { Stay, Move, Terminate };
  Kind kind = Kind::Stay;
  VertexId target = 0;  // meaningful when kind == Move
};

inline StepOutcome lazy_walk_step(const Graph& g, VertexId v, RandomStream& rng) {
  const double u01 = rng.next_double();
  if (u01 < 0.5) return {StepOutcome::Kind::Stay, v};
  if (u01 >= g.lazy_move_ceiling(v)) return {StepOutcome::Kind::Terminate, v};
  return {StepOutcome::Kind::Move, g.sample_neighbor_weighted_unchecked(v, rng)};
}

// Analytic (stay, move, terminate) probabilities for a vertex.
inline std::array<double, 3> lazy_step_distribution(const Graph& g, VertexId v) {
  const double w = g.weighted_degree(v);
  const double move = w / (2.0 * (1.0 + w));
  return {0.5, move, 0.5 - move};
}

namespace detail {

inline void validate_walk_config(const WalkConfig& cfg) {
  if (cfg.num_walks < 1) throw ValidationError("WalkConfig: num_walks must be >= 1");
  if (cfg.max_steps < 1) throw ValidationError("WalkConfig: max_steps must be >= 1");
}

// Single-target estimate with an explicit stream lane, so batch results are
// independent of scheduling: walk i of target j draws from
// derive(seed, target_index, i).
template <DenominatorMode Mode>
double estimate_z_walks(const Graph& g, const Oracle& s_oracle, VertexId u,
                        const WalkConfig& cfg, std::uint64_t target_index) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < cfg.num_walks; ++i) {
    RandomStream rng = RandomStream::derive(cfg.seed, target_index,
                                            static_cast<std::uint64_t>(i));
    VertexId v = u;
    if (cfg.include_step_zero) {
      if constexpr (Mode == DenominatorMode::DiagIPlusL)
        acc += s_oracle(v) * g.inv_one_plus_w(v);
      else
        acc += g.weighted_degree(v) > 0.0 ? s_oracle(v) / g.weighted_degree(v) : 0.0;
    }
    for (std::int64_t t = 0; t < cfg.max_steps; ++t) {
      const StepOutcome step = lazy_walk_step(g, v, rng);
      if (step.kind == StepOutcome::Kind::Terminate) break;
      v = step.target;  // Stay leaves v unchanged
      if constexpr (Mode == DenominatorMode::DiagIPlusL)
        acc += s_oracle(v) * g.inv_one_plus_w(v);
      else
        acc += g.weighted_degree(v) > 0.0 ? s_oracle(v) / g.weighted_degree(v) : 0.0;
    }
  }
  return std::clamp(acc / (2.0 * static_cast<double>(cfg.num_walks)), 0.0, 1.0);
}

inline double estimate_z_indexed(const Graph& g, const Oracle& s_oracle, VertexId u,
                                 const WalkConfig& cfg, std::uint64_t target_index) {
  validate_walk_config(cfg);
  if (s_oracle.size() != g.num_vertices())
    throw ValidationError("estimate_z: oracle does not cover the graph");
  return cfg.denominator_mode == DenominatorMode::DiagIPlusL
             ? estimate_z_walks<DenominatorMode::DiagIPlusL>(g, s_oracle, u, cfg,
                                                             target_index)
             : estimate_z_walks<DenominatorMode::WeightedDegree>(g, s_oracle, u, cfg,
                                                                 target_index);
}

}  // namespace detail

inline double estimate_z(const Graph& g, const Oracle& s_oracle, VertexId u,
                         const WalkConfig& cfg) {
  return detail::estimate_z_indexed(g, s_oracle, u, cfg, 0);
}

// Batched estimates; result k is identical to a sequential estimate seeded
// with (cfg.seed, k, walk index), whatever cfg.threads says.
inline std::vector<double> estimate_z_batch(const Graph& g, const Oracle& s_oracle,
                                            std::span<const VertexId> targets,
                                            const WalkConfig& cfg) {
  detail::validate_walk_config(cfg);
  std::vector<double> out(targets.size());
  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || targets.size() <= 1) {
    for (std::size_t k = 0; k < targets.size(); ++k)
      out[k] = detail::estimate_z_indexed(g, s_oracle, targets[k], cfg, k);
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = 16;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= targets.size()) return;
        const std::size_t end = std::min(begin + chunk, targets.size());
        for (std::size_t k = begin; k < end; ++k)
          out[k] = detail::estimate_z_indexed(g, s_oracle, targets[k], cfg, k);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

// Guideline parameter choices in terms of a condition-number upper bound;
// the shipped defaults (600 steps, 4000 walks) stand in when kappa is unknown.
inline std::int64_t recommended_max_steps(double kappa_bar, double eps, std::int64_t n,
                                          double max_weighted_degree) {
  const double arg = std::max(n * kappa_bar * std::max(max_weighted_degree, 1.0) / eps, 2.0);
  return static_cast<std::int64_t>(std::ceil(std::max(kappa_bar, 1.0) * std::log(arg)));
}

inline std::int64_t recommended_num_walks(std::int64_t max_steps, double eps) {
  const double r = static_cast<double>(std::max<std::int64_t>(max_steps, 2));
  const double l = (2.0 * r / eps) * (2.0 * r / eps) * std::log(r);
  return static_cast<std::int64_t>(std::ceil(l));
}

}  // namespace fjest
