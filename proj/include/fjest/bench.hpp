#pragma once

// Wall-clock benchmark helper for the walk estimator, shared by the CLI
// `bench` subcommand and the scaling tests.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fjest/graph.hpp"
#include "fjest/opinions.hpp"
#include "fjest/rw_estimator.hpp"

namespace fjest {

struct BenchResult {
  double total_seconds_mean = 0.0;
  double total_seconds_std = 0.0;
  double per_vertex_seconds = 0.0;
  std::int64_t num_targets = 0;
  std::int64_t num_walks = 0;
  std::int64_t max_steps = 0;
  int repetitions = 0;
};

inline BenchResult bench_walk_estimator(const Graph& g, const Oracle& s_oracle,
                                        const WalkConfig& cfg, std::int64_t num_targets,
                                        int repetitions, std::uint64_t target_seed) {
  RandomStream rng(target_seed);
  std::vector<VertexId> targets;
  targets.reserve(static_cast<std::size_t>(num_targets));
  for (std::int64_t i = 0; i < num_targets; ++i) targets.push_back(g.sample_vertex(rng));

  std::vector<double> seconds;
  seconds.reserve(static_cast<std::size_t>(repetitions));
  volatile double sink = 0.0;  // keep the work observable
  for (int rep = 0; rep < repetitions; ++rep) {
    WalkConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(rep);
    const auto t0 = std::chrono::steady_clock::now();
    const auto z = estimate_z_batch(g, s_oracle, targets, c);
    const auto t1 = std::chrono::steady_clock::now();
    for (double v : z) sink = sink + v;
    seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  double mean = 0.0;
  for (double s : seconds) mean += s;
  mean /= static_cast<double>(seconds.size());
  double var = 0.0;
  for (double s : seconds) var += (s - mean) * (s - mean);
  var = seconds.size() > 1 ? var / static_cast<double>(seconds.size() - 1) : 0.0;

  BenchResult r;
  r.total_seconds_mean = mean;
  r.total_seconds_std = std::sqrt(var);
  r.per_vertex_seconds = num_targets > 0 ? mean / static_cast<double>(num_targets) : 0.0;
  r.num_targets = num_targets;
  r.num_walks = cfg.num_walks;
  r.max_steps = cfg.max_steps;
  r.repetitions = repetitions;
  return r;
}

}  // namespace fjest
