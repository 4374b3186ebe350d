#pragma once

// Sublinear estimators for the network measures under either oracle. Scalar
// sums use uniform vertex sampling; quadratic measures plug per-vertex
// opinion estimates (random walks under the s-oracle, neighborhood estimates
// under the z-oracle) into sampled sums. Polarization uses the pair identity
// P = (1/2n) * sum_{u,v} (z_u - z_v)^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "fjest/errors.hpp"
#include "fjest/exact.hpp"
#include "fjest/graph.hpp"
#include "fjest/innate.hpp"
#include "fjest/opinions.hpp"
#include "fjest/random.hpp"
#include "fjest/rw_estimator.hpp"

namespace fjest {

inline std::int64_t default_sample_count(double eps, double delta) {
  return static_cast<std::int64_t>(std::ceil(std::log(1.0 / delta) / (eps * eps)));
}

struct MeasureEstimatorConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  std::int64_t sample_count = 0;  // 0 -> ceil(eps^-2 ln(1/delta))
  std::uint64_t seed = 0;
  WalkConfig walk_cfg{};          // inner z estimates (s-oracle path)
  SEstimatorConfig s_cfg{};       // inner s estimates (z-oracle path)
  // One sampled vertex pool reused across the quadratic measures (the
  // experiment-harness design); false draws fresh samples per measure.
  bool share_vertex_pool = true;
  // Test mode: visit every vertex once and enumerate all ordered pairs for P,
  // so exact inner values reproduce measures_exact.
  bool exhaustive = false;
  enum class DisagreementRule { PathDefault, DcMinusC, Conservation };
  DisagreementRule d_rule = DisagreementRule::PathDefault;
};

struct EstimatedMeasures {
  MeasureReport report;
  std::uint64_t oracle_queries = 0;
  std::int64_t sample_count = 0;
  std::int64_t sampler_restarts = 0;  // z-oracle path only
};

// (n/samples) * sum of `value_at` over uniform-with-replacement indices.
template <class Fn>
double estimate_sum(Fn&& value_at, std::int64_t n, std::int64_t samples,
                    RandomStream& rng) {
  if (n < 1) throw ValidationError("estimate_sum: n must be >= 1");
  if (samples < 1) throw ValidationError("estimate_sum: samples must be >= 1");
  double acc = 0.0;
  for (std::int64_t k = 0; k < samples; ++k)
    acc += value_at(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n))));
  return acc * (static_cast<double>(n) / static_cast<double>(samples));
}

struct SampledOpinion {
  VertexId vertex = 0;
  double s_hat = 0.0;
};

// Samples C uniform vertices and estimates each one's innate opinion with
// per-vertex failure budget delta/(2C). A run whose oracle consumption
// exceeds 10*T, with T = C*(mean degree + 1) expected queries, is abandoned
// and restarted from fresh randomness, at most ceil(log10(2/delta)) times.
inline std::vector<SampledOpinion> opinion_sampler(
    const Graph& g, const Oracle& z_oracle, std::int64_t C, double eps, double delta,
    RandomStream& rng, const SEstimatorConfig& base_cfg = {},
    std::int64_t* restarts_out = nullptr) {
  if (C < 1) throw ValidationError("opinion_sampler: C must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ValidationError("opinion_sampler: delta must be in (0, 1)");
  SEstimatorConfig cfg = base_cfg;
  cfg.epsilon = eps;
  cfg.delta = std::min(0.5, delta / (2.0 * static_cast<double>(C)));
  const auto budget = static_cast<std::uint64_t>(
      10.0 * std::ceil(static_cast<double>(C) * (g.mean_degree() + 1.0)));
  const int tau = std::max(1, static_cast<int>(std::ceil(std::log10(2.0 / delta))));
  std::int64_t restarts = 0;
  std::vector<SampledOpinion> out;
  for (int attempt = 0; attempt < tau; ++attempt) {
    const auto start = z_oracle.query_count();
    out.clear();
    out.reserve(static_cast<std::size_t>(C));
    bool ok = true;
    for (std::int64_t j = 0; j < C; ++j) {
      const VertexId v = g.sample_vertex(rng);
      out.push_back({v, estimate_s(g, z_oracle, v, cfg, rng)});
      if (z_oracle.query_count() - start > budget) {
        ok = false;
        ++restarts;
        break;
      }
    }
    if (ok) {
      if (restarts_out) *restarts_out = restarts;
      return out;
    }
  }
  throw BudgetExhaustedError("opinion_sampler: all " + std::to_string(tau) +
                             " attempts exceeded the 10T query budget");
}

// Per-vertex inner estimate; the call index keys the derived random stream.
using InnerOpinionEstimator = std::function<double(VertexId, std::int64_t)>;

namespace detail {

inline constexpr std::int64_t kExhaustivePairLimit = 4096;

inline std::int64_t resolve_sample_count(const MeasureEstimatorConfig& cfg) {
  const auto c =
      cfg.sample_count > 0 ? cfg.sample_count : default_sample_count(cfg.epsilon, cfg.delta);
  if (c < 1) throw ValidationError("measure estimation: sample count must be >= 1");
  return c;
}

inline std::vector<VertexId> draw_pool(const Graph& g, std::int64_t C, bool exhaustive,
                                       RandomStream& rng) {
  std::vector<VertexId> pool;
  if (exhaustive) {
    pool.resize(static_cast<std::size_t>(g.num_vertices()));
    std::iota(pool.begin(), pool.end(), 0);
  } else {
    pool.reserve(static_cast<std::size_t>(C));
    for (std::int64_t j = 0; j < C; ++j) pool.push_back(g.sample_vertex(rng));
  }
  return pool;
}

// All-ordered-pairs polarization of a full per-vertex vector: (1/2n) sum x_uv.
inline double exhaustive_pair_polarization(const std::vector<double>& z) {
  const auto n = static_cast<std::int64_t>(z.size());
  if (n > kExhaustivePairLimit)
    throw CapacityError("exhaustive polarization is limited to small test instances");
  double acc = 0.0;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = 0; b < n; ++b) {
      const double gap = z[a] - z[b];
      acc += gap * gap;
    }
  return acc / (2.0 * static_cast<double>(n));
}

inline double apply_d_rule(MeasureEstimatorConfig::DisagreementRule rule,
                           MeasureEstimatorConfig::DisagreementRule path_default,
                           const MeasureReport& r) {
  auto effective = rule == MeasureEstimatorConfig::DisagreementRule::PathDefault
                       ? path_default
                       : rule;
  if (effective == MeasureEstimatorConfig::DisagreementRule::DcMinusC)
    return r.DC - r.C;
  return 0.5 * (r.s_norm_sq - r.I - r.C);
}

}  // namespace detail

// Measures from an innate-opinion oracle. Scalar sums query s directly;
// quadratic measures use inner equilibrium estimates (random walks by
// default, injectable for test oracles).
inline EstimatedMeasures estimate_measures_given_s(const Graph& g, const Oracle& s_oracle,
                                                   const MeasureEstimatorConfig& cfg,
                                                   InnerOpinionEstimator inner_z = {}) {
  if (s_oracle.kind() != OracleKind::Innate)
    throw ValidationError("estimate_measures_given_s expects an innate-opinion oracle");
  if (s_oracle.size() != g.num_vertices())
    throw ValidationError("estimate_measures_given_s: oracle does not cover the graph");
  const auto n = static_cast<std::int64_t>(g.num_vertices());
  const auto C = detail::resolve_sample_count(cfg);
  const auto queries_start = s_oracle.query_count();

  if (!inner_z) {
    inner_z = [&g, &s_oracle, cfg](VertexId u, std::int64_t idx) {
      WalkConfig wc = cfg.walk_cfg;
      wc.seed = RandomStream::derive(cfg.seed, 0x77A1Cull).next_u64();
      return detail::estimate_z_indexed(g, s_oracle, u, wc,
                                        static_cast<std::uint64_t>(idx));
    };
  }

  MeasureReport r;
  auto s_at = [&](std::int64_t i) { return s_oracle(static_cast<VertexId>(i)); };
  auto s_sq_at = [&](std::int64_t i) {
    const double v = s_at(i);
    return v * v;
  };
  if (cfg.exhaustive) {
    double s_acc = 0.0, sq_acc = 0.0;
    for (std::int64_t v = 0; v < n; ++v) {
      const double sv = s_at(v);
      s_acc += sv;
      sq_acc += sv * sv;
    }
    r.S = s_acc;
    r.s_norm_sq = sq_acc;
  } else {
    RandomStream rng1 = RandomStream::derive(cfg.seed, 1);
    r.S = estimate_sum(s_at, n, C, rng1);
    RandomStream rng2 = RandomStream::derive(cfg.seed, 2);
    r.s_norm_sq = estimate_sum(s_sq_at, n, C, rng2);
  }

  RandomStream pool_rng = RandomStream::derive(cfg.seed, 3);
  std::int64_t next_call = 0;
  auto pooled_estimates = [&](std::vector<VertexId>& pool, std::vector<double>& z_hat,
                              std::vector<double>& s_val) {
    pool = detail::draw_pool(g, C, cfg.exhaustive, pool_rng);
    z_hat.resize(pool.size());
    s_val.resize(pool.size());
    for (std::size_t j = 0; j < pool.size(); ++j) {
      z_hat[j] = inner_z(pool[j], next_call++);
      s_val[j] = s_oracle(pool[j]);
    }
  };

  std::vector<VertexId> pool;
  std::vector<double> z_hat, s_val;
  pooled_estimates(pool, z_hat, s_val);
  const auto cp = static_cast<double>(pool.size());
  auto pool_scaled = [&](auto&& term) {
    double acc = 0.0;
    for (std::size_t j = 0; j < pool.size(); ++j) acc += term(j);
    return acc * (static_cast<double>(n) / cp);
  };
  r.C = pool_scaled([&](std::size_t j) { return z_hat[j] * z_hat[j]; });
  if (!cfg.share_vertex_pool && !cfg.exhaustive) pooled_estimates(pool, z_hat, s_val);
  r.I = pool_scaled([&](std::size_t j) {
    const double gap = s_val[j] - z_hat[j];
    return gap * gap;
  });
  if (!cfg.share_vertex_pool && !cfg.exhaustive) pooled_estimates(pool, z_hat, s_val);
  r.DC = pool_scaled([&](std::size_t j) { return s_val[j] * z_hat[j]; });

  // P through the pair identity: the sum estimator applied to the virtual
  // n^2-length vector x_{u,v} = (z_u - z_v)^2, scaled by 1/(2n). The shared
  // pool pairs up already-estimated entries instead of drawing fresh ones.
  if (cfg.exhaustive) {
    r.P = detail::exhaustive_pair_polarization(z_hat);
  } else if (cfg.share_vertex_pool) {
    RandomStream rng = RandomStream::derive(cfg.seed, 4);
    double acc = 0.0;
    for (std::int64_t k = 0; k < C; ++k) {
      const auto a = rng.next_below(pool.size());
      const auto b = rng.next_below(pool.size());
      const double gap = z_hat[a] - z_hat[b];
      acc += gap * gap;
    }
    r.P = acc * static_cast<double>(n) / (2.0 * static_cast<double>(C));
  } else {
    RandomStream rng = RandomStream::derive(cfg.seed, 4);
    const double pair_sum = estimate_sum(
        [&](std::int64_t idx) {
          const double a = inner_z(static_cast<VertexId>(idx / n), next_call++);
          const double b = inner_z(static_cast<VertexId>(idx % n), next_call++);
          const double gap = a - b;
          return gap * gap;
        },
        n * n, C, rng);
    r.P = pair_sum / (2.0 * static_cast<double>(n));
  }

  r.D = detail::apply_d_rule(cfg.d_rule, MeasureEstimatorConfig::DisagreementRule::DcMinusC, r);
  r.z_bar = r.S / static_cast<double>(n);

  EstimatedMeasures out;
  out.report = r;
  out.sample_count = C;
  out.oracle_queries = s_oracle.query_count() - queries_start;
  return out;
}

// Measures from an expressed-opinion oracle. S, z_bar, C, P come from direct
// z queries; ||s||^2, I, DC go through the opinion sampler (inner additive
// target eps/6); D defaults to the conservation law.
inline EstimatedMeasures estimate_measures_given_z(const Graph& g, const Oracle& z_oracle,
                                                   const MeasureEstimatorConfig& cfg,
                                                   InnerOpinionEstimator inner_s = {}) {
  if (z_oracle.kind() != OracleKind::Expressed)
    throw ValidationError("estimate_measures_given_z expects an expressed-opinion oracle");
  if (z_oracle.size() != g.num_vertices())
    throw ValidationError("estimate_measures_given_z: oracle does not cover the graph");
  const auto n = static_cast<std::int64_t>(g.num_vertices());
  const auto C = detail::resolve_sample_count(cfg);
  const auto queries_start = z_oracle.query_count();

  MeasureReport r;
  auto z_at = [&](std::int64_t i) { return z_oracle(static_cast<VertexId>(i)); };
  if (cfg.exhaustive) {
    double s_acc = 0.0, c_acc = 0.0;
    std::vector<double> z_all(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v) {
      z_all[v] = z_at(v);
      s_acc += z_all[v];
      c_acc += z_all[v] * z_all[v];
    }
    r.S = s_acc;
    r.C = c_acc;
    r.P = detail::exhaustive_pair_polarization(z_all);
  } else {
    RandomStream rng1 = RandomStream::derive(cfg.seed, 1);
    r.S = estimate_sum(z_at, n, C, rng1);
    RandomStream rng2 = RandomStream::derive(cfg.seed, 2);
    r.C = estimate_sum([&](std::int64_t i) {
      const double v = z_at(i);
      return v * v;
    }, n, C, rng2);
    RandomStream rng3 = RandomStream::derive(cfg.seed, 3);
    const double pair_sum = estimate_sum(
        [&](std::int64_t idx) {
          const double gap = z_at(idx / n) - z_at(idx % n);
          return gap * gap;
        },
        n * n, C, rng3);
    r.P = pair_sum / (2.0 * static_cast<double>(n));
  }

  // Sampled innate opinions for the s-dependent measures.
  std::int64_t restarts = 0;
  std::vector<SampledOpinion> sampled;
  if (inner_s) {
    RandomStream rng4 = RandomStream::derive(cfg.seed, 4);
    const auto pool = detail::draw_pool(g, C, cfg.exhaustive, rng4);
    sampled.reserve(pool.size());
    for (std::size_t j = 0; j < pool.size(); ++j)
      sampled.push_back({pool[j], inner_s(pool[j], static_cast<std::int64_t>(j))});
  } else if (cfg.exhaustive) {
    RandomStream rng4 = RandomStream::derive(cfg.seed, 4);
    SEstimatorConfig icfg = cfg.s_cfg;
    icfg.epsilon = cfg.epsilon / 6.0;
    sampled.reserve(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v)
      sampled.push_back({v, estimate_s(g, z_oracle, v, icfg, rng4)});
  } else {
    RandomStream rng4 = RandomStream::derive(cfg.seed, 4);
    sampled = opinion_sampler(g, z_oracle, C, cfg.epsilon / 6.0, cfg.delta / 2.0, rng4,
                              cfg.s_cfg, &restarts);
  }
  double sn = 0.0, i_acc = 0.0, dc_acc = 0.0;
  for (const auto& [v, s_hat] : sampled) {
    const double zv = z_oracle(v);
    sn += s_hat * s_hat;
    const double gap = s_hat - zv;
    i_acc += gap * gap;
    dc_acc += s_hat * zv;
  }
  const double scale = static_cast<double>(n) / static_cast<double>(sampled.size());
  r.s_norm_sq = sn * scale;
  r.I = i_acc * scale;
  r.DC = dc_acc * scale;

  r.D = detail::apply_d_rule(cfg.d_rule,
                             MeasureEstimatorConfig::DisagreementRule::Conservation, r);
  r.z_bar = r.S / static_cast<double>(n);

  EstimatedMeasures out;
  out.report = r;
  out.sample_count = C;
  out.sampler_restarts = restarts;
  out.oracle_queries = z_oracle.query_count() - queries_start;
  return out;
}

// Disagreement by uniform edge sampling on unweighted graphs:
// (m/samples) * sum of (z_u - z_v)^2 over sampled edges.
template <class ZFn>
double estimate_disagreement_edges(const Graph& g, ZFn&& z_at, std::int64_t num_samples,
                                   RandomStream& rng) {
  if (!g.is_unweighted())
    throw ValidationError("estimate_disagreement_edges requires an unweighted graph");
  if (num_samples < 1)
    throw ValidationError("estimate_disagreement_edges: num_samples must be >= 1");
  double acc = 0.0;
  for (std::int64_t k = 0; k < num_samples; ++k) {
    const auto [u, v] = g.arc(static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(g.num_arcs()))));
    const double gap = z_at(u) - z_at(v);
    acc += gap * gap;
  }
  return acc * static_cast<double>(g.num_edges()) / static_cast<double>(num_samples);
}

}  // namespace fjest
