// fjest: estimate Friedkin-Johnsen equilibrium opinions and network measures
// under query access, with exact baselines and a benchmark harness.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 capacity guard.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fjest/bench.hpp"
#include "fjest/errors.hpp"
#include "fjest/exact.hpp"
#include "fjest/graph.hpp"
#include "fjest/graph_gen.hpp"
#include "fjest/innate.hpp"
#include "fjest/io.hpp"
#include "fjest/measures.hpp"
#include "fjest/opinions.hpp"
#include "fjest/ppr.hpp"
#include "fjest/rw_estimator.hpp"

namespace {

using json = nlohmann::json;
using namespace fjest;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int env_threads() {
  if (const char* t = std::getenv("FJ_THREADS")) {
    const int v = std::atoi(t);
    if (v >= 1) return v;
  }
  return 1;
}

struct RunContext {
  std::vector<std::string> argv;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  json params = json::object();
  std::vector<std::string> outputs;
};

void write_manifest(const RunContext& ctx, const std::string& primary_out,
                    const Graph* g, std::uint64_t oracle_queries) {
  json m;
  m["version"] = kVersion;
  m["argv"] = ctx.argv;
  m["params"] = ctx.params;
  if (g) m["graph"] = {{"n", g->num_vertices()}, {"m", g->num_edges()}};
  m["oracle_queries"] = oracle_queries;
  m["wall_ms"] = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - ctx.start)
                     .count();
  m["outputs"] = ctx.outputs;
  std::ofstream out(primary_out + ".manifest.json");
  if (!out) throw ParseError("cannot write manifest for " + primary_out);
  out << m.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path, RunContext& ctx) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  ctx.outputs.push_back(path);
  return out;
}

Graph load_graph(const std::string& path, bool take_largest_cc) {
  Graph g = load_edge_list_file(path);
  if (take_largest_cc) g = largest_connected_component(g);
  return g;
}

// --opinions {uniform|exponential|eigenvector|file:<path>}
OpinionVector make_opinions(const Graph& g, const std::string& spec, std::uint64_t seed,
                            int eigen_iters) {
  if (spec == "uniform") {
    RandomStream rng = RandomStream::derive(seed, 0x0917u);
    return gen_uniform(g.num_vertices(), rng);
  }
  if (spec == "exponential") {
    RandomStream rng = RandomStream::derive(seed, 0x0917u);
    return gen_exponential(g.num_vertices(), rng);
  }
  if (spec == "eigenvector") return gen_eigenvector(g, eigen_iters);
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw ParseError("cannot open opinion file " + spec.substr(5));
    return load_opinions(in, g.num_vertices());
  }
  throw UsageError("unknown --opinions spec: " + spec);
}

// Equilibrium baseline: dense solve when it fits, fixed-point iteration
// otherwise (converged far below the estimators' error scales).
Eigen::VectorXd equilibrium_baseline(const Graph& g, const OpinionVector& s) {
  if (g.num_vertices() <= 4000) return solve_dense(g, s);
  return solve_iterative_pr(g, s, 200);
}

// --targets {k-random:K|all|file:<path>}
std::vector<VertexId> resolve_targets(const Graph& g, const std::string& spec,
                                      std::uint64_t seed) {
  if (spec == "all") {
    std::vector<VertexId> t(static_cast<std::size_t>(g.num_vertices()));
    std::iota(t.begin(), t.end(), 0);
    return t;
  }
  if (spec.rfind("k-random:", 0) == 0) {
    const auto k = std::atoll(spec.c_str() + 9);
    if (k < 1) throw UsageError("--targets k-random:K needs K >= 1");
    RandomStream rng = RandomStream::derive(seed, 0x7A26u);
    std::vector<VertexId> t;
    t.reserve(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) t.push_back(g.sample_vertex(rng));
    return t;
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw ParseError("cannot open target file " + spec.substr(5));
    // File lists original ids; translate through the stored map.
    const auto& ids = g.original_ids();
    std::vector<VertexId> t;
    std::int64_t orig;
    while (in >> orig) {
      auto it = std::lower_bound(ids.begin(), ids.end(), orig);
      if (it == ids.end() || *it != orig)
        throw ValidationError("target id " + std::to_string(orig) + " not in graph");
      t.push_back(static_cast<VertexId>(it - ids.begin()));
    }
    if (t.empty()) throw ValidationError("target file is empty");
    return t;
  }
  throw UsageError("unknown --targets spec: " + spec);
}

json measure_json(const MeasureReport& est, const MeasureReport* exact) {
  auto entry = [&](double e, double x) {
    json j;
    j["estimate"] = e;
    if (exact) {
      j["exact"] = x;
      j["rel_err"] = std::abs(e - x) / std::max(std::abs(x), 1e-30);
    }
    return j;
  };
  json j;
  j["S"] = entry(est.S, exact ? exact->S : 0);
  j["z_bar"] = entry(est.z_bar, exact ? exact->z_bar : 0);
  j["P"] = entry(est.P, exact ? exact->P : 0);
  j["D"] = entry(est.D, exact ? exact->D : 0);
  j["I"] = entry(est.I, exact ? exact->I : 0);
  j["C"] = entry(est.C, exact ? exact->C : 0);
  j["DC"] = entry(est.DC, exact ? exact->DC : 0);
  j["s_norm_sq"] = entry(est.s_norm_sq, exact ? exact->s_norm_sq : 0);
  return j;
}

// ---------------------------------------------------------------------------

int cmd_gen_graph(const std::string& kind, std::int64_t n, std::int64_t community_size,
                  double avg_degree, int degree, bool weighted, std::uint64_t seed,
                  const std::string& out_path, RunContext& ctx) {
  Graph g = [&] {
    if (kind == "community-ring") return community_ring_graph(n, community_size);
    if (kind == "er") return erdos_renyi_graph(n, avg_degree, seed, weighted);
    if (kind == "regular") return random_regular_graph(n, degree, seed);
    throw UsageError("unknown graph kind: " + kind);
  }();
  auto out = open_out(out_path, ctx);
  dump_edge_list(g, out);
  write_manifest(ctx, out_path, &g, 0);
  std::cerr << "wrote " << out_path << " (n=" << g.num_vertices() << ", m=" << g.num_edges()
            << ")\n";
  return 0;
}

int cmd_ingest(const std::string& graph_path, bool largest_cc, const std::string& out_path,
               std::string idmap_path, RunContext& ctx) {
  Graph g = load_graph(graph_path, largest_cc);
  auto out = open_out(out_path, ctx);
  dump_edge_list(g, out);
  if (idmap_path.empty()) idmap_path = out_path + ".idmap";
  auto im = open_out(idmap_path, ctx);
  write_idmap(g, im);
  write_manifest(ctx, out_path, &g, 0);
  std::cerr << "ingested n=" << g.num_vertices() << " m=" << g.num_edges() << "\n";
  return 0;
}

int cmd_gen_opinions(const std::string& graph_path, bool largest_cc, const std::string& spec,
                     std::uint64_t seed, int eigen_iters, const std::string& out_path,
                     RunContext& ctx) {
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, eigen_iters);
  auto out = open_out(out_path, ctx);
  save_opinions(s, out);
  write_manifest(ctx, out_path, &g, 0);
  return 0;
}

int cmd_exact(const std::string& graph_path, bool largest_cc, const std::string& spec,
              std::uint64_t seed, int eigen_iters, const std::string& solver, int iters,
              const std::string& out_path, const std::string& z_out, RunContext& ctx) {
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, eigen_iters);
  Eigen::VectorXd z;
  if (solver == "dense")
    z = solve_dense(g, s);
  else if (solver == "iterative")
    z = solve_iterative_pr(g, s, iters);
  else
    throw UsageError("unknown --solver: " + solver);
  const MeasureReport rep = measures_exact(g, s, z);
  json j = measure_json(rep, nullptr);
  j["conservation_residual"] = conservation_residual(rep);
  j["n"] = g.num_vertices();
  j["m"] = g.num_edges();
  auto out = open_out(out_path, ctx);
  out << j.dump(2) << "\n";
  if (!z_out.empty()) {
    auto zo = open_out(z_out, ctx);
    zo << "dense_id,original_id,z\n";
    for (VertexId u = 0; u < g.num_vertices(); ++u)
      zo << u << ',' << g.original_id(u) << ',' << fmt(z[u]) << '\n';
  }
  write_manifest(ctx, out_path, &g, 0);
  return 0;
}

int cmd_estimate_z(const std::string& graph_path, bool largest_cc, const std::string& spec,
                   std::uint64_t seed, const std::string& oracle_kind,
                   const std::string& method, std::int64_t walks, std::int64_t steps,
                   double epsilon, const std::string& targets_spec, int threads,
                   bool with_exact, const std::string& out_path, RunContext& ctx) {
  if (oracle_kind != "s")
    throw UsageError("estimate-z consumes the innate-opinion oracle; use --oracle s");
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, 100);
  Oracle s_oracle(OracleKind::Innate, s);
  const auto targets = resolve_targets(g, targets_spec, seed);
  std::optional<Eigen::VectorXd> z_exact;
  if (with_exact) z_exact = equilibrium_baseline(g, s);

  auto out = open_out(out_path, ctx);
  if (method == "walk") {
    WalkConfig cfg;
    cfg.num_walks = walks;
    cfg.max_steps = steps;
    cfg.seed = seed;
    cfg.threads = threads;
    const auto z_hat = estimate_z_batch(g, s_oracle, targets, cfg);
    out << (with_exact ? "original_id,z_hat,z_exact,abs_err\n" : "original_id,z_hat\n");
    for (std::size_t k = 0; k < targets.size(); ++k) {
      out << g.original_id(targets[k]) << ',' << fmt(z_hat[k]);
      if (with_exact) {
        const double zx = (*z_exact)[targets[k]];
        out << ',' << fmt(zx) << ',' << fmt(std::abs(z_hat[k] - zx));
      }
      out << '\n';
    }
  } else if (method == "ppr") {
    out << (with_exact ? "original_id,z_hat,z_exact,abs_err,queries,support_size\n"
                       : "original_id,z_hat,queries,support_size\n");
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const auto est = estimate_z_regular_detailed(g, s_oracle, targets[k], epsilon);
      out << g.original_id(targets[k]) << ',' << fmt(est.value);
      if (with_exact) {
        const double zx = (*z_exact)[targets[k]];
        out << ',' << fmt(zx) << ',' << fmt(std::abs(est.value - zx));
      }
      out << ',' << est.oracle_queries << ',' << est.support_size << '\n';
    }
  } else {
    throw UsageError("unknown --method: " + method);
  }
  write_manifest(ctx, out_path, &g, s_oracle.query_count());
  return 0;
}

int cmd_estimate_s(const std::string& graph_path, bool largest_cc, const std::string& spec,
                   std::uint64_t seed, const std::string& oracle_kind, std::int64_t threshold,
                   int reps, const std::string& method, double epsilon, double delta,
                   const std::string& targets_spec, bool with_exact,
                   const std::string& out_path, RunContext& ctx) {
  if (oracle_kind != "z")
    throw UsageError("estimate-s consumes the expressed-opinion oracle; use --oracle z");
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, 100);
  const Eigen::VectorXd z = equilibrium_baseline(g, s);
  Oracle z_oracle(OracleKind::Expressed, z);
  const auto targets = resolve_targets(g, targets_spec, seed);

  SEstimatorConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.threshold = threshold;
  cfg.repetitions = reps;
  cfg.method = method == "collision" ? SMethod::Collision : SMethod::MeanSampling;
  if (method != "mean" && method != "collision")
    throw UsageError("unknown --method: " + method);

  auto out = open_out(out_path, ctx);
  out << (with_exact ? "original_id,s_hat,s_exact,abs_err\n" : "original_id,s_hat\n");
  RandomStream rng = RandomStream::derive(seed, 0x57A7u);
  for (const auto u : targets) {
    const double s_hat = estimate_s(g, z_oracle, u, cfg, rng);
    out << g.original_id(u) << ',' << fmt(s_hat);
    if (with_exact) out << ',' << fmt(s[u]) << ',' << fmt(std::abs(s_hat - s[u]));
    out << '\n';
  }
  write_manifest(ctx, out_path, &g, z_oracle.query_count());
  return 0;
}

int cmd_measures(const std::string& graph_path, bool largest_cc, const std::string& spec,
                 std::uint64_t seed, const std::string& oracle_kind, double epsilon,
                 double delta, std::int64_t samples, std::int64_t edge_samples,
                 std::int64_t walks, std::int64_t steps, std::int64_t threshold, int reps,
                 const std::string& d_rule, int repetitions, bool fresh_pools,
                 bool with_exact, const std::string& out_path, RunContext& ctx) {
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, 100);
  const Eigen::VectorXd z = equilibrium_baseline(g, s);
  Oracle s_oracle(OracleKind::Innate, s);
  Oracle z_oracle(OracleKind::Expressed, z);
  std::optional<MeasureReport> exact;
  if (with_exact) exact = measures_exact(g, s, z);

  MeasureEstimatorConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.sample_count = samples;
  cfg.walk_cfg.num_walks = walks;
  cfg.walk_cfg.max_steps = steps;
  cfg.s_cfg.threshold = threshold;
  cfg.s_cfg.repetitions = reps;
  cfg.share_vertex_pool = !fresh_pools;
  if (d_rule == "dc-minus-c")
    cfg.d_rule = MeasureEstimatorConfig::DisagreementRule::DcMinusC;
  else if (d_rule == "conservation")
    cfg.d_rule = MeasureEstimatorConfig::DisagreementRule::Conservation;
  else if (d_rule != "default")
    throw UsageError("unknown --d-rule: " + d_rule);

  auto run_once = [&](std::uint64_t run_seed) {
    cfg.seed = run_seed;
    cfg.walk_cfg.seed = run_seed;
    return oracle_kind == "s" ? estimate_measures_given_s(g, s_oracle, cfg)
                              : estimate_measures_given_z(g, z_oracle, cfg);
  };
  if (oracle_kind != "s" && oracle_kind != "z")
    throw UsageError("--oracle must be s or z");

  std::vector<EstimatedMeasures> runs;
  for (int rep = 0; rep < std::max(1, repetitions); ++rep)
    runs.push_back(run_once(seed + static_cast<std::uint64_t>(rep)));

  auto emit = [&](const EstimatedMeasures& est, std::uint64_t run_seed,
                  const std::string& path) {
    json j = measure_json(est.report, exact ? &*exact : nullptr);
    j["oracle_queries"] = est.oracle_queries;
    j["sample_count"] = est.sample_count;
    j["sampler_restarts"] = est.sampler_restarts;
    if (edge_samples > 0) {
      RandomStream erng = RandomStream::derive(run_seed, 0xED6Eu);
      const double d_est = estimate_disagreement_edges(
          g, [&](VertexId u) { return z_oracle(u); }, edge_samples, erng);
      json e;
      e["estimate"] = d_est;
      if (exact) {
        e["exact"] = exact->D;
        e["rel_err"] = std::abs(d_est - exact->D) / std::max(exact->D, 1e-30);
      }
      j["D_edge_sampling"] = e;
    }
    auto out = open_out(path, ctx);
    out << j.dump(2) << "\n";
  };

  if (runs.size() == 1) {
    emit(runs[0], seed, out_path);
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i)
      emit(runs[i], seed + static_cast<std::uint64_t>(i),
           out_path + "." + std::to_string(i + 1));
    // Aggregate with mean and standard deviation per measure.
    auto stats = [&](auto&& get) {
      double mean = 0.0;
      for (const auto& r : runs) mean += get(r.report);
      mean /= static_cast<double>(runs.size());
      double var = 0.0;
      for (const auto& r : runs) var += (get(r.report) - mean) * (get(r.report) - mean);
      var = runs.size() > 1 ? var / static_cast<double>(runs.size() - 1) : 0.0;
      return json{{"mean", mean}, {"std", std::sqrt(var)}};
    };
    json agg;
    agg["runs"] = runs.size();
    agg["S"] = stats([](const MeasureReport& r) { return r.S; });
    agg["z_bar"] = stats([](const MeasureReport& r) { return r.z_bar; });
    agg["P"] = stats([](const MeasureReport& r) { return r.P; });
    agg["D"] = stats([](const MeasureReport& r) { return r.D; });
    agg["I"] = stats([](const MeasureReport& r) { return r.I; });
    agg["C"] = stats([](const MeasureReport& r) { return r.C; });
    agg["DC"] = stats([](const MeasureReport& r) { return r.DC; });
    agg["s_norm_sq"] = stats([](const MeasureReport& r) { return r.s_norm_sq; });
    if (exact) agg["exact"] = measure_json(*exact, nullptr);
    auto out = open_out(out_path, ctx);
    out << agg.dump(2) << "\n";
  }
  write_manifest(ctx, out_path, &g,
                 s_oracle.query_count() + z_oracle.query_count());
  return 0;
}

int cmd_bench(const std::string& graph_path, bool largest_cc, const std::string& spec,
              std::uint64_t seed, std::int64_t walks, std::int64_t steps,
              std::int64_t num_targets, int repetitions, int threads,
              const std::string& out_path, RunContext& ctx) {
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, 100);
  Oracle s_oracle(OracleKind::Innate, s);
  WalkConfig cfg;
  cfg.num_walks = walks;
  cfg.max_steps = steps;
  cfg.seed = seed;
  cfg.threads = threads;
  const auto r = bench_walk_estimator(g, s_oracle, cfg, num_targets, repetitions, seed);
  auto out = open_out(out_path, ctx);
  out << "targets,walks,steps,repetitions,total_seconds_mean,total_seconds_std,"
         "per_vertex_seconds\n";
  out << r.num_targets << ',' << r.num_walks << ',' << r.max_steps << ',' << r.repetitions
      << ',' << fmt(r.total_seconds_mean) << ',' << fmt(r.total_seconds_std) << ','
      << fmt(r.per_vertex_seconds) << '\n';
  write_manifest(ctx, out_path, &g, s_oracle.query_count());
  return 0;
}

int cmd_buckets(const std::string& graph_path, bool largest_cc, const std::string& spec,
                std::uint64_t seed, int num_buckets, std::int64_t per_bucket,
                std::int64_t walks, std::int64_t steps, int repetitions, int threads,
                const std::string& out_path, RunContext& ctx) {
  if (num_buckets < 1) throw UsageError("--buckets must be >= 1");
  Graph g = load_graph(graph_path, largest_cc);
  OpinionVector s = make_opinions(g, spec, seed, 100);
  Oracle s_oracle(OracleKind::Innate, s);
  const Eigen::VectorXd z = equilibrium_baseline(g, s);

  // Degree-sorted vertices, split into equal buckets (low degrees first).
  std::vector<VertexId> order(static_cast<std::size_t>(g.num_vertices()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return g.unweighted_degree(a) < g.unweighted_degree(b);
  });

  const auto n = static_cast<std::int64_t>(order.size());
  std::vector<std::vector<double>> bucket_errs(num_buckets);
  for (int b = 0; b < num_buckets; ++b) {
    const auto lo = n * b / num_buckets;
    const auto hi = n * (b + 1) / num_buckets;
    if (lo >= hi) continue;
    RandomStream rng = RandomStream::derive(seed, 0xB0C3u, static_cast<std::uint64_t>(b));
    std::vector<VertexId> targets;
    for (std::int64_t k = 0; k < per_bucket; ++k)
      targets.push_back(order[static_cast<std::size_t>(
          lo + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(hi - lo))))]);
    for (int rep = 0; rep < repetitions; ++rep) {
      WalkConfig cfg;
      cfg.num_walks = walks;
      cfg.max_steps = steps;
      cfg.seed = seed + static_cast<std::uint64_t>(rep);
      cfg.threads = threads;
      const auto z_hat = estimate_z_batch(g, s_oracle, targets, cfg);
      double err = 0.0;
      for (std::size_t k = 0; k < targets.size(); ++k)
        err += std::abs(z_hat[k] - z[targets[k]]);
      bucket_errs[b].push_back(err / static_cast<double>(targets.size()));
    }
  }

  std::vector<double> mean_err(num_buckets, 0.0), std_err(num_buckets, 0.0);
  for (int b = 0; b < num_buckets; ++b) {
    const auto& e = bucket_errs[b];
    if (e.empty()) continue;
    for (double v : e) mean_err[b] += v;
    mean_err[b] /= static_cast<double>(e.size());
    double var = 0.0;
    for (double v : e) var += (v - mean_err[b]) * (v - mean_err[b]);
    std_err[b] = e.size() > 1 ? std::sqrt(var / static_cast<double>(e.size() - 1)) : 0.0;
  }
  // Normalize by the all-bucket averages.
  const double gmean =
      std::accumulate(mean_err.begin(), mean_err.end(), 0.0) / num_buckets;
  const double gstd = std::accumulate(std_err.begin(), std_err.end(), 0.0) / num_buckets;
  auto out = open_out(out_path, ctx);
  out << "bucket,mean_norm_err,norm_stddev\n";
  for (int b = 0; b < num_buckets; ++b)
    out << b << ',' << fmt(gmean > 0 ? mean_err[b] / gmean : 0.0) << ','
        << fmt(gstd > 0 ? std_err[b] / gstd : 0.0) << '\n';
  write_manifest(ctx, out_path, &g, s_oracle.query_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sublinear estimation of Friedkin-Johnsen opinions and network measures"};
  app.require_subcommand(1);

  RunContext ctx;
  for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

  // Shared options (bound per subcommand).
  std::string graph_path, opinions = "uniform", out_path, idmap_path, targets = "k-random:100";
  std::string oracle_kind = "s", method = "walk", solver = "dense", kind = "er";
  std::string d_rule = "default";
  bool largest_cc = false, with_exact = false, weighted = false, fresh_pools = false;
  std::uint64_t seed = 0;
  std::int64_t n = 1000, community_size = 9, walks = 4000, steps = 600, samples = 0,
               edge_samples = 0, threshold = 400, per_bucket = 500, num_targets = 100;
  double avg_degree = 8.0, epsilon = 0.1, delta = 0.1;
  int degree = 3, eigen_iters = 100, iters = 50, reps = 5, repetitions = 1, buckets = 20,
      threads = env_threads();
  std::string z_out;

  auto add_graph_opts = [&](CLI::App* c, bool required = true) {
    auto* o = c->add_option("--graph", graph_path, "edge-list file (.gz supported)");
    if (required) o->required();
    c->add_flag("--largest-cc", largest_cc, "restrict to the largest connected component");
  };
  auto add_opinion_opts = [&](CLI::App* c) {
    c->add_option("--opinions", opinions,
                  "uniform|exponential|eigenvector|file:<path> (default uniform)");
    c->add_option("--seed", seed, "random seed");
  };

  auto* gg = app.add_subcommand("gen-graph", "write a synthetic edge list");
  gg->add_option("--kind", kind, "community-ring|er|regular")->required();
  gg->add_option("--n", n, "vertex count")->required();
  gg->add_option("--community-size", community_size, "community size (community-ring)");
  gg->add_option("--avg-degree", avg_degree, "average degree (er)");
  gg->add_option("--degree", degree, "degree (regular)");
  gg->add_flag("--weighted", weighted, "random weights in (0,1] (er)");
  gg->add_option("--seed", seed, "random seed");
  gg->add_option("--out", out_path, "output edge list")->required();

  auto* ing = app.add_subcommand("ingest", "normalize an edge list and write the id map");
  add_graph_opts(ing);
  ing->add_option("--out", out_path, "normalized edge list")->required();
  ing->add_option("--idmap", idmap_path, "idmap sidecar (default <out>.idmap)");

  auto* go = app.add_subcommand("gen-opinions", "generate an opinion file");
  add_graph_opts(go);
  add_opinion_opts(go);
  go->add_option("--eigen-iters", eigen_iters, "power-iteration steps (eigenvector)");
  go->add_option("--out", out_path, "opinion file, one value per line")->required();

  auto* ex = app.add_subcommand("exact", "exact equilibrium and measures");
  add_graph_opts(ex);
  add_opinion_opts(ex);
  ex->add_option("--solver", solver, "dense|iterative");
  ex->add_option("--iters", iters, "iterations (iterative solver)");
  ex->add_option("--out", out_path, "measure report (JSON)")->required();
  ex->add_option("--z-out", z_out, "per-vertex equilibrium CSV");

  auto* ez = app.add_subcommand("estimate-z", "estimate expressed opinions from an s-oracle");
  add_graph_opts(ez);
  add_opinion_opts(ez);
  ez->add_option("--oracle", oracle_kind, "must be s");
  ez->add_option("--method", method, "walk|ppr");
  ez->add_option("--walks", walks, "random walks per estimate");
  ez->add_option("--steps", steps, "walk timeout");
  ez->add_option("--epsilon", epsilon, "target error (ppr)");
  ez->add_option("--targets", targets, "k-random:K|all|file:<path>");
  ez->add_option("--threads", threads, "worker cap (FJ_THREADS fallback)");
  ez->add_flag("--with-exact", with_exact, "add baseline columns");
  ez->add_option("--out", out_path, "CSV output")->required();

  auto* es = app.add_subcommand("estimate-s", "estimate innate opinions from a z-oracle");
  add_graph_opts(es);
  add_opinion_opts(es);
  es->add_option("--oracle", oracle_kind, "must be z")->default_val("z");
  es->add_option("--threshold", threshold, "degree cutoff for the exact path");
  es->add_option("--reps", reps, "median repetitions (odd)");
  es->add_option("--method", method, "mean|collision")->default_val("mean");
  es->add_option("--epsilon", epsilon, "error target");
  es->add_option("--delta", delta, "failure probability");
  es->add_option("--targets", targets, "k-random:K|all|file:<path>");
  es->add_flag("--with-exact", with_exact, "add baseline columns");
  es->add_option("--out", out_path, "CSV output")->required();

  auto* me = app.add_subcommand("measures", "estimate all measures under an oracle");
  add_graph_opts(me);
  add_opinion_opts(me);
  me->add_option("--oracle", oracle_kind, "s|z")->required();
  me->add_option("--epsilon", epsilon, "error budget");
  me->add_option("--delta", delta, "failure probability");
  me->add_option("--samples", samples, "sampled vertices C (0: from epsilon/delta)");
  me->add_option("--edge-sampling", edge_samples, "extra disagreement estimate from N edges");
  me->add_option("--walks", walks, "inner walk count (s-oracle)");
  me->add_option("--steps", steps, "inner walk timeout (s-oracle)");
  me->add_option("--threshold", threshold, "inner exact-path cutoff (z-oracle)");
  me->add_option("--reps", reps, "inner repetitions (z-oracle)");
  me->add_option("--d-rule", d_rule, "default|dc-minus-c|conservation");
  me->add_option("--repetitions", repetitions, "independent runs; writes an aggregate");
  me->add_flag("--fresh-pools", fresh_pools, "fresh samples per measure");
  me->add_flag("--with-exact", with_exact, "include exact baselines and rel errors");
  me->add_option("--out", out_path, "JSON report")->required();

  auto* be = app.add_subcommand("bench", "time the walk estimator");
  add_graph_opts(be);
  add_opinion_opts(be);
  be->add_option("--walks", walks, "random walks per estimate");
  be->add_option("--steps", steps, "walk timeout");
  be->add_option("--targets", num_targets, "number of random targets");
  be->add_option("--repetitions", repetitions, "timing repetitions");
  be->add_option("--threads", threads, "worker cap");
  be->add_option("--out", out_path, "CSV output")->required();

  auto* bu = app.add_subcommand("buckets", "per-degree-bucket error profile");
  add_graph_opts(bu);
  add_opinion_opts(bu);
  bu->add_option("--buckets", buckets, "number of degree buckets");
  bu->add_option("--per-bucket", per_bucket, "sampled vertices per bucket");
  bu->add_option("--walks", walks, "random walks per estimate");
  bu->add_option("--steps", steps, "walk timeout");
  bu->add_option("--repetitions", repetitions, "independent runs");
  bu->add_option("--threads", threads, "worker cap");
  bu->add_option("--out", out_path, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json p;
    p["seed"] = seed;
    p["opinions"] = opinions;
    ctx.params = p;
    if (gg->parsed())
      return cmd_gen_graph(kind, n, community_size, avg_degree, degree, weighted, seed,
                           out_path, ctx);
    if (ing->parsed()) return cmd_ingest(graph_path, largest_cc, out_path, idmap_path, ctx);
    if (go->parsed())
      return cmd_gen_opinions(graph_path, largest_cc, opinions, seed, eigen_iters, out_path,
                              ctx);
    if (ex->parsed())
      return cmd_exact(graph_path, largest_cc, opinions, seed, eigen_iters, solver, iters,
                       out_path, z_out, ctx);
    if (ez->parsed())
      return cmd_estimate_z(graph_path, largest_cc, opinions, seed, oracle_kind, method,
                            walks, steps, epsilon, targets, threads, with_exact, out_path,
                            ctx);
    if (es->parsed())
      return cmd_estimate_s(graph_path, largest_cc, opinions, seed, oracle_kind, threshold,
                            reps, method, epsilon, delta, targets, with_exact, out_path, ctx);
    if (me->parsed())
      return cmd_measures(graph_path, largest_cc, opinions, seed, oracle_kind, epsilon, delta,
                          samples, edge_samples, walks, steps, threshold, reps, d_rule,
                          repetitions, fresh_pools, with_exact, out_path, ctx);
    if (be->parsed())
      return cmd_bench(graph_path, largest_cc, opinions, seed, walks, steps, num_targets,
                       repetitions, threads, out_path, ctx);
    if (bu->parsed())
      return cmd_buckets(graph_path, largest_cc, opinions, seed, buckets, per_bucket, walks,
                         steps, repetitions, threads, out_path, ctx);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
