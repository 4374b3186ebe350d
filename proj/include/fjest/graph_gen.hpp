#pragma once

// Synthetic graph builders for the benchmark harness and tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"
#include "fjest/random.hpp"

namespace fjest {

inline Graph single_edge_graph(double w = 1.0) {
  return Graph::from_edges({{0, 1, w}});
}

inline Graph path_graph(std::int64_t n) {
  std::vector<WeightedEdge> edges;
  for (std::int64_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph::from_edges(edges);
}

inline Graph complete_graph(std::int64_t n) {
  std::vector<WeightedEdge> edges;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Graph::from_edges(edges);
}

inline Graph star_graph(std::int64_t leaves) {
  std::vector<WeightedEdge> edges;
  for (std::int64_t i = 1; i <= leaves; ++i) edges.push_back({0, i, 1.0});
  return Graph::from_edges(edges);
}

// Ring of cliques: communities of `community_size` vertices, each a clique,
// consecutive communities joined by one bridge edge. Deterministic, connected,
// unweighted, and strongly clustered, so equilibrium opinions stay spread out
// instead of collapsing to the global mean.
inline Graph community_ring_graph(std::int64_t n, std::int64_t community_size) {
  if (n < 2 || community_size < 2)
    throw ValidationError("community_ring_graph: need n >= 2 and community_size >= 2");
  std::vector<std::int64_t> starts;
  for (std::int64_t s = 0; s < n; s += community_size) starts.push_back(s);
  if (n - starts.back() < 2) starts.pop_back();  // avoid a trailing singleton
  std::vector<WeightedEdge> edges;
  for (std::size_t c = 0; c < starts.size(); ++c) {
    const std::int64_t lo = starts[c];
    const std::int64_t hi = (c + 1 < starts.size()) ? starts[c + 1] : n;
    for (std::int64_t i = lo; i < hi; ++i)
      for (std::int64_t j = i + 1; j < hi; ++j) edges.push_back({i, j, 1.0});
  }
  if (starts.size() > 1) {
    for (std::size_t c = 0; c < starts.size(); ++c)
      edges.push_back({starts[c], starts[(c + 1) % starts.size()], 1.0});
  }
  return Graph::from_edges(edges);
}

// Erdos-Renyi-style random graph by sampling edge slots; returns the largest
// connected component, so the result may have slightly fewer than n vertices.
inline Graph erdos_renyi_graph(std::int64_t n, double avg_degree, std::uint64_t seed,
                               bool weighted = false) {
  if (n < 2) throw ValidationError("erdos_renyi_graph: n must be >= 2");
  RandomStream rng(seed);
  const auto target = static_cast<std::int64_t>(n * avg_degree / 2.0);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(target) * 2);
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(target));
  std::int64_t guard = 0;
  while (static_cast<std::int64_t>(edges.size()) < target && guard < 64 * target) {
    ++guard;
    const auto u = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n)));
    const auto v = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    const auto key = (static_cast<std::uint64_t>(std::min(u, v)) << 32) |
                     static_cast<std::uint64_t>(std::max(u, v));
    if (!seen.insert(key).second) continue;
    const double w = weighted ? 1.0 - rng.next_double() : 1.0;  // (0, 1]
    edges.push_back({u, v, w});
  }
  return largest_connected_component(Graph::from_edges(edges));
}

// Random d-regular simple connected graph: pairing model with conflict
// repair by random pair swaps; deterministic given the seed. Requires n*d
// even. A swap is accepted only if both touched pairs end up conflict-free,
// which cannot introduce a conflict anywhere else.
inline Graph random_regular_graph(std::int64_t n, int d, std::uint64_t seed) {
  if (n < d + 1 || d < 1) throw ValidationError("random_regular_graph: need n > d >= 1");
  if ((n * d) % 2 != 0) throw ValidationError("random_regular_graph: n*d must be even");
  RandomStream rng(seed);
  std::vector<std::int64_t> stubs(static_cast<std::size_t>(n) * d);
  for (std::int64_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) stubs[static_cast<std::size_t>(i) * d + k] = i;
  const std::size_t pairs = stubs.size() / 2;
  auto key = [](std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
           static_cast<std::uint64_t>(std::max(a, b));
  };

  for (int attempt = 0; attempt < 100; ++attempt) {
    for (std::size_t i = stubs.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.next_below(i + 1));
      std::swap(stubs[i], stubs[j]);
    }
    std::unordered_map<std::uint64_t, int> cnt;
    cnt.reserve(pairs * 2);
    for (std::size_t i = 0; i < pairs; ++i)
      if (stubs[2 * i] != stubs[2 * i + 1]) ++cnt[key(stubs[2 * i], stubs[2 * i + 1])];
    auto bad_pair = [&](std::size_t i) {
      const auto a = stubs[2 * i], b = stubs[2 * i + 1];
      return a == b || cnt[key(a, b)] >= 2;
    };
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < pairs; ++i)
      if (bad_pair(i)) bad.push_back(i);

    std::int64_t budget = 10000 + 1000 * static_cast<std::int64_t>(bad.size());
    while (!bad.empty() && budget-- > 0) {
      const std::size_t i = bad.back();
      if (!bad_pair(i)) {
        bad.pop_back();  // fixed as a side effect of an earlier swap
        continue;
      }
      const auto j = static_cast<std::size_t>(rng.next_below(pairs));
      if (j == i) continue;
      const auto a = stubs[2 * i], b = stubs[2 * i + 1];
      const auto c = stubs[2 * j], e = stubs[2 * j + 1];
      if (a != b) --cnt[key(a, b)];
      if (c != e) --cnt[key(c, e)];
      std::swap(stubs[2 * i + 1], stubs[2 * j + 1]);
      if (a != e) ++cnt[key(a, e)];
      if (c != b) ++cnt[key(c, b)];
      if (bad_pair(i) || bad_pair(j)) {
        if (a != e) --cnt[key(a, e)];
        if (c != b) --cnt[key(c, b)];
        std::swap(stubs[2 * i + 1], stubs[2 * j + 1]);
        if (a != b) ++cnt[key(a, b)];
        if (c != e) ++cnt[key(c, e)];
        continue;
      }
      bad.pop_back();
    }
    if (!bad.empty()) continue;

    std::vector<WeightedEdge> edges;
    edges.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i)
      edges.push_back({stubs[2 * i], stubs[2 * i + 1], 1.0});
    Graph g = Graph::from_edges(edges);
    Graph cc = largest_connected_component(g);
    if (cc.num_vertices() == g.num_vertices()) return g;
  }
  throw ValidationError("random_regular_graph: generation failed to converge");
}

}  // namespace fjest
