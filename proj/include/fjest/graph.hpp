#pragma once

// Immutable weighted undirected graph in compressed adjacency form with the
// O(1) query primitives the estimators rely on: uniform vertex sampling,
// degree reads, and weighted/uniform neighbor sampling. Weighted sampling is
// backed by per-vertex alias tables built once at construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fjest/errors.hpp"
#include "fjest/random.hpp"

namespace fjest {

using VertexId = std::int32_t;

enum class NeighborMode { Weighted, Uniform };

struct IngestOptions {
  double default_weight = 1.0;  // weight assigned to two-column lines
};

struct WeightedEdge {
  std::int64_t u = 0;  // original (file) ids
  std::int64_t v = 0;
  double w = 1.0;
};

class Graph {
 public:
  // Builds a simple symmetric graph: self-loops dropped, duplicate edges
  // (in either orientation) keep the first weight seen, original ids are
  // remapped onto [0, n) in ascending original-id order. `extra_vertices`
  // admits isolated vertices that appear in no edge.
  static Graph from_edges(const std::vector<WeightedEdge>& edges,
                          const std::vector<std::int64_t>& extra_vertices = {}) {
    std::vector<std::int64_t> ids;
    ids.reserve(edges.size() * 2 + extra_vertices.size());
    for (const auto& e : edges) {
      ids.push_back(e.u);
      ids.push_back(e.v);
    }
    for (auto v : extra_vertices) ids.push_back(v);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) throw ValidationError("graph has no vertices");
    if (ids.size() > static_cast<std::size_t>(std::numeric_limits<VertexId>::max()))
      throw CapacityError("vertex count exceeds 32-bit index range");

    auto dense_of = [&ids](std::int64_t orig) -> VertexId {
      auto it = std::lower_bound(ids.begin(), ids.end(), orig);
      return static_cast<VertexId>(it - ids.begin());
    };

    // Keep-first dedup over unordered endpoint pairs.
    std::unordered_map<std::uint64_t, double> edge_weight;
    edge_weight.reserve(edges.size() * 2);
    for (const auto& e : edges) {
      if (e.u == e.v) continue;  // self-loop
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw ValidationError("edge weight must be positive and finite");
      const VertexId a = dense_of(e.u);
      const VertexId b = dense_of(e.v);
      const auto lo = static_cast<std::uint64_t>(std::min(a, b));
      const auto hi = static_cast<std::uint64_t>(std::max(a, b));
      edge_weight.emplace((lo << 32) | hi, e.w);
    }

    Graph g;
    g.original_ids_ = std::move(ids);
    const auto n = static_cast<VertexId>(g.original_ids_.size());
    g.n_ = n;
    g.m_ = static_cast<std::int64_t>(edge_weight.size());

    std::vector<std::int64_t> deg(n, 0);
    for (const auto& [key, w] : edge_weight) {
      ++deg[static_cast<VertexId>(key >> 32)];
      ++deg[static_cast<VertexId>(key & 0xFFFFFFFFull)];
    }
    g.offsets_.assign(n + 1, 0);
    for (VertexId u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + deg[u];
    g.neighbors_.resize(2 * g.m_);
    g.weights_.resize(2 * g.m_);
    std::vector<std::int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [key, w] : edge_weight) {
      const auto a = static_cast<VertexId>(key >> 32);
      const auto b = static_cast<VertexId>(key & 0xFFFFFFFFull);
      g.neighbors_[cursor[a]] = b;
      g.weights_[cursor[a]++] = w;
      g.neighbors_[cursor[b]] = a;
      g.weights_[cursor[b]++] = w;
    }
    // Sort each adjacency slice by neighbor id (weights carried along).
    for (VertexId u = 0; u < n; ++u) {
      const auto lo = g.offsets_[u], hi = g.offsets_[u + 1];
      std::vector<std::pair<VertexId, double>> slice;
      slice.reserve(hi - lo);
      for (auto i = lo; i < hi; ++i) slice.emplace_back(g.neighbors_[i], g.weights_[i]);
      std::sort(slice.begin(), slice.end());
      for (auto i = lo; i < hi; ++i) {
        g.neighbors_[i] = slice[i - lo].first;
        g.weights_[i] = slice[i - lo].second;
      }
    }
    g.finalize();
    return g;
  }

  VertexId num_vertices() const { return n_; }
  std::int64_t num_edges() const { return m_; }
  std::int64_t num_arcs() const { return 2 * m_; }

  std::int64_t unweighted_degree(VertexId u) const {
    return offsets_[u + 1] - offsets_[u];
  }
  double weighted_degree(VertexId u) const { return weighted_degree_[u]; }
  double mean_degree() const { return n_ ? 2.0 * static_cast<double>(m_) / n_ : 0.0; }
  bool is_unweighted() const { return unweighted_; }

  std::span<const VertexId> neighbors(VertexId u) const {
    return {neighbors_.data() + offsets_[u],
            static_cast<std::size_t>(unweighted_degree(u))};
  }
  std::span<const double> neighbor_weights(VertexId u) const {
    return {weights_.data() + offsets_[u],
            static_cast<std::size_t>(unweighted_degree(u))};
  }

  // Weight of edge (u, v); 0 if absent. O(log d_u): slices are sorted.
  double edge_weight(VertexId u, VertexId v) const {
    const auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) return 0.0;
    return weights_[offsets_[u] + (it - nb.begin())];
  }

  std::int64_t original_id(VertexId u) const { return original_ids_[u]; }
  const std::vector<std::int64_t>& original_ids() const { return original_ids_; }

  VertexId sample_vertex(RandomStream& rng) const {
    return static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n_)));
  }

  VertexId sample_neighbor(VertexId u, NeighborMode mode, RandomStream& rng) const {
    const auto d = unweighted_degree(u);
    if (d == 0) throw NoNeighborError("sample_neighbor: vertex has no neighbors");
    if (mode == NeighborMode::Uniform)
      return neighbors_[offsets_[u] + static_cast<std::int64_t>(
                                          rng.next_below(static_cast<std::uint64_t>(d)))];
    return neighbors_[offsets_[u] + sample_neighbor_arc(u, rng)];
  }

  // Weighted sample returned as a local (within-slice) arc index; O(1) via the
  // alias table. Precondition: d_u >= 1.
  std::int64_t sample_neighbor_arc(VertexId u, RandomStream& rng) const {
    const auto lo = offsets_[u];
    const auto d = offsets_[u + 1] - lo;
    const auto k = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(d)));
    return rng.next_double() < alias_prob_[lo + k] ? k : alias_idx_[lo + k];
  }

  VertexId sample_neighbor_weighted_unchecked(VertexId u, RandomStream& rng) const {
    return neighbors_[offsets_[u] + sample_neighbor_arc(u, rng)];
  }

  // Directed arc (owner, head) by global arc index; arcs come in mirrored
  // pairs so a uniform arc gives a uniform undirected edge.
  std::pair<VertexId, VertexId> arc(std::int64_t arc_index) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), arc_index);
    const auto u = static_cast<VertexId>((it - offsets_.begin()) - 1);
    return {u, neighbors_[arc_index]};
  }

  // P(stay)=1/2; continue to a neighbor while the branch variate is below
  // this ceiling, terminate at or above it.
  double lazy_move_ceiling(VertexId v) const { return lazy_move_ceiling_[v]; }
  double inv_one_plus_w(VertexId v) const { return inv_one_plus_w_[v]; }

 private:
  void finalize() {
    weighted_degree_.assign(n_, 0.0);
    for (VertexId u = 0; u < n_; ++u) {
      double s = 0.0;
      for (auto i = offsets_[u]; i < offsets_[u + 1]; ++i) s += weights_[i];
      weighted_degree_[u] = s;
    }
    unweighted_ = std::all_of(weights_.begin(), weights_.end(),
                              [](double w) { return w == 1.0; });
    inv_one_plus_w_.resize(n_);
    lazy_move_ceiling_.resize(n_);
    for (VertexId u = 0; u < n_; ++u) {
      const double w = weighted_degree_[u];
      inv_one_plus_w_[u] = 1.0 / (1.0 + w);
      lazy_move_ceiling_[u] = 0.5 + w / (2.0 * (1.0 + w));
    }
    build_alias_tables();
  }

  void build_alias_tables() {
    alias_prob_.assign(neighbors_.size(), 1.0);
    alias_idx_.assign(neighbors_.size(), 0);
    std::vector<double> scaled;
    std::vector<std::int32_t> small, large;
    for (VertexId u = 0; u < n_; ++u) {
      const auto lo = offsets_[u];
      const auto d = offsets_[u + 1] - lo;
      if (d == 0) continue;
      const double wsum = weighted_degree_[u];
      scaled.assign(static_cast<std::size_t>(d), 0.0);
      small.clear();
      large.clear();
      for (std::int64_t k = 0; k < d; ++k) {
        scaled[k] = weights_[lo + k] * d / wsum;
        (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::int32_t>(k));
      }
      while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        small.pop_back();
        const auto l = large.back();
        alias_prob_[lo + s] = scaled[s];
        alias_idx_[lo + s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
          large.pop_back();
          small.push_back(l);
        }
      }
      for (auto k : small) {
        alias_prob_[lo + k] = 1.0;
        alias_idx_[lo + k] = k;
      }
      for (auto k : large) {
        alias_prob_[lo + k] = 1.0;
        alias_idx_[lo + k] = k;
      }
    }
  }

  VertexId n_ = 0;
  std::int64_t m_ = 0;
  bool unweighted_ = true;
  std::vector<std::int64_t> offsets_;
  std::vector<VertexId> neighbors_;
  std::vector<double> weights_;
  std::vector<double> weighted_degree_;
  std::vector<double> inv_one_plus_w_;
  std::vector<double> lazy_move_ceiling_;
  std::vector<double> alias_prob_;
  std::vector<std::int32_t> alias_idx_;  // local slice indices
  std::vector<std::int64_t> original_ids_;
};

// (weighted degree, unweighted degree) with bounds checking.
inline std::pair<double, std::int64_t> degree(const Graph& g, VertexId u) {
  if (u < 0 || u >= g.num_vertices())
    throw ValidationError("degree: vertex index out of range");
  return {g.weighted_degree(u), g.unweighted_degree(u)};
}

// ---------------------------------------------------------------------------
// Ingestion: "u v" or "u v w" per line, '%' and '#' start comments.

inline Graph load_edge_list(std::istream& in, const IngestOptions& opts = {}) {
  std::vector<WeightedEdge> edges;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cut = line.find_first_of("%#");
    if (cut != std::string::npos) line.resize(cut);
    std::istringstream ls(line);
    std::int64_t u, v;
    if (!(ls >> u)) {
      // blank or comment-only line
      std::string rest;
      if (ls.clear(), std::getline(ls, rest) && rest.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError("line " + std::to_string(line_no) + ": malformed edge");
      continue;
    }
    if (!(ls >> v)) throw ParseError("line " + std::to_string(line_no) + ": malformed edge");
    double w = opts.default_weight;
    if (ls >> w) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw ValidationError("line " + std::to_string(line_no) + ": weight must be positive");
    }
    std::string trailing;
    if (ls >> trailing)
      throw ParseError("line " + std::to_string(line_no) + ": trailing tokens");
    edges.push_back({u, v, w});
  }
  if (edges.empty()) throw ValidationError("empty graph: no edges found");
  return Graph::from_edges(edges);
}

// Normalized edge list with original ids, one undirected edge per line.
inline void dump_edge_list(const Graph& g, std::ostream& out) {
  char buf[64];
  for (VertexId u = 0; u < g.num_vertices(); ++u) {
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] < u) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", ws[k]);
      out << g.original_id(u) << ' ' << g.original_id(nb[k]) << ' ' << buf << '\n';
    }
  }
}

// Sidecar map, one "dense original" pair per line.
inline void write_idmap(const Graph& g, std::ostream& out) {
  for (VertexId u = 0; u < g.num_vertices(); ++u)
    out << u << ' ' << g.original_id(u) << '\n';
}

inline Graph largest_connected_component(const Graph& g) {
  const auto n = g.num_vertices();
  std::vector<std::int32_t> comp(n, -1);
  std::int32_t num_comp = 0;
  std::vector<VertexId> stack;
  std::vector<std::int64_t> comp_size;
  for (VertexId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = num_comp;
    stack.push_back(s);
    std::int64_t size = 0;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      ++size;
      for (auto v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = num_comp;
          stack.push_back(v);
        }
      }
    }
    comp_size.push_back(size);
    ++num_comp;
  }
  // Largest component; ties resolved by the smallest minimum original id,
  // which is the component of the smallest dense id (ids are sorted).
  std::int32_t best = 0;
  std::vector<char> seen(num_comp, 0);
  for (VertexId u = 0; u < n; ++u) {
    const auto c = comp[u];
    if (!seen[c]) {
      seen[c] = 1;  // u is this component's smallest dense id
      if (comp_size[c] > comp_size[best]) best = c;
    }
  }
  std::vector<WeightedEdge> edges;
  std::vector<std::int64_t> keep;
  for (VertexId u = 0; u < n; ++u) {
    if (comp[u] != best) continue;
    keep.push_back(g.original_id(u));
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (nb[k] > u)
        edges.push_back({g.original_id(u), g.original_id(nb[k]), ws[k]});
  }
  return Graph::from_edges(edges, keep);
}

// ---------------------------------------------------------------------------
// Power-iteration bound on the condition number of
// S~ = (I+D)^{-1/2} (I+L) (I+D)^{-1/2}, from a fixed deterministic start.

namespace detail {

inline std::vector<double> normalized_system_matvec(const Graph& g,
                                                    const std::vector<double>& c,
                                                    const std::vector<double>& x) {
  const auto n = g.num_vertices();
  std::vector<double> y(n);
  for (VertexId u = 0; u < n; ++u) {
    double acc = 0.0;
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) acc += ws[k] * c[nb[k]] * x[nb[k]];
    y[u] = x[u] - c[u] * acc;
  }
  return y;
}

inline void fill_deterministic_start(std::vector<double>& x, std::uint64_t seed) {
  RandomStream rng(seed);
  for (auto& v : x) v = rng.next_double() - 0.5;
}

}  // namespace detail

inline double condition_number_upper_bound(const Graph& g, int iters) {
  if (iters <= 0) throw ValidationError("condition_number_upper_bound: iters must be >= 1");
  const auto n = g.num_vertices();
  std::vector<double> c(n);
  for (VertexId u = 0; u < n; ++u) c[u] = 1.0 / std::sqrt(1.0 + g.weighted_degree(u));

  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    s = std::sqrt(s);
    if (s > 0) {
      for (auto& v : x) v /= s;
    }
    return s;
  };

  std::vector<double> x(n);
  detail::fill_deterministic_start(x, 0x5EEDull);
  normalize(x);
  double lam_max = 1.0;
  for (int it = 0; it < iters; ++it) {
    auto y = detail::normalized_system_matvec(g, c, x);
    double rayleigh = 0.0;
    for (VertexId u = 0; u < n; ++u) rayleigh += x[u] * y[u];
    lam_max = rayleigh;
    x = std::move(y);
    normalize(x);
  }

  // Shifted iteration pulls out the smallest eigenvalue.
  std::vector<double> z(n);
  detail::fill_deterministic_start(z, 0x5EEDull + 1);
  normalize(z);
  double shifted = 0.0;
  for (int it = 0; it < iters; ++it) {
    auto y = detail::normalized_system_matvec(g, c, z);
    for (VertexId u = 0; u < n; ++u) y[u] = lam_max * z[u] - y[u];
    double rayleigh = 0.0;
    for (VertexId u = 0; u < n; ++u) rayleigh += z[u] * y[u];
    shifted = rayleigh;
    z = std::move(y);
    normalize(z);
  }
  const double lam_min = std::max(lam_max - shifted, 1e-300);
  return std::max(lam_max / lam_min, 1.0);
}

}  // namespace fjest
