#pragma once

// Deterministic local estimation of equilibrium opinions on unweighted
// d-regular graphs via non-lazy personalized-PageRank push with alpha =
// 1/(d+1), plus a dense pr' reference solver for validation. The push is
// mass-conserving: it zeroes the pushed residual and spreads the non-teleport
// share to neighbors, so ||p||_1 + ||r||_1 stays 1 from a unit start and
// p + pr'(alpha, r) = pr'(alpha, 1_u) holds at every outer-loop boundary.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"
#include "fjest/opinions.hpp"

namespace fjest {

inline constexpr std::int64_t kPprDenseLimit = 5000;

struct SparseMass {
  std::unordered_map<VertexId, double> p;
  std::unordered_map<VertexId, double> r;

  double p_l1() const {
    double s = 0.0;
    for (const auto& [v, x] : p) s += x;
    return s;
  }
  double r_l1() const {
    double s = 0.0;
    for (const auto& [v, x] : r) s += x;
    return s;
  }
  static std::vector<std::pair<VertexId, double>> sorted(
      const std::unordered_map<VertexId, double>& m) {
    std::vector<std::pair<VertexId, double>> out(m.begin(), m.end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct PprParams {
  double alpha = 0.25;      // teleportation, in (0, 1]
  double eps_push = 1e-4;   // push threshold on r(u)/d_u
  double eps_total = 1e-2;  // outer l1 target (estimate_z_regular)
};

// One push at u: p(u) += alpha*r(u); r(u) -> 0; each neighbor gains
// (1-alpha)*r(u)/d_u. Calling with r(u) == 0 is a contract violation
// (asserted in debug builds) and a no-op otherwise.
inline void push(const Graph& g, VertexId u, const PprParams& params, SparseMass& state) {
  auto it = state.r.find(u);
  if (it == state.r.end() || it->second <= 0.0) {
    assert(false && "push requires r(u) > 0");
    return;
  }
  const double ru = it->second;
  state.r.erase(it);
  state.p[u] += params.alpha * ru;
  const auto d = g.unweighted_degree(u);
  const double share = (1.0 - params.alpha) * ru / static_cast<double>(d);
  if (share > 0.0) {
    for (auto v : g.neighbors(u)) state.r[v] += share;
  }
}

namespace detail {

inline void require_unweighted(const Graph& g, const char* who) {
  if (!g.is_unweighted())
    throw ValidationError(std::string(who) + ": push semantics require unit edge weights");
}

}  // namespace detail

// Forward push from a unit of mass at v until max_u r(u)/d_u < eps_push.
// Vertices are processed in FIFO order, so runs are deterministic.
inline SparseMass approximate_ppr(const Graph& g, VertexId v, const PprParams& params) {
  if (!(params.alpha > 0.0 && params.alpha <= 1.0))
    throw ValidationError("approximate_ppr: alpha must be in (0, 1]");
  if (!(params.eps_push > 0.0))
    throw ValidationError("approximate_ppr: eps_push must be positive");
  detail::require_unweighted(g, "approximate_ppr");

  SparseMass st;
  st.r[v] = 1.0;
  std::deque<VertexId> queue{v};
  std::unordered_set<VertexId> queued{v};
  auto eligible = [&](VertexId u) {
    auto it = st.r.find(u);
    if (it == st.r.end()) return false;
    return it->second >= params.eps_push * static_cast<double>(g.unweighted_degree(u)) ||
           it->second >= 1.0;
  };
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    queued.erase(u);
    if (!eligible(u)) continue;
    push(g, u, params, st);
    for (auto nb : g.neighbors(u)) {
      if (eligible(nb) && queued.insert(nb).second) queue.push_back(nb);
    }
  }
  return st;
}

// Dense reference: pr'(alpha, s) solves (I - (1-alpha) D^{-1}A) x = alpha*s.
inline Eigen::VectorXd ppr_dense(const Graph& g, double alpha, const Eigen::VectorXd& s) {
  const auto n = g.num_vertices();
  if (n > kPprDenseLimit) throw CapacityError("ppr_dense: n exceeds the dense guard");
  if (s.size() != n) throw ValidationError("ppr_dense: length mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ValidationError("ppr_dense: alpha must be in (0, 1]");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (VertexId u = 0; u < n; ++u) {
    const double w = g.weighted_degree(u);
    if (w <= 0.0) throw ValidationError("ppr_dense: isolated vertex " + std::to_string(u));
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) m(u, nb[k]) -= (1.0 - alpha) * ws[k] / w;
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(alpha * s);
}

using PprBoundaryObserver = std::function<void(const SparseMass&)>;

struct RegularEstimate {
  double value = 0.0;
  std::int64_t support_size = 0;      // |supp(p)| at termination
  std::uint64_t oracle_queries = 0;   // equals support_size
  std::int64_t outer_iterations = 0;
};

// Estimates z*_u on an unweighted d-regular graph by repeatedly approximating
// personalized PageRank vectors until the residual mass drops below eps_total,
// then reading the oracle only on the support of p. Fully deterministic.
inline RegularEstimate estimate_z_regular_detailed(
    const Graph& g, const Oracle& s_oracle, VertexId u, double eps_total,
    const PprBoundaryObserver& on_boundary = {}) {
  if (!(eps_total > 0.0 && eps_total < 1.0))
    throw ValidationError("estimate_z_regular: eps_total must be in (0, 1)");
  if (s_oracle.size() != g.num_vertices())
    throw ValidationError("estimate_z_regular: oracle does not cover the graph");
  const auto n = g.num_vertices();
  if (n == 0) throw ValidationError("estimate_z_regular: empty graph");
  for (VertexId v = 0; v < n; ++v) {
    for (double w : g.neighbor_weights(v))
      if (w != 1.0)
        throw RegularityViolation("estimate_z_regular: non-unit edge weight at vertex " +
                                      std::to_string(v),
                                  v);
  }
  const auto d = g.unweighted_degree(0);
  for (VertexId v = 0; v < n; ++v)
    if (g.unweighted_degree(v) != d)
      throw RegularityViolation("estimate_z_regular: vertex " + std::to_string(v) +
                                    " has degree " + std::to_string(g.unweighted_degree(v)) +
                                    ", expected " + std::to_string(d),
                                v);

  const PprParams inner{1.0 / static_cast<double>(d + 1), eps_total, eps_total};
  RegularEstimate out;
  SparseMass st;
  st.r[u] = 1.0;
  if (on_boundary) on_boundary(st);
  while (st.r_l1() > eps_total) {
    const auto residual_entries = SparseMass::sorted(st.r);
    SparseMass next;
    next.p = std::move(st.p);
    for (const auto& [i, ri] : residual_entries) {
      const SparseMass local = approximate_ppr(g, i, inner);
      for (const auto& [v, x] : SparseMass::sorted(local.p)) next.p[v] += ri * x;
      for (const auto& [v, x] : SparseMass::sorted(local.r)) next.r[v] += ri * x;
    }
    st = std::move(next);
    ++out.outer_iterations;
    if (on_boundary) on_boundary(st);
  }
  double value = 0.0;
  for (const auto& [v, pv] : SparseMass::sorted(st.p)) value += pv * s_oracle(v);
  out.value = value;
  out.support_size = static_cast<std::int64_t>(st.p.size());
  out.oracle_queries = static_cast<std::uint64_t>(st.p.size());
  return out;
}

inline double estimate_z_regular(const Graph& g, const Oracle& s_oracle, VertexId u,
                                 double eps_total,
                                 const PprBoundaryObserver& on_boundary = {}) {
  return estimate_z_regular_detailed(g, s_oracle, u, eps_total, on_boundary).value;
}

}  // namespace fjest
