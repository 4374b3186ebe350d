#pragma once

// Ground-truth baselines: dense equilibrium solve of (I+L) z = s, the
// PageRank-style fixed-point iteration, exact network measures, and the
// conservation-law residual.

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"
#include "fjest/opinions.hpp"

namespace fjest {

inline constexpr std::int64_t kDenseSolveLimit = 20000;

struct MeasureReport {
  double S = 0.0;          // sum of expressed opinions
  double z_bar = 0.0;      // mean expressed opinion
  double P = 0.0;          // polarization
  double D = 0.0;          // disagreement
  double I = 0.0;          // internal conflict
  double C = 0.0;          // controversy
  double DC = 0.0;         // disagreement-controversy
  double s_norm_sq = 0.0;  // squared norm of the innate opinions
};

inline Eigen::VectorXd solve_dense(const Graph& g, const OpinionVector& s) {
  const auto n = g.num_vertices();
  if (n > kDenseSolveLimit)
    throw CapacityError("solve_dense: n exceeds the dense-solve guard");
  if (s.size() != n) throw ValidationError("solve_dense: opinion length mismatch");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (VertexId u = 0; u < n; ++u) {
    m(u, u) = 1.0 + g.weighted_degree(u);
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) m(u, nb[k]) = -ws[k];
  }
  // I+L is symmetric positive definite.
  return Eigen::LLT<Eigen::MatrixXd>(m).solve(s);
}

// Applies z <- M s + (I-M) D^{-1} A z, M = (I+D)^{-1}, entrywise
// z_u <- (s_u + sum_v w_uv z_v) / (1 + w_u), starting from the constant
// mean-of-s vector. `residual_norms`, when given, receives the per-iteration
// update magnitudes ||z^(t) - z^(t-1)||_2.
inline Eigen::VectorXd solve_iterative_pr(const Graph& g, const OpinionVector& s,
                                          int iters,
                                          std::vector<double>* residual_norms = nullptr) {
  const auto n = g.num_vertices();
  if (iters < 1) throw ValidationError("solve_iterative_pr: iters must be >= 1");
  if (s.size() != n) throw ValidationError("solve_iterative_pr: opinion length mismatch");
  for (VertexId u = 0; u < n; ++u)
    if (g.unweighted_degree(u) == 0)
      throw ValidationError("solve_iterative_pr: isolated vertex " + std::to_string(u));
  Eigen::VectorXd z = Eigen::VectorXd::Constant(n, s.mean());
  Eigen::VectorXd next(n);
  if (residual_norms) residual_norms->clear();
  for (int it = 0; it < iters; ++it) {
    for (VertexId u = 0; u < n; ++u) {
      double acc = 0.0;
      const auto nb = g.neighbors(u);
      const auto ws = g.neighbor_weights(u);
      for (std::size_t k = 0; k < nb.size(); ++k) acc += ws[k] * z[nb[k]];
      next[u] = (s[u] + acc) * g.inv_one_plus_w(u);
    }
    if (residual_norms) residual_norms->push_back((next - z).norm());
    z.swap(next);
  }
  return z;
}

inline MeasureReport measures_exact(const Graph& g, const OpinionVector& s,
                                    const OpinionVector& z) {
  const auto n = g.num_vertices();
  if (s.size() != n || z.size() != n)
    throw ValidationError("measures_exact: vector length mismatch");
  MeasureReport r;
  r.S = z.sum();
  r.z_bar = r.S / static_cast<double>(n);
  r.P = (z.array() - r.z_bar).square().sum();
  r.I = (s - z).squaredNorm();
  r.C = z.squaredNorm();
  r.s_norm_sq = s.squaredNorm();
  double d = 0.0;
  for (VertexId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] < u) continue;  // each undirected edge once
      const double gap = z[u] - z[nb[k]];
      d += ws[k] * gap * gap;
    }
  }
  r.D = d;
  r.DC = r.D + r.C;
  return r;
}

// |I + 2D + C - ||s||^2| / max(||s||^2, tiny); zero at equilibrium.
inline double conservation_residual(const MeasureReport& r) {
  const double lhs = r.I + 2.0 * r.D + r.C;
  return std::abs(lhs - r.s_norm_sq) / std::max(r.s_norm_sq, 1e-30);
}

}  // namespace fjest
