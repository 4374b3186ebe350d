#pragma once

// Opinion vectors (dense, entries in [0,1]), synthetic generators, and the
// query-counted oracle that is the unit of sublinear access.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"
#include "fjest/random.hpp"

namespace fjest {

using OpinionVector = Eigen::VectorXd;

inline void validate_opinions(const OpinionVector& s, std::int64_t expected_n = -1) {
  if (expected_n >= 0 && s.size() != expected_n)
    throw ValidationError("opinion vector has length " + std::to_string(s.size()) +
                          ", expected " + std::to_string(expected_n));
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (!(s[i] >= 0.0 && s[i] <= 1.0))
      throw ValidationError("opinion out of [0,1] at index " + std::to_string(i));
}

enum class OracleKind { Innate, Expressed };

// Read-only view over a backing opinion vector. Every lookup bumps an atomic
// counter, so estimators can be audited for their query budgets even when
// they fan out across threads. The backing vector must outlive the oracle.
class Oracle {
 public:
  Oracle(OracleKind kind, const OpinionVector& values)
      : kind_(kind), values_(&values) {}

  double operator()(VertexId u) const {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return (*values_)[u];
  }

  OracleKind kind() const { return kind_; }
  std::int64_t size() const { return values_->size(); }
  std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }
  void reset_query_count() { queries_.store(0, std::memory_order_relaxed); }

 private:
  OracleKind kind_;
  const OpinionVector* values_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

inline OpinionVector gen_uniform(std::int64_t n, RandomStream& rng) {
  if (n < 1) throw ValidationError("gen_uniform: n must be >= 1");
  OpinionVector s(n);
  for (std::int64_t i = 0; i < n; ++i) s[i] = rng.next_double();
  return s;
}

// Exponential(1) draws, min-max rescaled so the extremes are exactly 0 and 1.
inline OpinionVector gen_exponential(std::int64_t n, RandomStream& rng) {
  if (n < 2) throw ValidationError("gen_exponential: n must be >= 2");
  OpinionVector s(n);
  for (std::int64_t i = 0; i < n; ++i) s[i] = -std::log1p(-rng.next_double());
  const double lo = s.minCoeff(), hi = s.maxCoeff();
  if (!(hi > lo)) throw ValidationError("gen_exponential: degenerate draw");
  return (s.array() - lo) / (hi - lo);
}

namespace detail {

// Power iteration on the Laplacian with the all-ones kernel direction
// deflated each step; returns the unit-norm, zero-mean iterate.
inline Eigen::VectorXd laplacian_power_iteration(const Graph& g, int iters,
                                                 std::uint64_t start_seed) {
  const auto n = g.num_vertices();
  Eigen::VectorXd x(n);
  RandomStream rng(start_seed);
  for (VertexId u = 0; u < n; ++u) x[u] = rng.next_double() - 0.5;
  x.array() -= x.mean();
  double norm = x.norm();
  if (norm < 1e-12) throw ValidationError("degenerate power-iteration start");
  x /= norm;
  Eigen::VectorXd y(n);
  for (int it = 0; it < iters; ++it) {
    for (VertexId u = 0; u < n; ++u) {
      double acc = 0.0;
      const auto nb = g.neighbors(u);
      const auto ws = g.neighbor_weights(u);
      for (std::size_t k = 0; k < nb.size(); ++k) acc += ws[k] * x[nb[k]];
      y[u] = g.weighted_degree(u) * x[u] - acc;
    }
    y.array() -= y.mean();
    norm = y.norm();
    if (norm < 1e-12) throw ValidationError("power iteration collapsed to the kernel");
    x = y / norm;
  }
  return x;
}

}  // namespace detail

inline Eigen::VectorXd laplacian_power_iteration(const Graph& g, int iters) {
  if (iters < 1) throw ValidationError("laplacian_power_iteration: iters must be >= 1");
  try {
    return detail::laplacian_power_iteration(g, iters, 0x5EEDull);
  } catch (const ValidationError&) {
    return detail::laplacian_power_iteration(g, iters, 0xFACEull);  // perturbed retry
  }
}

inline OpinionVector gen_eigenvector(const Graph& g, int iters) {
  Eigen::VectorXd v = laplacian_power_iteration(g, iters);
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  if (!(hi > lo)) throw ValidationError("gen_eigenvector: constant iterate");
  return (v.array() - lo) / (hi - lo);
}

// One value per line, validated into [0,1].
inline OpinionVector load_opinions(std::istream& in, std::int64_t expected_n) {
  std::vector<double> vals;
  vals.reserve(expected_n > 0 ? static_cast<std::size_t>(expected_n) : 0);
  double v;
  while (in >> v) vals.push_back(v);
  OpinionVector s = Eigen::Map<const OpinionVector>(vals.data(),
                                                    static_cast<Eigen::Index>(vals.size()));
  validate_opinions(s, expected_n);
  return s;
}

inline void save_opinions(const OpinionVector& s, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", s[i]);
    out << buf << '\n';
  }
}

}  // namespace fjest
