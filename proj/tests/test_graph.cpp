#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fjest/graph.hpp"
#include "fjest/graph_gen.hpp"
#include "fjest/io.hpp"

using namespace fjest;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

// Brute-force connected components over original ids, for cross-checking.
std::vector<std::set<std::int64_t>> brute_components(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
  std::map<std::int64_t, std::int64_t> parent;
  std::function<std::int64_t(std::int64_t)> find = [&](std::int64_t x) {
    if (!parent.count(x)) parent[x] = x;
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (auto [u, v] : edges) parent[find(u)] = find(v);
  std::map<std::int64_t, std::set<std::int64_t>> comps;
  for (auto& [v, p] : parent) comps[find(v)].insert(v);
  std::vector<std::set<std::int64_t>> out;
  for (auto& [root, members] : comps) out.push_back(members);
  return out;
}

}  // namespace

TEST_CASE("unit-weight parse") {
  Graph g = parse("0 1\n1 2\n");
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  for (VertexId u = 0; u < 3; ++u)
    for (double w : g.neighbor_weights(u)) CHECK(w == 1.0);
}

TEST_CASE("reverse duplicate merged, keep-first weight") {
  Graph g = parse("0 1\n1 0\n");
  CHECK(g.num_vertices() == 2);
  CHECK(g.num_edges() == 1);

  Graph h = parse("0 1 0.25\n1 0 0.5\n0 1 0.75\n");
  CHECK(h.num_edges() == 1);
  CHECK(h.edge_weight(0, 1) == 0.25);
}

TEST_CASE("self-loops dropped, comments skipped") {
  Graph g = parse("% header\n0 0\n0 1\n# trailing comment\n1 2 2.5 % inline\n\n");
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.edge_weight(1, 2) == 2.5);
}

TEST_CASE("parse errors carry line numbers") {
  std::istringstream bad("0 1\nx y\n");
  CHECK_THROWS_WITH_AS(load_edge_list(bad), doctest::Contains("line 2"), ParseError);
  std::istringstream lone("0 1\n5\n");
  CHECK_THROWS_AS(load_edge_list(lone), ParseError);
  std::istringstream nonpos("0 1 -2\n");
  CHECK_THROWS_AS(load_edge_list(nonpos), ValidationError);
  std::istringstream zero("0 1 0\n");
  CHECK_THROWS_AS(load_edge_list(zero), ValidationError);
  std::istringstream empty("% nothing here\n");
  CHECK_THROWS_AS(load_edge_list(empty), ValidationError);
}

TEST_CASE("largest connected component") {
  SUBCASE("already connected is re-indexed identically") {
    Graph g = parse("0 1\n1 2\n");
    Graph cc = largest_connected_component(g);
    CHECK(cc.num_vertices() == 3);
    CHECK(cc.num_edges() == 2);
    for (VertexId u = 0; u < 3; ++u) CHECK(cc.original_id(u) == g.original_id(u));
  }
  SUBCASE("picks the larger component (brute-force cross-check)") {
    Graph g = parse("0 1\n2 3\n3 4\n");
    Graph cc = largest_connected_component(g);
    CHECK(cc.num_vertices() == 3);
    CHECK(cc.num_edges() == 2);
    std::set<std::int64_t> got(cc.original_ids().begin(), cc.original_ids().end());
    auto comps = brute_components({{0, 1}, {2, 3}, {3, 4}});
    std::set<std::int64_t> expect;
    for (auto& c : comps)
      if (c.size() > expect.size()) expect = c;
    CHECK(got == expect);
  }
  SUBCASE("equal sizes: keep the component with the smallest original id") {
    Graph g = parse("0 1\n2 3\n");
    Graph cc = largest_connected_component(g);
    std::set<std::int64_t> got(cc.original_ids().begin(), cc.original_ids().end());
    CHECK(got == std::set<std::int64_t>{0, 1});
  }
}

TEST_CASE("degree queries") {
  Graph p3 = path_graph(3);
  CHECK(degree(p3, 1) == std::pair<double, std::int64_t>{2.0, 2});
  Graph e = single_edge_graph(0.5);
  CHECK(degree(e, 0) == std::pair<double, std::int64_t>{0.5, 1});
  Graph iso = Graph::from_edges({{0, 1, 1.0}}, {7});  // vertex 7 isolated
  CHECK(degree(iso, 2) == std::pair<double, std::int64_t>{0.0, 0});
  CHECK_THROWS_AS(degree(p3, 3), ValidationError);
  CHECK_THROWS_AS(degree(p3, -1), ValidationError);
}

TEST_CASE("weighted degree sums match twice the edge weights") {
  Graph g = erdos_renyi_graph(400, 6.0, 11, /*weighted=*/true);
  double deg_sum = 0.0, edge_sum = 0.0;
  for (VertexId u = 0; u < g.num_vertices(); ++u) {
    deg_sum += g.weighted_degree(u);
    const auto nb = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (nb[k] > u) edge_sum += ws[k];
  }
  CHECK(std::abs(deg_sum - 2.0 * edge_sum) <= 1e-12 * std::abs(deg_sum));
}

TEST_CASE("sample_vertex") {
  SUBCASE("single vertex") {
    Graph g = Graph::from_edges({}, {0});
    RandomStream rng(5);
    for (int i = 0; i < 50; ++i) CHECK(g.sample_vertex(rng) == 0);
  }
  SUBCASE("uniform over four vertices, 3 sigma") {
    Graph g = parse("0 1\n1 2\n2 3\n");
    RandomStream rng(6);
    const int N = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < N; ++i) ++counts[g.sample_vertex(rng)];
    const double sigma = std::sqrt(N * 0.25 * 0.75);
    for (auto c : counts) CHECK(std::abs(c - N * 0.25) < 3.0 * sigma);
  }
  SUBCASE("fixed seed gives an identical sequence") {
    Graph g = parse("0 1\n1 2\n");
    RandomStream a(9), b(9);
    for (int i = 0; i < 100; ++i) CHECK(g.sample_vertex(a) == g.sample_vertex(b));
  }
}

TEST_CASE("sample_neighbor") {
  SUBCASE("single neighbor always returned") {
    Graph g = single_edge_graph();
    RandomStream rng(1);
    for (int i = 0; i < 50; ++i) {
      CHECK(g.sample_neighbor(0, NeighborMode::Weighted, rng) == 1);
      CHECK(g.sample_neighbor(0, NeighborMode::Uniform, rng) == 1);
    }
  }
  SUBCASE("weights (1,3) give 0.25/0.75 within 3 sigma") {
    Graph g = Graph::from_edges({{0, 1, 1.0}, {0, 2, 3.0}});
    RandomStream rng(2);
    const int N = 100000;
    int hit1 = 0;
    for (int i = 0; i < N; ++i)
      if (g.sample_neighbor(0, NeighborMode::Weighted, rng) == 1) ++hit1;
    const double sigma = std::sqrt(N * 0.25 * 0.75);
    CHECK(std::abs(hit1 - 0.25 * N) < 3.0 * sigma);
  }
  SUBCASE("uniform over degree 4 within 3 sigma") {
    Graph g = Graph::from_edges({{0, 1, 9.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
    RandomStream rng(3);
    const int N = 100000;
    std::vector<int> counts(5, 0);
    for (int i = 0; i < N; ++i) ++counts[g.sample_neighbor(0, NeighborMode::Uniform, rng)];
    const double sigma = std::sqrt(N * 0.25 * 0.75);
    for (int v = 1; v <= 4; ++v) CHECK(std::abs(counts[v] - 0.25 * N) < 3.0 * sigma);
  }
  SUBCASE("no neighbors") {
    Graph g = Graph::from_edges({{0, 1, 1.0}}, {5});
    RandomStream rng(4);
    CHECK_THROWS_AS(g.sample_neighbor(2, NeighborMode::Weighted, rng), NoNeighborError);
  }
}

TEST_CASE("weighted sampling passes a chi-square goodness-of-fit test") {
  // Critical values of chi-square at significance 1e-3, df = 1..15.
  const double crit[] = {0,      10.828, 13.816, 16.266, 18.467, 20.515,
                         22.458, 24.322, 26.124, 27.877, 29.588, 31.264,
                         32.909, 34.528, 36.123, 37.697};
  for (int d : {8, 16}) {
    std::vector<WeightedEdge> edges;
    RandomStream wrng(77 + d);
    for (int v = 1; v <= d; ++v) edges.push_back({0, v, 0.1 + wrng.next_double()});
    Graph g = Graph::from_edges(edges);
    RandomStream rng(78 + d);
    const int N = 100000;
    std::vector<int> counts(d + 1, 0);
    for (int i = 0; i < N; ++i) ++counts[g.sample_neighbor(0, NeighborMode::Weighted, rng)];
    double stat = 0.0;
    const double wu = g.weighted_degree(0);
    for (int v = 1; v <= d; ++v) {
      const double expect = N * g.edge_weight(0, v) / wu;
      stat += (counts[v] - expect) * (counts[v] - expect) / expect;
    }
    CHECK(stat < crit[d - 1]);
  }
}

TEST_CASE("arc indices decode to each undirected edge exactly twice") {
  Graph g = erdos_renyi_graph(60, 4.0, 31, /*weighted=*/true);
  std::map<std::pair<VertexId, VertexId>, int> seen;
  for (std::int64_t a = 0; a < g.num_arcs(); ++a) {
    const auto [u, v] = g.arc(a);
    CHECK(g.edge_weight(u, v) > 0.0);
    ++seen[{std::min(u, v), std::max(u, v)}];
  }
  CHECK(static_cast<std::int64_t>(seen.size()) == g.num_edges());
  for (const auto& [e, cnt] : seen) CHECK(cnt == 2);
}

TEST_CASE("random edge lists: ingestion invariants against a reference dedup") {
  for (int inst = 0; inst < 20; ++inst) {
    RandomStream rng(3000 + inst);
    const int n_ids = 5 + static_cast<int>(rng.next_below(30));
    const int lines = 1 + static_cast<int>(rng.next_below(120));
    std::ostringstream text;
    for (int l = 0; l < lines; ++l) {
      const auto u = static_cast<std::int64_t>(rng.next_below(n_ids)) * 10;  // sparse ids
      const auto v = static_cast<std::int64_t>(rng.next_below(n_ids)) * 10;
      const double w = 0.25 + rng.next_double();
      if (rng.next_below(4) == 0) text << "% comment line\n";
      if (rng.next_below(3) == 0)
        text << u << ' ' << v << '\n';
      else
        text << u << ' ' << v << ' ' << w << '\n';
    }
    // Reference semantics: keep-first over unordered pairs, loops dropped.
    std::map<std::pair<std::int64_t, std::int64_t>, double> expect;
    {
      std::istringstream in(text.str());
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        std::int64_t u, v;
        double w = 1.0;
        ls >> u >> v;
        if (!(ls >> w)) w = 1.0;
        if (u == v) continue;
        expect.emplace(std::make_pair(std::min(u, v), std::max(u, v)), w);
      }
    }
    if (expect.empty()) continue;
    std::istringstream in(text.str());
    Graph g = load_edge_list(in);
    REQUIRE(g.num_edges() == static_cast<std::int64_t>(expect.size()));
    // Symmetry, positivity, and keep-first weights.
    double degree_sum = 0.0, edge_sum = 0.0;
    for (VertexId u = 0; u < g.num_vertices(); ++u) {
      degree_sum += g.weighted_degree(u);
      const auto nb = g.neighbors(u);
      const auto ws = g.neighbor_weights(u);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        CHECK(nb[k] != u);
        CHECK(ws[k] > 0.0);
        CHECK(g.edge_weight(nb[k], u) == ws[k]);
        const auto a = g.original_id(u), b = g.original_id(nb[k]);
        const auto it = expect.find({std::min(a, b), std::max(a, b)});
        REQUIRE(it != expect.end());
        CHECK(ws[k] == it->second);
        if (nb[k] > u) edge_sum += ws[k];
      }
    }
    CHECK(std::abs(degree_sum - 2.0 * edge_sum) <= 1e-12 * std::max(degree_sum, 1.0));
  }
}

TEST_CASE("dump and reload produce an isomorphic graph") {
  Graph g = erdos_renyi_graph(200, 5.0, 21, /*weighted=*/true);
  std::ostringstream out;
  dump_edge_list(g, out);
  std::istringstream in(out.str());
  Graph h = load_edge_list(in);
  REQUIRE(h.num_vertices() == g.num_vertices());
  REQUIRE(h.num_edges() == g.num_edges());
  // Compare adjacency as (original, original, weight) triples.
  for (VertexId u = 0; u < g.num_vertices(); ++u) {
    CHECK(h.original_id(u) == g.original_id(u));
    const auto gn = g.neighbors(u);
    const auto hn = h.neighbors(u);
    REQUIRE(gn.size() == hn.size());
    for (std::size_t k = 0; k < gn.size(); ++k) {
      CHECK(g.original_id(gn[k]) == h.original_id(hn[k]));
      CHECK(g.neighbor_weights(u)[k] == h.neighbor_weights(u)[k]);
    }
  }
}

#ifdef FJEST_HAVE_ZLIB
#include <zlib.h>
TEST_CASE("gzip edge lists load transparently") {
  const std::string path = "test_graph_tmp.el.gz";
  gzFile f = gzopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  const std::string text = "0 1\n1 2 0.5\n";
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  Graph g = load_edge_list_file(path);
  CHECK(g.num_vertices() == 3);
  CHECK(g.edge_weight(1, 2) == 0.5);
  std::remove(path.c_str());
}
#endif

TEST_CASE("condition number upper bound") {
  SUBCASE("single edge: eigenvalues 1/2 and 3/2") {
    Graph g = single_edge_graph();
    const double k = condition_number_upper_bound(g, 100);
    CHECK(k == doctest::Approx(3.0).epsilon(0.05));
  }
  SUBCASE("K3 matches a dense eigensolve") {
    Graph g = complete_graph(3);
    const auto n = g.num_vertices();
    Eigen::MatrixXd st = Eigen::MatrixXd::Zero(n, n);
    for (VertexId u = 0; u < n; ++u) {
      const double cu = 1.0 / std::sqrt(1.0 + g.weighted_degree(u));
      st(u, u) = 1.0;
      for (auto v : g.neighbors(u))
        st(u, v) = -cu * g.edge_weight(u, v) / std::sqrt(1.0 + g.weighted_degree(v));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st);
    const double exact = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    const double k = condition_number_upper_bound(g, 100);
    CHECK(k == doctest::Approx(exact).epsilon(0.05));
  }
  SUBCASE("iters=0 rejected; more iterations do not shrink the estimate") {
    Graph g = erdos_renyi_graph(100, 4.0, 5);
    CHECK_THROWS_AS(condition_number_upper_bound(g, 0), ValidationError);
    const double k1 = condition_number_upper_bound(g, 1);
    const double k100 = condition_number_upper_bound(g, 100);
    CHECK(k100 >= 0.9 * k1);
  }
}
