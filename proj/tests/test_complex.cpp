#include <doctest.h>

#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "hodgeflow/complex.hpp"
#include "hodgeflow/synth.hpp"

using namespace hodgeflow;

namespace {

std::size_t components_by_union_find(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t count = n;
  for (const auto& e : edges) {
    auto a = find(static_cast<std::size_t>(e.tail));
    auto b = find(static_cast<std::size_t>(e.head));
    if (a != b) {
      parent[a] = b;
      --count;
    }
  }
  return count;
}

std::size_t triangles_brute_force(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.tail)][static_cast<std::size_t>(e.head)] = true;
    adj[static_cast<std::size_t>(e.head)][static_cast<std::size_t>(e.tail)] = true;
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (adj[i][j] && adj[i][k] && adj[j][k]) ++count;
  return count;
}

}  // namespace

TEST_CASE("antisymmetrize nets opposite arcs") {
  SUBCASE("two-sided pair") {
    const NetFlow f = antisymmetrize(FlowNetwork("R", 2017, {{"A", "B", 12}, {"B", "A", 4}}));
    REQUIRE(f.edges.size() == 1);
    CHECK(f.node_ids == std::vector<std::string>{"A", "B"});
    CHECK(f.edges[0] == Edge{0, 1});
    CHECK(f.flow(0) == 8.0);
  }
  SUBCASE("one-sided arc") {
    const NetFlow f = antisymmetrize(FlowNetwork("R", 2017, {{"A", "B", 5}}));
    CHECK(f.flow(0) == 5.0);
  }
  SUBCASE("symmetric pair keeps a zero-flow edge") {
    const NetFlow f = antisymmetrize(FlowNetwork("R", 2017, {{"A", "B", 3}, {"B", "A", 3}}));
    REQUIRE(f.edges.size() == 1);
    CHECK(f.flow(0) == 0.0);
  }
  SUBCASE("reverse-ordered arc flips sign") {
    const NetFlow f = antisymmetrize(FlowNetwork("R", 2017, {{"B", "A", 2}}));
    CHECK(f.edges[0] == Edge{0, 1});
    CHECK(f.flow(0) == -2.0);
  }
  SUBCASE("explicit node order sets orientation") {
    const NetFlow f =
        antisymmetrize(FlowNetwork("R", 2017, {{"A", "B", 12}, {"B", "A", 4}}), {"B", "A"});
    CHECK(f.node_ids == std::vector<std::string>{"B", "A"});
    CHECK(f.flow(0) == -8.0);
  }
}

TEST_CASE("FlowNetwork construction") {
  const FlowNetwork net("R", 2016, {{"A", "A", 7}, {"A", "B", 1}, {"A", "B", 2}, {"C", "A", 1}});
  CHECK(net.self_arcs_dropped() == 1);
  CHECK(net.duplicates_merged() == 1);
  REQUIRE(net.arcs().size() == 2);
  CHECK(net.arcs()[0].weight == 3.0);
  CHECK(net.nodes() == std::vector<std::string>{"A", "B", "C"});

  CHECK_THROWS(FlowNetwork("R", 2016, {{"A", "B", -1}}));
  CHECK_THROWS(FlowNetwork("R", 2016, {{"", "B", 1}}));
  CHECK_THROWS(FlowNetwork("R", 2016, {{"A", "B", std::nan("")}}));

  const FlowNetwork isolated("R", 2016, {{"A", "B", 1}}, {"Z"});
  CHECK(isolated.nodes().size() == 3);
}

TEST_CASE("unknown node id in an explicit order names the id") {
  const FlowNetwork net("R", 2016, {{"A", "B", 1}});
  try {
    antisymmetrize(net, {"A", "Q"});
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("'B'") != std::string::npos);
  }
}

TEST_CASE("clique complex sizes and boundary signs") {
  SUBCASE("K3") {
    const auto cx = fixtures::k3();
    CHECK(cx.n1() == 3);
    REQUIRE(cx.n2() == 1);
    const Matrix b2(cx.b2());
    CHECK(b2(0, 0) == 1.0);
    CHECK(b2(1, 0) == -1.0);
    CHECK(b2(2, 0) == 1.0);
    const Matrix b1(cx.b1());
    CHECK(b1(0, 0) == -1.0);
    CHECK(b1(1, 0) == 1.0);
  }
  SUBCASE("4-cycle") {
    const auto cx = fixtures::cycle4();
    CHECK(cx.n1() == 4);
    CHECK(cx.n2() == 0);
  }
  SUBCASE("K4") {
    const auto cx = build_clique_complex(4, random_support(4, 1.0, 1));
    CHECK(cx.n1() == 6);
    CHECK(cx.n2() == 4);
  }
  SUBCASE("edge lookup") {
    const auto cx = fixtures::cycle4();
    CHECK(cx.edge_index(0, 3) == 3);
    CHECK(cx.edge_index(0, 2) == -1);
  }
  SUBCASE("edge-triangle degree on the bowtie") {
    const auto cx = fixtures::bowtie();
    CHECK(cx.edge_triangle_degree() == std::vector<int>{1, 1, 2, 1, 1});
  }
}

TEST_CASE("betti numbers on fixtures") {
  auto b = betti(fixtures::cycle4());
  CHECK(b.beta0 == 1);
  CHECK(b.beta1 == 1);
  b = betti(fixtures::k3());
  CHECK(b.beta0 == 1);
  CHECK(b.beta1 == 0);
  const auto two = build_clique_complex(8, {{0, 1}, {1, 2}, {2, 3}, {0, 3},
                                            {4, 5}, {5, 6}, {6, 7}, {4, 7}});
  b = betti(two);
  CHECK(b.beta0 == 2);
  CHECK(b.beta1 == 2);
  CHECK(betti(fixtures::two_cycles()).beta1 == 2);
}

TEST_CASE("complex summary text") {
  const auto cx = fixtures::cycle4();
  CHECK(complex_summary(cx, betti(cx)) == "n0 4\nn1 4\nn2 0\nbeta0 1\nbeta1 1\n");
}

TEST_CASE("property: boundary of a boundary vanishes, counts match brute force") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 20);
    const double p = 0.1 + 0.6 * static_cast<double>(rng() % 100) / 100.0;
    const auto edges = random_support(n, p, rng());
    const auto cx = build_clique_complex(static_cast<std::size_t>(n), edges);
    const SparseMatrix bb = cx.b1() * cx.b2();
    CHECK(bb.norm() == 0.0);
    CHECK(cx.n2() == triangles_brute_force(static_cast<std::size_t>(n), edges));
    const auto b = betti(cx);
    CHECK(b.beta0 == components_by_union_find(static_cast<std::size_t>(n), edges));
    // Euler characteristic.
    const auto beta2 = static_cast<long>(cx.n2()) - static_cast<long>(b.rank_b2);
    CHECK(static_cast<long>(cx.n0()) - static_cast<long>(cx.n1()) + static_cast<long>(cx.n2()) ==
          static_cast<long>(b.beta0) - static_cast<long>(b.beta1) + beta2);
    for (const auto& t : cx.triangles()) {
      CHECK(t.a < t.b);
      CHECK(t.b < t.c);
    }
  }
}

TEST_CASE("numerical rank matches dense rank on small matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 12);
    const auto cx = build_clique_complex(static_cast<std::size_t>(n), random_support(n, 0.5, rng()));
    if (cx.n1() == 0) continue;
    const Matrix b1(cx.b1());
    Eigen::FullPivLU<Matrix> lu(b1);
    CHECK(numerical_rank(cx.b1()) == static_cast<std::size_t>(lu.rank()));
  }
}
