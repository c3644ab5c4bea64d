// Oriented clique complexes built from directed, weighted flow networks.
//
// A FlowNetwork holds raw directed arcs between opaque node ids. Collapsing
// each unordered pair into one oriented edge (lower id -> higher id) gives
// the net edge flow; filling every 3-clique of the undirected support gives
// the 2-skeleton of the clique complex, encoded by the boundary matrices
// b1 (nodes x edges) and b2 (edges x triangles).
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hodgeflow {

using SparseMatrix = Eigen::SparseMatrix<double>;  // column-major (CSC)
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Arc {
  std::string from;
  std::string to;
  double weight = 0.0;
};

// Directed weighted network for one region and year. Self-arcs are dropped on
// construction (and counted); duplicate (from, to) pairs are merged by summing.
class FlowNetwork {
 public:
  FlowNetwork() = default;
  FlowNetwork(std::string region, int year, std::vector<Arc> arcs,
              std::vector<std::string> extra_nodes = {});

  const std::string& region() const { return region_; }
  int year() const { return year_; }
  // Sorted, unique node ids.
  const std::vector<std::string>& nodes() const { return nodes_; }
  // Merged arcs, sorted by (from, to).
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t self_arcs_dropped() const { return self_arcs_dropped_; }
  std::size_t duplicates_merged() const { return duplicates_merged_; }

 private:
  std::string region_;
  int year_ = 0;
  std::vector<std::string> nodes_;
  std::vector<Arc> arcs_;
  std::size_t self_arcs_dropped_ = 0;
  std::size_t duplicates_merged_ = 0;
};

// Oriented edge between dense vertex indices, tail < head.
struct Edge {
  int tail = 0;
  int head = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Triangle {
  int a = 0;
  int b = 0;
  int c = 0;
  friend bool operator==(const Triangle&, const Triangle&) = default;
};

// Net edge flow on an oriented support, with the node ids the indices refer to.
struct NetFlow {
  std::vector<std::string> node_ids;
  std::vector<Edge> edges;
  Vector flow;
};

// One oriented edge (i, j), i before j, per unordered pair with positive total
// weight; flow = w(i->j) - w(j->i). Zero net flows stay in the support.
// Nodes are ordered lexicographically by id.
NetFlow antisymmetrize(const FlowNetwork& network);

// Same, with an explicit node order (first element precedes all others). Every
// node of the network must appear exactly once; unknown ids throw.
NetFlow antisymmetrize(const FlowNetwork& network,
                       const std::vector<std::string>& node_order);

class OrientedComplex {
 public:
  OrientedComplex() = default;

  std::size_t n0() const { return num_vertices_; }
  std::size_t n1() const { return edges_.size(); }
  std::size_t n2() const { return triangles_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const SparseMatrix& b1() const { return b1_; }
  const SparseMatrix& b2() const { return b2_; }

  // Number of triangles incident to each edge.
  std::vector<int> edge_triangle_degree() const;
  // Index of edge (i, j), i < j, or -1.
  int edge_index(int i, int j) const;

  friend OrientedComplex build_clique_complex(std::size_t num_vertices,
                                              const std::vector<Edge>& edges);

 private:
  std::size_t num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<Triangle> triangles_;
  std::map<std::pair<int, int>, int> edge_lookup_;
  SparseMatrix b1_;
  SparseMatrix b2_;
};

// Fills all 3-cliques of the undirected support. Edge indices follow the input
// order; triangles are listed lexicographically as (i < j < k).
// Boundary signs: d[i,j] = [j] - [i]; d[i,j,k] = [j,k] - [i,k] + [i,j].
OrientedComplex build_clique_complex(std::size_t num_vertices,
                                     const std::vector<Edge>& edges);

struct BettiNumbers {
  std::size_t beta0 = 0;
  std::size_t beta1 = 0;
  std::size_t rank_b1 = 0;
  std::size_t rank_b2 = 0;
};

// Numerical rank. A negative relative tolerance selects the default
// max(rows, cols) * eps * sigma_max rule.
std::size_t numerical_rank(const SparseMatrix& m, double relative_tolerance = -1.0);

BettiNumbers betti(const OrientedComplex& complex, double relative_tolerance = -1.0);

// "n0 n1 n2 beta0 beta1" style text summary.
std::string complex_summary(const OrientedComplex& complex, const BettiNumbers& betti);

}  // namespace hodgeflow
