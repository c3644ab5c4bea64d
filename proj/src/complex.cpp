#include "hodgeflow/complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/SVD>
#include <Eigen/SparseQR>

namespace hodgeflow {

FlowNetwork::FlowNetwork(std::string region, int year, std::vector<Arc> arcs,
                         std::vector<std::string> extra_nodes)
    : region_(std::move(region)), year_(year) {
  std::map<std::pair<std::string, std::string>, double> merged;
  std::vector<std::string> nodes = std::move(extra_nodes);
  for (auto& arc : arcs) {
    if (arc.from.empty() || arc.to.empty()) {
      throw std::invalid_argument("arc with empty node id");
    }
    if (!(arc.weight >= 0.0) || !std::isfinite(arc.weight)) {
      throw std::invalid_argument("arc " + arc.from + "->" + arc.to +
                                  " has invalid weight");
    }
    nodes.push_back(arc.from);
    nodes.push_back(arc.to);
    if (arc.from == arc.to) {
      ++self_arcs_dropped_;
      continue;
    }
    auto [it, inserted] = merged.try_emplace({arc.from, arc.to}, 0.0);
    if (!inserted) ++duplicates_merged_;
    it->second += arc.weight;
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  nodes_ = std::move(nodes);
  arcs_.reserve(merged.size());
  for (auto& [key, weight] : merged) {
    arcs_.push_back({key.first, key.second, weight});
  }
}

namespace {

NetFlow antisymmetrize_ranked(const FlowNetwork& network,
                              std::vector<std::string> ordered_ids) {
  std::unordered_map<std::string, int> rank;
  rank.reserve(ordered_ids.size());
  for (std::size_t i = 0; i < ordered_ids.size(); ++i) {
    if (!rank.emplace(ordered_ids[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("node order lists '" + ordered_ids[i] + "' twice");
    }
  }
  auto lookup = [&](const std::string& id) {
    auto it = rank.find(id);
    if (it == rank.end()) {
      throw std::invalid_argument("unknown node id '" + id + "'");
    }
    return it->second;
  };
  for (const auto& id : network.nodes()) lookup(id);

  std::map<Edge, double> net;
  std::map<Edge, double> total;
  for (const auto& arc : network.arcs()) {
    int u = lookup(arc.from);
    int v = lookup(arc.to);
    Edge e = u < v ? Edge{u, v} : Edge{v, u};
    double sign = u < v ? 1.0 : -1.0;
    net[e] += sign * arc.weight;
    total[e] += arc.weight;
  }

  NetFlow out;
  out.node_ids = std::move(ordered_ids);
  std::vector<double> values;
  for (const auto& [edge, volume] : total) {
    if (volume <= 0.0) continue;
    out.edges.push_back(edge);
    values.push_back(net[edge]);
  }
  out.flow = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return out;
}

}  // namespace

NetFlow antisymmetrize(const FlowNetwork& network) {
  return antisymmetrize_ranked(network, network.nodes());
}

NetFlow antisymmetrize(const FlowNetwork& network,
                       const std::vector<std::string>& node_order) {
  return antisymmetrize_ranked(network, node_order);
}

std::vector<int> OrientedComplex::edge_triangle_degree() const {
  std::vector<int> degree(n1(), 0);
  for (int t = 0; t < b2_.outerSize(); ++t) {
    for (SparseMatrix::InnerIterator it(b2_, t); it; ++it) {
      ++degree[static_cast<std::size_t>(it.row())];
    }
  }
  return degree;
}

int OrientedComplex::edge_index(int i, int j) const {
  auto it = edge_lookup_.find({i, j});
  return it == edge_lookup_.end() ? -1 : it->second;
}

OrientedComplex build_clique_complex(std::size_t num_vertices,
                                     const std::vector<Edge>& edges) {
  OrientedComplex cx;
  cx.num_vertices_ = num_vertices;
  cx.edges_ = edges;
  const int n = static_cast<int>(num_vertices);

  // Forward adjacency: neighbours with a larger index, sorted.
  std::vector<std::vector<int>> forward(num_vertices);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (i < 0 || j >= n || i >= j) {
      throw std::invalid_argument("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") is not an ordered pair of valid vertices");
    }
    if (!cx.edge_lookup_.emplace(std::pair{i, j}, static_cast<int>(e)).second) {
      throw std::invalid_argument("duplicate edge (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
    }
    forward[static_cast<std::size_t>(i)].push_back(j);
  }
  for (auto& adj : forward) std::sort(adj.begin(), adj.end());

  for (int i = 0; i < n; ++i) {
    const auto& ni = forward[static_cast<std::size_t>(i)];
    for (std::size_t x = 0; x < ni.size(); ++x) {
      const int j = ni[x];
      const auto& nj = forward[static_cast<std::size_t>(j)];
      // k ranges over the intersection of ni (after j) and nj.
      auto a = ni.begin() + static_cast<std::ptrdiff_t>(x) + 1;
      auto b = nj.begin();
      while (a != ni.end() && b != nj.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          cx.triangles_.push_back({i, j, *a});
          ++a;
          ++b;
        }
      }
    }
  }

  std::vector<Eigen::Triplet<double>> t1;
  t1.reserve(2 * edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto col = static_cast<int>(e);
    t1.emplace_back(edges[e].tail, col, -1.0);
    t1.emplace_back(edges[e].head, col, 1.0);
  }
  cx.b1_.resize(static_cast<Eigen::Index>(num_vertices), static_cast<Eigen::Index>(edges.size()));
  cx.b1_.setFromTriplets(t1.begin(), t1.end());

  std::vector<Eigen::Triplet<double>> t2;
  t2.reserve(3 * cx.triangles_.size());
  for (std::size_t t = 0; t < cx.triangles_.size(); ++t) {
    const auto [a, b, c] = cx.triangles_[t];
    const auto col = static_cast<int>(t);
    t2.emplace_back(cx.edge_index(a, b), col, 1.0);
    t2.emplace_back(cx.edge_index(a, c), col, -1.0);
    t2.emplace_back(cx.edge_index(b, c), col, 1.0);
  }
  cx.b2_.resize(static_cast<Eigen::Index>(edges.size()),
                static_cast<Eigen::Index>(cx.triangles_.size()));
  cx.b2_.setFromTriplets(t2.begin(), t2.end());
  return cx;
}

std::size_t numerical_rank(const SparseMatrix& m, double relative_tolerance) {
  const auto rows = m.rows();
  const auto cols = m.cols();
  if (rows == 0 || cols == 0 || m.nonZeros() == 0) return 0;
  const double rel = relative_tolerance > 0.0
                         ? relative_tolerance
                         : static_cast<double>(std::max(rows, cols)) *
                               std::numeric_limits<double>::epsilon();

  if (std::min(rows, cols) <= 2000 && rows * cols <= 40'000'000) {
    Eigen::BDCSVD<Matrix> svd(Matrix(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double cutoff = rel * sigma(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) > cutoff) ++rank;
    }
    return rank;
  }

  // Large inputs: rank-revealing sparse QR. The pivot threshold is absolute, so
  // scale by the largest column norm as a proxy for sigma_max.
  double max_col = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) max_col = std::max(max_col, m.col(c).norm());
  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(rel * max_col);
  SparseMatrix mc = m;
  mc.makeCompressed();
  qr.compute(mc);
  return static_cast<std::size_t>(qr.rank());
}

BettiNumbers betti(const OrientedComplex& complex, double relative_tolerance) {
  BettiNumbers out;
  out.rank_b1 = numerical_rank(complex.b1(), relative_tolerance);
  out.rank_b2 = numerical_rank(complex.b2(), relative_tolerance);
  out.beta0 = complex.n0() - out.rank_b1;
  out.beta1 = complex.n1() - out.rank_b1 - out.rank_b2;
  return out;
}

std::string complex_summary(const OrientedComplex& complex, const BettiNumbers& b) {
  std::ostringstream os;
  os << "n0 " << complex.n0() << '\n'
     << "n1 " << complex.n1() << '\n'
     << "n2 " << complex.n2() << '\n'
     << "beta0 " << b.beta0 << '\n'
     << "beta1 " << b.beta1 << '\n';
  return os.str();
}

}  // namespace hodgeflow
