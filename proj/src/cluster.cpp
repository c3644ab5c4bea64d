#include "hodgeflow/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hodgeflow {

const char* to_string(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::harmonic: return "harmonic";
    case ClusterMethod::geo_kmeans: return "geo-kmeans";
    case ClusterMethod::system_pair: return "system-pair";
    case ClusterMethod::external: return "external";
  }
  return "?";
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  std::vector<double> history;
};

Matrix plus_plus_seed(const Matrix& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Matrix centers(k, x.cols());
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::Index first = pick(rng);
  centers.row(0) = x.row(first);
  taken[static_cast<std::size_t>(first)] = 1;
  Vector dist2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen = -1;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2(i);
        if (target <= 0.0 && dist2(i) > 0.0) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (dist2(i) > 0.0) {
            chosen = i;
            break;
          }
        }
      }
    } else {
      // Fewer distinct points than clusters: take the first unused sample.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!taken[static_cast<std::size_t>(i)]) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = 0;
    }
    taken[static_cast<std::size_t>(chosen)] = 1;
    centers.row(c) = x.row(chosen);
    dist2 = dist2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

LloydRun lloyd(const Matrix& x, Matrix centers, int max_iterations) {
  const Eigen::Index n = x.rows();
  const auto k = static_cast<int>(centers.rows());
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  Vector best(n);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int arg = 0;
      double d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dc = (x.row(i) - centers.row(c)).squaredNorm();
        if (dc < d) {
          d = dc;
          arg = c;
        }
      }
      best(i) = d;
      inertia += d;
      if (run.labels[static_cast<std::size_t>(i)] != arg) {
        run.labels[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }
    run.history.push_back(inertia);
    run.inertia = inertia;
    if (!changed && it > 0) break;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        continue;
      }
      // Empty cluster: re-seed at the sample farthest from its centre.
      Eigen::Index far = 0;
      best.maxCoeff(&far);
      centers.row(c) = x.row(far);
      best(far) = 0.0;
    }
  }
  run.centroids = std::move(centers);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (points.rows() == 0) throw std::invalid_argument("k-means on an empty sample");
  k = static_cast<int>(std::min<Eigen::Index>(k, points.rows()));
  const int restarts = std::clamp(options.restarts, 1, 100);

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    LloydRun run = lloyd(points, plus_plus_seed(points, k, rng), options.max_iterations);
    if (run.inertia < best.inertia) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centroids);
      best.inertia = run.inertia;
      best.restart = r;
      best.inertia_history = std::move(run.history);
    }
  }
  return best;
}

std::vector<int> CosineSpectralClusterer::cluster(const Matrix& rows, int k,
                                                  std::uint64_t seed) const {
  const Eigen::Index m = rows.rows();
  k = static_cast<int>(std::min<Eigen::Index>(k, m));
  if (k <= 1) return std::vector<int>(static_cast<std::size_t>(m), 0);

  const Matrix affinity = (rows * rows.transpose()).cwiseAbs();
  const Vector inv_sqrt_degree = affinity.rowwise().sum().cwiseSqrt().cwiseInverse();
  const Matrix normalized =
      inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(normalized);
  Matrix embedding = eig.eigenvectors().rightCols(k);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return kmeans(embedding, k, seed).labels;
}

EdgeClustering harmonic_cluster(const HarmonicBasis& basis, int k, std::uint64_t seed,
                                const EdgeClusterer& clusterer) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (basis.dimension() == 0) throw std::invalid_argument("no harmonic structure to cluster");
  constexpr double kWeakNorm = 1e-10;

  const Matrix& h = basis.vectors;
  const Eigen::Index n1 = h.rows();
  EdgeClustering out;
  out.method = ClusterMethod::harmonic;
  out.labels.assign(static_cast<std::size_t>(n1), kUnlabeled);
  out.weak.assign(static_cast<std::size_t>(n1), false);

  std::vector<Eigen::Index> strong;
  for (Eigen::Index e = 0; e < n1; ++e) {
    if (h.row(e).norm() >= kWeakNorm) {
      strong.push_back(e);
    } else {
      out.weak[static_cast<std::size_t>(e)] = true;
    }
  }
  if (strong.empty()) throw std::invalid_argument("no harmonic structure to cluster");

  Matrix unit(static_cast<Eigen::Index>(strong.size()), h.cols());
  for (std::size_t i = 0; i < strong.size(); ++i) {
    unit.row(static_cast<Eigen::Index>(i)) = h.row(strong[i]).normalized();
  }
  const std::vector<int> labels = clusterer.cluster(unit, k, seed);
  int k_used = 0;
  for (std::size_t i = 0; i < strong.size(); ++i) {
    out.labels[static_cast<std::size_t>(strong[i])] = labels[i];
    k_used = std::max(k_used, labels[i] + 1);
  }
  out.k = k_used;

  for (Eigen::Index e = 0; e < n1; ++e) {
    if (!out.weak[static_cast<std::size_t>(e)]) continue;
    const double norm = h.row(e).norm();
    std::vector<double> score(static_cast<std::size_t>(k_used), 0.0);
    std::vector<int> members(static_cast<std::size_t>(k_used), 0);
    for (std::size_t i = 0; i < strong.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++members[c];
      if (norm > 0.0) {
        score[c] += std::abs(h.row(e).dot(unit.row(static_cast<Eigen::Index>(i)))) / norm;
      }
    }
    int arg = 0;
    double best = -1.0;
    for (int c = 0; c < k_used; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      const double mean = members[cc] > 0 ? score[cc] / members[cc] : 0.0;
      if (mean > best) {
        best = mean;
        arg = c;
      }
    }
    out.labels[static_cast<std::size_t>(e)] = arg;
  }
  return out;
}

EdgeClustering geo_kmeans(const std::vector<Edge>& edges,
                          const std::vector<std::optional<GeoCoord>>& node_coords, int k,
                          std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  EdgeClustering out;
  out.method = ClusterMethod::geo_kmeans;
  out.labels.assign(edges.size(), kUnlabeled);

  std::vector<std::size_t> covered;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& a = node_coords.at(static_cast<std::size_t>(edges[e].tail));
    const auto& b = node_coords.at(static_cast<std::size_t>(edges[e].head));
    if (a && b) {
      covered.push_back(e);
    } else {
      ++out.excluded;
    }
  }
  if (covered.empty()) return out;

  Matrix features(static_cast<Eigen::Index>(covered.size()), 4);
  for (std::size_t i = 0; i < covered.size(); ++i) {
    const auto& edge = edges[covered[i]];
    const GeoCoord& a = *node_coords[static_cast<std::size_t>(edge.tail)];
    const GeoCoord& b = *node_coords[static_cast<std::size_t>(edge.head)];
    features.row(static_cast<Eigen::Index>(i)) << a.latitude, a.longitude, b.latitude,
        b.longitude;
  }
  const KMeansResult km = kmeans(features, k, seed, options);
  for (std::size_t i = 0; i < covered.size(); ++i) out.labels[covered[i]] = km.labels[i];
  out.k = static_cast<int>(km.centroids.rows());
  return out;
}

EdgeClustering system_pair_clusters(const std::vector<Edge>& edges,
                                    const std::vector<std::optional<std::string>>& node_systems) {
  EdgeClustering out;
  out.method = ClusterMethod::system_pair;
  out.labels.assign(edges.size(), kUnlabeled);

  std::map<std::pair<std::string, std::string>, int> pairs;
  std::vector<std::pair<std::string, std::string>> keys(edges.size());
  std::vector<char> covered(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& a = node_systems.at(static_cast<std::size_t>(edges[e].tail));
    const auto& b = node_systems.at(static_cast<std::size_t>(edges[e].head));
    if (!a || !b) {
      ++out.excluded;
      continue;
    }
    keys[e] = std::minmax(*a, *b);
    covered[e] = 1;
    pairs.emplace(keys[e], 0);
  }
  int next = 0;
  for (auto& [key, label] : pairs) label = next++;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (covered[e]) out.labels[e] = pairs.at(keys[e]);
  }
  out.k = next;
  return out;
}

namespace {

double entropy(const std::vector<long>& counts, long n) {
  double h = 0.0;
  for (long c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(n);
      h -= p * std::log(p);
    }
  }
  return h;
}

// E[MI] under the hypergeometric model of random labelings with fixed marginals.
double expected_mutual_information(const std::vector<long>& a, const std::vector<long>& b,
                                   long n) {
  const double nd = static_cast<double>(n);
  const double lg_n = std::lgamma(nd + 1.0);
  double emi = 0.0;
  for (long ai : a) {
    for (long bj : b) {
      const long lo = std::max(1L, ai + bj - n);
      const long hi = std::min(ai, bj);
      const double fixed = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) +
                           std::lgamma(nd - ai + 1.0) + std::lgamma(nd - bj + 1.0) - lg_n;
      for (long nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double term = x / nd *
                            std::log(nd * x / (static_cast<double>(ai) * static_cast<double>(bj)));
        const double log_p = fixed - std::lgamma(x + 1.0) - std::lgamma(ai - x + 1.0) -
                             std::lgamma(bj - x + 1.0) - std::lgamma(nd - ai - bj + x + 1.0);
        emi += term * std::exp(log_p);
      }
    }
  }
  return emi;
}

std::vector<int> compact(const std::vector<int>& labels, int& count) {
  std::map<int, int> index;
  for (int l : labels) index.emplace(l, 0);
  count = 0;
  for (auto& [label, id] : index) id = count++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(index.at(l));
  return out;
}

}  // namespace

double adjusted_mutual_information(const std::vector<int>& a_raw, const std::vector<int>& b_raw) {
  if (a_raw.size() != b_raw.size()) throw std::invalid_argument("label vectors differ in length");
  const auto n = static_cast<long>(a_raw.size());
  if (n < 2) throw std::invalid_argument("AMI needs at least 2 common edges");
  int ka = 0;
  int kb = 0;
  const auto a = compact(a_raw, ka);
  const auto b = compact(b_raw, kb);
  // Both trivial in the same way: perfect agreement by convention.
  if ((ka == 1 && kb == 1) || (ka == n && kb == n)) return 1.0;

  std::vector<long> ca(static_cast<std::size_t>(ka), 0);
  std::vector<long> cb(static_cast<std::size_t>(kb), 0);
  std::map<std::pair<int, int>, long> joint;
  for (long i = 0; i < n; ++i) {
    const auto ai = a[static_cast<std::size_t>(i)];
    const auto bi = b[static_cast<std::size_t>(i)];
    ++ca[static_cast<std::size_t>(ai)];
    ++cb[static_cast<std::size_t>(bi)];
    ++joint[{ai, bi}];
  }
  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const double nij = static_cast<double>(count);
    mi += nij / nd *
          std::log(nd * nij / (static_cast<double>(ca[static_cast<std::size_t>(key.first)]) *
                               static_cast<double>(cb[static_cast<std::size_t>(key.second)])));
  }
  const double emi = expected_mutual_information(ca, cb, n);
  const double normalizer = 0.5 * (entropy(ca, n) + entropy(cb, n));
  double denominator = normalizer - emi;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  denominator = denominator < 0.0 ? std::min(denominator, -eps) : std::max(denominator, eps);
  return (mi - emi) / denominator;
}

AmiResult adjusted_mutual_information(const EdgeClustering& a, const EdgeClustering& b) {
  if (a.labels.size() != b.labels.size()) {
    throw std::invalid_argument("clusterings cover different edge sets");
  }
  std::vector<int> la;
  std::vector<int> lb;
  for (std::size_t e = 0; e < a.labels.size(); ++e) {
    if (a.labels[e] != kUnlabeled && b.labels[e] != kUnlabeled) {
      la.push_back(a.labels[e]);
      lb.push_back(b.labels[e]);
    }
  }
  AmiResult out;
  out.common = la.size();
  out.value = adjusted_mutual_information(la, lb);
  return out;
}

}  // namespace hodgeflow
