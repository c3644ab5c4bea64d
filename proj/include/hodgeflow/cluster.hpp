// Edge clusterings: harmonic (spectral on kernel coordinates), geographic
// k-means, health-system pairs, and their comparison by adjusted mutual
// information.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hodgeflow/complex.hpp"
#include "hodgeflow/hodge.hpp"

namespace hodgeflow {

enum class ClusterMethod { harmonic, geo_kmeans, system_pair, external };

const char* to_string(ClusterMethod method);

inline constexpr int kUnlabeled = -1;

struct EdgeClustering {
  std::vector<int> labels;  // per edge; kUnlabeled for excluded edges
  int k = 0;
  ClusterMethod method = ClusterMethod::harmonic;
  std::vector<bool> weak;  // harmonic only: no harmonic signal on the edge
  std::size_t excluded = 0;
};

struct KMeansOptions {
  int restarts = 10;  // capped at 100
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;  // k x dim
  double inertia = 0.0;
  int restart = 0;                     // winning restart
  std::vector<double> inertia_history;  // per Lloyd iteration of the winning restart
};

// Lloyd's algorithm with k-means++ seeding; rows of `points` are samples.
// Best restart by lowest inertia, then lowest restart index.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

// Strategy for clustering unit-normalized harmonic coordinates.
class EdgeClusterer {
 public:
  virtual ~EdgeClusterer() = default;
  virtual std::string name() const = 0;
  // rows: unit vectors, one per edge with harmonic signal. Returns labels in [0, k).
  virtual std::vector<int> cluster(const Matrix& rows, int k, std::uint64_t seed) const = 0;
};

// Normalized spectral clustering on the affinity |<u_i, u_j>|.
class CosineSpectralClusterer : public EdgeClusterer {
 public:
  std::string name() const override { return "abs-cosine-spectral"; }
  std::vector<int> cluster(const Matrix& rows, int k, std::uint64_t seed) const override;
};

// Rows of H (one per edge) are the edges' harmonic coordinates. Rows with norm
// below 1e-10 are weak: they join the cluster with the highest mean affinity
// and are flagged. Throws when the basis is empty.
EdgeClustering harmonic_cluster(const HarmonicBasis& basis, int k, std::uint64_t seed,
                                const EdgeClusterer& clusterer = CosineSpectralClusterer{});

struct GeoCoord {
  double latitude = 0.0;
  double longitude = 0.0;
};

// Features (lat_i, lon_i, lat_j, lon_j) per edge; edges with an uncoded endpoint
// are excluded and counted.
EdgeClustering geo_kmeans(const std::vector<Edge>& edges,
                          const std::vector<std::optional<GeoCoord>>& node_coords, int k,
                          std::uint64_t seed, const KMeansOptions& options = {});

// Label = index of the unordered pair {sys(i), sys(j)} among the sorted
// distinct pairs observed.
EdgeClustering system_pair_clusters(const std::vector<Edge>& edges,
                                    const std::vector<std::optional<std::string>>& node_systems);

struct AmiResult {
  double value = 0.0;
  std::size_t common = 0;
};

// AMI with hypergeometric expected mutual information and the arithmetic-mean
// entropy normalizer, over the edges labeled in both clusterings.
AmiResult adjusted_mutual_information(const EdgeClustering& a, const EdgeClustering& b);
double adjusted_mutual_information(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace hodgeflow
