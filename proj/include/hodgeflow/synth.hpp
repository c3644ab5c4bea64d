// Synthetic complexes and flows with known decomposition, plus the dense
// reference decomposition.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodgeflow/complex.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/ingest.hpp"

namespace hodgeflow {

struct PlantedFlow {
  OrientedComplex complex;
  Vector flow;
  Vector gradient;
  Vector curl;
  Vector harmonic;
  Mode mode = Mode::normalized;
};

// flow = G p + C w + H coeffs, with G, C the mode's gradient and curl
// generators and H the mode's harmonic basis. Empty vectors mean "no
// component"; harmonic coefficients on a complex with beta1 = 0 throw.
PlantedFlow plant(const OrientedComplex& complex, const Vector& potential,
                  const Vector& curl_weights, const Vector& harmonic_coeffs, Mode mode);

// Erdos-Renyi support on n nodes, edges in lexicographic order.
std::vector<Edge> random_support(int nodes, double probability, std::uint64_t seed);

// Projections through explicit orthonormal bases (Householder QR with column
// pivoting) of both image spaces. Limited to 2000 edges.
HodgeDecomposition dense_oracle(const Vector& flow, const OrientedComplex& complex, Mode mode);

struct SyntheticRegion {
  std::string region;
  int nodes = 20;
  double edge_probability = 0.3;
};

struct SyntheticDataset {
  std::vector<ProviderRecord> providers;
  std::vector<EdgeRecord> edges;
};

// Planted-flow networks written as raw arcs: an edge with net flow f becomes
// two opposite arcs with weights (|f| + base, base), so supports survive
// antisymmetrization even where f = 0. Providers get coordinates around a
// region centre and one of three health systems.
SyntheticDataset synthetic_dataset(const std::vector<SyntheticRegion>& regions,
                                   const std::vector<int>& years, std::uint64_t seed,
                                   double base_weight = 1.0);

std::string edges_csv(const std::vector<EdgeRecord>& edges);
std::string providers_csv(const std::vector<ProviderRecord>& providers);

}  // namespace hodgeflow
