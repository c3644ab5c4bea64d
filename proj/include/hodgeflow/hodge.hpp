// Hodge Laplacians and the gradient / curl / harmonic split of edge flows.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hodgeflow/complex.hpp"

namespace hodgeflow {

enum class Mode { unnormalized, normalized };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

// Diagonals of the random-walk normalization.
//   d2(e) = max(#triangles on e, 1)
//   d1    = 2 * |B1| * d2          (isolated vertices get 1; their B1 row is zero)
//   d3    = 1/3 on every triangle
struct NormalizationDegrees {
  Vector d1;
  Vector d2;
  Vector d3;
};

NormalizationDegrees normalization_degrees(const OrientedComplex& complex);

enum class LaplacianKind { unnormalized, random_walk, symmetrized };

struct HodgeLaplacian {
  LaplacianKind kind = LaplacianKind::unnormalized;
  SparseMatrix matrix;
  std::optional<NormalizationDegrees> degrees;
};

// B1 B1^T, the graph Laplacian of the undirected support.
HodgeLaplacian laplacian_l0(const OrientedComplex& complex);
// B1^T B1 + B2 B2^T.
HodgeLaplacian laplacian_l1(const OrientedComplex& complex);
// D2 B1^T D1^-1 B1 + B2 D3 B2^T D2^-1.
HodgeLaplacian laplacian_l1_rw(const OrientedComplex& complex);
// D2^-1/2 L1rw D2^1/2, symmetric PSD.
HodgeLaplacian laplacian_l1_symmetrized(const OrientedComplex& complex);

// The mode's gradient image generator: B1^T, or D2^1/2 B1^T when normalized.
SparseMatrix gradient_operator(const OrientedComplex& complex, Mode mode);
// The mode's curl image generator: B2, or D2^-1/2 B2 when normalized.
SparseMatrix curl_operator(const OrientedComplex& complex, Mode mode);

enum class ProjectionMethod { automatic, dense, iterative };

struct DecomposeOptions {
  Mode mode = Mode::normalized;
  double solver_tolerance = 1e-10;
  ProjectionMethod method = ProjectionMethod::automatic;
  // automatic picks the dense path up to this many edges.
  std::size_t dense_edge_limit = 500;
};

struct HodgeDecomposition {
  Vector gradient;
  Vector curl;
  Vector harmonic;
  double residual_norm = 0.0;
  Mode mode = Mode::normalized;
  ProjectionMethod method = ProjectionMethod::dense;
  int iterations = 0;  // LSQR iterations, summed over both projections
};

// g and r are orthogonal projections of the flow onto the mode's gradient and
// curl images; h = f - g - r. Throws SolverError if LSQR does not converge.
HodgeDecomposition decompose(const Vector& flow, const OrientedComplex& complex,
                             const DecomposeOptions& options = {});

enum class EigenMethod { automatic, dense, lanczos };

struct HarmonicOptions {
  Mode mode = Mode::normalized;
  double eigen_tolerance = 1e-8;  // relative to the largest eigenvalue
  // Warn when (largest kept eigenvalue) / (smallest rejected) exceeds this.
  double gap_warning_ratio = 1e-4;
  EigenMethod method = EigenMethod::automatic;
  std::size_t dense_edge_limit = 3000;
};

struct HarmonicBasis {
  Matrix vectors;  // n1 x d, orthonormal columns
  double eigenvalue_gap = 0.0;
  double tolerance = 0.0;  // absolute eigenvalue cutoff that was applied
  Mode mode = Mode::normalized;
  std::vector<std::string> warnings;

  Eigen::Index dimension() const { return vectors.cols(); }
};

// Orthonormal basis of ker L1 (symmetrized form when normalized). Each column
// has its first largest-magnitude entry positive.
HarmonicBasis harmonic_basis(const OrientedComplex& complex,
                             const HarmonicOptions& options = {});

// Triplet text export: one "row col value" line per stored entry.
std::string laplacian_triplets(const HodgeLaplacian& laplacian);

}  // namespace hodgeflow
