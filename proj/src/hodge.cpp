#include "hodgeflow/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "hodgeflow/lsqr.hpp"

namespace hodgeflow {

const char* to_string(Mode mode) {
  return mode == Mode::normalized ? "normalized" : "unnormalized";
}

Mode parse_mode(const std::string& text) {
  if (text == "normalized") return Mode::normalized;
  if (text == "unnormalized") return Mode::unnormalized;
  throw std::invalid_argument("unknown mode '" + text + "'");
}

namespace {

SparseMatrix diagonal(const Vector& d) {
  SparseMatrix m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d(i);
  m.makeCompressed();
  return m;
}

}  // namespace

NormalizationDegrees normalization_degrees(const OrientedComplex& complex) {
  NormalizationDegrees deg;
  const auto tri = complex.edge_triangle_degree();
  deg.d2.resize(static_cast<Eigen::Index>(complex.n1()));
  for (std::size_t e = 0; e < tri.size(); ++e) {
    deg.d2(static_cast<Eigen::Index>(e)) = std::max(tri[e], 1);
  }
  deg.d1 = Vector::Zero(static_cast<Eigen::Index>(complex.n0()));
  for (std::size_t e = 0; e < complex.n1(); ++e) {
    const auto& edge = complex.edges()[e];
    const double w = deg.d2(static_cast<Eigen::Index>(e));
    deg.d1(edge.tail) += 2.0 * w;
    deg.d1(edge.head) += 2.0 * w;
  }
  for (Eigen::Index i = 0; i < deg.d1.size(); ++i) {
    if (deg.d1(i) == 0.0) deg.d1(i) = 1.0;
  }
  deg.d3 = Vector::Constant(static_cast<Eigen::Index>(complex.n2()), 1.0 / 3.0);
  return deg;
}

HodgeLaplacian laplacian_l0(const OrientedComplex& complex) {
  HodgeLaplacian out;
  out.matrix = complex.b1() * SparseMatrix(complex.b1().transpose());
  out.matrix.prune(0.0);
  return out;
}

HodgeLaplacian laplacian_l1(const OrientedComplex& complex) {
  const SparseMatrix& b1 = complex.b1();
  const SparseMatrix& b2 = complex.b2();
  HodgeLaplacian out;
  out.matrix = SparseMatrix(b1.transpose()) * b1 + b2 * SparseMatrix(b2.transpose());
  out.matrix.prune(0.0);
  return out;
}

HodgeLaplacian laplacian_l1_rw(const OrientedComplex& complex) {
  const SparseMatrix& b1 = complex.b1();
  const SparseMatrix& b2 = complex.b2();
  auto deg = normalization_degrees(complex);
  const SparseMatrix d2 = diagonal(deg.d2);
  const SparseMatrix d2_inv = diagonal(deg.d2.cwiseInverse());
  const SparseMatrix d1_inv = diagonal(deg.d1.cwiseInverse());
  const SparseMatrix d3 = diagonal(deg.d3);
  const SparseMatrix b1t = b1.transpose();
  const SparseMatrix b2t = b2.transpose();

  HodgeLaplacian out;
  out.kind = LaplacianKind::random_walk;
  out.matrix = SparseMatrix(d2 * b1t) * SparseMatrix(d1_inv * b1) +
               SparseMatrix(b2 * d3) * SparseMatrix(b2t * d2_inv);
  out.matrix.prune(0.0);
  out.degrees = std::move(deg);
  return out;
}

HodgeLaplacian laplacian_l1_symmetrized(const OrientedComplex& complex) {
  auto rw = laplacian_l1_rw(complex);
  const Vector& d2 = rw.degrees->d2;
  const SparseMatrix left = diagonal(d2.cwiseSqrt().cwiseInverse());
  const SparseMatrix right = diagonal(d2.cwiseSqrt());
  HodgeLaplacian out;
  out.kind = LaplacianKind::symmetrized;
  out.matrix = left * rw.matrix * right;
  // Round-off leaves the product asymmetric in the last bit.
  out.matrix = 0.5 * (out.matrix + SparseMatrix(out.matrix.transpose()));
  out.matrix.prune(0.0);
  out.degrees = std::move(rw.degrees);
  return out;
}

SparseMatrix gradient_operator(const OrientedComplex& complex, Mode mode) {
  SparseMatrix b1t = complex.b1().transpose();
  if (mode == Mode::unnormalized) return b1t;
  const Vector d2 = normalization_degrees(complex).d2;
  return diagonal(d2.cwiseSqrt()) * b1t;
}

SparseMatrix curl_operator(const OrientedComplex& complex, Mode mode) {
  if (mode == Mode::unnormalized) return complex.b2();
  const Vector d2 = normalization_degrees(complex).d2;
  return diagonal(d2.cwiseSqrt().cwiseInverse()) * complex.b2();
}

namespace {

Vector project_dense(const SparseMatrix& a, const Vector& f) {
  if (a.cols() == 0 || a.nonZeros() == 0) return Vector::Zero(f.size());
  const Matrix dense(a);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(dense);
  const Vector x = cod.solve(f);
  return dense * x;
}

Vector project_iterative(const SparseMatrix& a, const Vector& f, double tolerance,
                         int& iterations) {
  if (a.cols() == 0 || a.nonZeros() == 0) return Vector::Zero(f.size());
  LsqrOptions opts;
  opts.atol = tolerance;
  opts.btol = tolerance;
  opts.max_iterations = std::max<int>(50, 10 * static_cast<int>(f.size()));

  Vector projection = Vector::Zero(f.size());
  Vector rhs = f;
  // One refinement sweep on the residual recovers digits LSQR loses to
  // rounding in the bidiagonalization.
  for (int pass = 0; pass < 2; ++pass) {
    auto res = lsqr(a, rhs, opts);
    iterations += res.iterations;
    if (!res.converged) {
      throw SolverError(fmt::format("LSQR did not converge after {} iterations "
                                    "(residual {:.3e}, normal residual {:.3e})",
                                    res.iterations, res.residual_norm,
                                    res.normal_residual_norm),
                        res.iterations, res.residual_norm);
    }
    projection += a * res.x;
    rhs = f - projection;
    if (res.normal_residual_norm <= tolerance * res.anorm * res.residual_norm) break;
  }
  return projection;
}

}  // namespace

HodgeDecomposition decompose(const Vector& flow, const OrientedComplex& complex,
                             const DecomposeOptions& options) {
  if (static_cast<std::size_t>(flow.size()) != complex.n1()) {
    throw std::invalid_argument(fmt::format("flow has {} entries but the complex has {} edges",
                                            flow.size(), complex.n1()));
  }
  if (!(options.solver_tolerance > 0.0)) {
    throw std::invalid_argument("solver tolerance must be positive");
  }
  HodgeDecomposition out;
  out.mode = options.mode;
  out.method = options.method;
  if (out.method == ProjectionMethod::automatic) {
    out.method = complex.n1() <= options.dense_edge_limit ? ProjectionMethod::dense
                                                         : ProjectionMethod::iterative;
  }

  const SparseMatrix grad = gradient_operator(complex, options.mode);
  const SparseMatrix curl = curl_operator(complex, options.mode);
  if (out.method == ProjectionMethod::dense) {
    out.gradient = project_dense(grad, flow);
    out.curl = project_dense(curl, flow);
  } else {
    out.gradient = project_iterative(grad, flow, options.solver_tolerance, out.iterations);
    out.curl = project_iterative(curl, flow, options.solver_tolerance, out.iterations);
  }
  out.harmonic = flow - out.gradient - out.curl;
  out.residual_norm = (flow - out.gradient - out.curl - out.harmonic).norm();
  return out;
}

namespace {

void fix_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double peak = vectors.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) >= peak - 1e-9 * peak) {
        if (vectors(r, c) < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

double gap_ratio(double largest_kept, double smallest_rejected, bool have_kept,
                 bool have_rejected) {
  if (!have_kept || !have_rejected) return 0.0;
  if (smallest_rejected <= 0.0) return 1.0;
  return std::max(largest_kept, 0.0) / smallest_rejected;
}

// Largest eigenvalue of a symmetric PSD matrix by single-vector Lanczos.
double largest_eigenvalue(const SparseMatrix& s) {
  const Eigen::Index n = s.rows();
  const int steps = static_cast<int>(std::min<Eigen::Index>(n, 60));
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Matrix q(n, steps);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  v.normalize();
  Vector alpha(steps);
  Vector beta = Vector::Zero(steps);
  int m = 0;
  for (int j = 0; j < steps; ++j) {
    q.col(j) = v;
    ++m;
    Vector w = s * v;
    alpha(j) = v.dot(w);
    w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
    w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
    const double b = w.norm();
    if (b < 1e-12 * std::abs(alpha(j)) || j + 1 == steps) break;
    beta(j) = b;
    v = w / b;
  }
  Matrix t = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    t(j, j) = alpha(j);
    if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(t, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

struct KernelEstimate {
  Matrix vectors;
  double gap = 0.0;
  double cutoff = 0.0;
  bool saturated = false;
};

KernelEstimate kernel_dense(const SparseMatrix& s, double tolerance) {
  KernelEstimate out;
  Eigen::SelfAdjointEigenSolver<Matrix> eig{Matrix(s)};
  const Vector& values = eig.eigenvalues();
  const double lambda_max = values(values.size() - 1);
  out.cutoff = tolerance * lambda_max;
  Eigen::Index kept = 0;
  while (kept < values.size() && values(kept) < out.cutoff) ++kept;
  out.vectors = eig.eigenvectors().leftCols(kept);
  out.gap = gap_ratio(kept > 0 ? values(kept - 1) : 0.0,
                      kept < values.size() ? values(kept) : 0.0, kept > 0,
                      kept < values.size());
  return out;
}

// Shift-invert block Lanczos with full reorthogonalization: a block Krylov
// space of (S + shift I)^-1 followed by Rayleigh-Ritz on S itself.
KernelEstimate kernel_lanczos(const SparseMatrix& s, double tolerance, Eigen::Index block) {
  const Eigen::Index n = s.rows();
  KernelEstimate out;
  const double lambda_max = largest_eigenvalue(s);
  out.cutoff = tolerance * lambda_max;
  const double shift = 1e-6 * lambda_max;

  SparseMatrix shifted = s;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw SolverError("shifted Laplacian factorization failed", 0, 0.0);
  }

  block = std::min(block, n);
  std::mt19937_64 rng(0xb10c);
  std::normal_distribution<double> normal;
  Matrix x(n, block);
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = normal(rng);
  }

  constexpr int kBlocks = 4;
  Matrix basis(n, 0);
  auto append = [&](Matrix cand) {
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) cand -= basis * (basis.transpose() * cand);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(cand);
    qr.setThreshold(1e-10);
    const Eigen::Index r = qr.rank();
    if (r == 0) return Matrix(n, 0);
    Matrix q = qr.householderQ() * Matrix::Identity(n, r);
    Matrix grown(n, basis.cols() + r);
    grown << basis, q;
    basis = std::move(grown);
    return q;
  };

  Matrix current = append(x);
  for (int k = 1; k < kBlocks && current.cols() > 0 && basis.cols() < n; ++k) {
    Matrix next = solver.solve(current);
    current = append(std::move(next));
  }

  const Matrix sq = s * basis;
  Matrix t = basis.transpose() * sq;
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(t);
  const Vector& values = eig.eigenvalues();
  Eigen::Index kept = 0;
  while (kept < values.size() && values(kept) < out.cutoff) ++kept;
  out.vectors = basis * eig.eigenvectors().leftCols(kept);
  out.gap = gap_ratio(kept > 0 ? values(kept - 1) : 0.0,
                      kept < values.size() ? values(kept) : 0.0, kept > 0,
                      kept < values.size());
  out.saturated = kept >= block && block < n;
  return out;
}

}  // namespace

HarmonicBasis harmonic_basis(const OrientedComplex& complex, const HarmonicOptions& options) {
  if (!(options.eigen_tolerance > 0.0)) {
    throw std::invalid_argument("eigen tolerance must be positive");
  }
  HarmonicBasis out;
  out.mode = options.mode;
  const auto n1 = static_cast<Eigen::Index>(complex.n1());
  if (n1 == 0) {
    out.vectors = Matrix(0, 0);
    return out;
  }
  const SparseMatrix s = options.mode == Mode::normalized
                             ? laplacian_l1_symmetrized(complex).matrix
                             : laplacian_l1(complex).matrix;

  EigenMethod method = options.method;
  if (method == EigenMethod::automatic) {
    method = complex.n1() <= options.dense_edge_limit ? EigenMethod::dense : EigenMethod::lanczos;
  }

  KernelEstimate est;
  if (method == EigenMethod::dense) {
    est = kernel_dense(s, options.eigen_tolerance);
  } else {
    const auto expected = static_cast<Eigen::Index>(betti(complex).beta1);
    Eigen::Index block = expected + 8;
    for (;;) {
      est = kernel_lanczos(s, options.eigen_tolerance, block);
      if (!est.saturated) break;
      block *= 2;
    }
    if (est.vectors.cols() != expected) {
      out.warnings.push_back(fmt::format(
          "Lanczos kernel dimension {} differs from rank-nullity beta1 {}",
          est.vectors.cols(), expected));
    }
  }
  out.vectors = std::move(est.vectors);
  out.eigenvalue_gap = est.gap;
  out.tolerance = est.cutoff;
  fix_signs(out.vectors);
  if (out.eigenvalue_gap > options.gap_warning_ratio) {
    out.warnings.push_back(fmt::format(
        "ambiguous spectral gap: kept/rejected eigenvalue ratio {:.3e} exceeds {:.3e}",
        out.eigenvalue_gap, options.gap_warning_ratio));
  }
  return out;
}

std::string laplacian_triplets(const HodgeLaplacian& laplacian) {
  std::string out;
  const SparseMatrix& m = laplacian.matrix;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      out += fmt::format("{} {} {:.17g}\n", it.row(), it.col(), it.value());
    }
  }
  return out;
}

}  // namespace hodgeflow
