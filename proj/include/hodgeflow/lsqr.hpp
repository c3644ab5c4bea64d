// LSQR for sparse least squares, after Paige & Saunders (1982).
#pragma once

#include <stdexcept>
#include <string>

#include "hodgeflow/complex.hpp"

namespace hodgeflow {

struct LsqrOptions {
  double atol = 1e-10;  // ||A'r|| <= atol * ||A|| * ||r||
  double btol = 1e-10;  // ||r|| <= btol * ||b|| + atol * ||A|| * ||x||
  int max_iterations = 0;  // 0: 10 * cols, at least 50
};

struct LsqrResult {
  Vector x;
  int iterations = 0;
  double residual_norm = 0.0;         // ||b - A x||
  double normal_residual_norm = 0.0;  // ||A'(b - A x)||
  double anorm = 0.0;                 // Frobenius estimate of ||A||
  bool converged = false;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// Minimizes ||A x - b||. Converges to the minimum-norm solution when A is
// rank deficient. Never throws; check `converged`.
LsqrResult lsqr(const SparseMatrix& a, const Vector& b, const LsqrOptions& options = {});

}  // namespace hodgeflow
