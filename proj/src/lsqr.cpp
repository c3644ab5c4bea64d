#include "hodgeflow/lsqr.hpp"

#include <algorithm>
#include <cmath>

namespace hodgeflow {

LsqrResult lsqr(const SparseMatrix& a, const Vector& b, const LsqrOptions& options) {
  const Eigen::Index n = a.cols();
  LsqrResult out;
  out.x = Vector::Zero(n);
  const int max_it = options.max_iterations > 0
                         ? options.max_iterations
                         : std::max<int>(50, 10 * static_cast<int>(n));

  Vector u = b;
  double beta = u.norm();
  const double bnorm = beta;
  if (beta == 0.0 || n == 0) {
    out.residual_norm = beta;
    out.converged = true;
    return out;
  }
  u /= beta;
  Vector v = a.transpose() * u;
  double alpha = v.norm();
  if (alpha == 0.0) {
    // b is orthogonal to range(A); x = 0 is optimal.
    out.residual_norm = bnorm;
    out.converged = true;
    return out;
  }
  v /= alpha;
  Vector w = v;

  double phibar = beta;
  double rhobar = alpha;
  double anorm = 0.0;
  double rnorm = beta;
  double arnorm = alpha * beta;

  for (int it = 1; it <= max_it; ++it) {
    // Golub-Kahan bidiagonalization step.
    u = a * v - alpha * u;
    beta = u.norm();
    anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta);
    if (beta > 0.0) {
      u /= beta;
      v = a.transpose() * u - beta * v;
      alpha = v.norm();
      if (alpha > 0.0) v /= alpha;
    } else {
      alpha = 0.0;
    }

    // Plane rotation eliminating the subdiagonal beta.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    out.x += (phi / rho) * w;
    w = v - (theta / rho) * w;

    rnorm = phibar;
    arnorm = alpha * std::abs(c) * phibar;
    out.iterations = it;

    const double xnorm = out.x.norm();
    const bool ls_converged = arnorm <= options.atol * anorm * rnorm;
    const bool eq_converged =
        rnorm <= options.btol * bnorm + options.atol * anorm * xnorm;
    if (ls_converged || eq_converged || alpha == 0.0 || beta == 0.0) {
      out.converged = true;
      break;
    }
  }

  const Vector r = b - a * out.x;
  out.residual_norm = r.norm();
  out.normal_residual_norm = (a.transpose() * r).norm();
  out.anorm = anorm;
  return out;
}

}  // namespace hodgeflow
