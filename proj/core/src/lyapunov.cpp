#include "ldsmdl/lyapunov.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ldsmdl/errors.hpp"
#include "ldsmdl/stability.hpp"

namespace ldsmdl {

namespace {

constexpr double kDoublingTolerance = 1e-12;
constexpr int kMaxDoublingSteps = 64;

// (I - A (x) A) vec(Q) = vec(W), column-major vec.
Matrix solve_vectorized(const Matrix& a, const Matrix& w) {
  const Eigen::Index n = a.rows();
  const Eigen::Index n2 = n * n;
  Matrix system = Matrix::Identity(n2, n2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      system.block(i * n, j * n, n, n).noalias() -= a(i, j) * a;
    }
  }
  // Kronecker layout: vec(A Q A^T) = (A (x) A) vec(Q), block (i, j) = a_ij A.
  const Eigen::PartialPivLU<Matrix> lu(system);
  const Eigen::Map<const Vector> rhs(w.data(), n2);
  Vector x = lu.solve(rhs);
  // One step of iterative refinement keeps the residual at roundoff level.
  x += lu.solve(rhs - system * x);
  Matrix q = Eigen::Map<Matrix>(x.data(), n, n);
  return symmetrize(q);
}

// Q_{k+1} = Q_k + A_k Q_k A_k^T,  A_{k+1} = A_k^2.
Matrix solve_doubling(const Matrix& a, const Matrix& w) {
  Matrix q = w;
  Matrix ak = a;
  for (int step = 0; step < kMaxDoublingSteps; ++step) {
    const Matrix increment = ak * q * ak.transpose();
    q += increment;
    ak = ak * ak;
    if (increment.norm() <= kDoublingTolerance * std::max(1.0, q.norm())) break;
  }
  return symmetrize(q);
}

}  // namespace

Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& w) {
  if (a.rows() != a.cols() || w.rows() != w.cols() || a.rows() != w.rows()) {
    throw DimensionError("solve_discrete_lyapunov: A and W must be square and of equal size");
  }
  if (!w.allFinite()) {
    throw DimensionError("solve_discrete_lyapunov: W has non-finite entries");
  }
  const double rho = spectral_radius(a);
  if (rho >= 1.0 - kStabilityMargin) {
    throw InstabilityError("solve_discrete_lyapunov: spectral radius " +
                           std::to_string(rho) +
                           " >= 1, no positive semidefinite solution");
  }
  if (a.rows() <= kLyapunovDirectMaxDim) return solve_vectorized(a, w);
  return solve_doubling(a, w);
}

double stationary_obs_log_det(const LdsParams& params, const Matrix& q) {
  if (q.rows() != params.latent_dim() || q.cols() != params.latent_dim()) {
    throw DimensionError("stationary_obs_log_det: Q must be d x d");
  }
  const Matrix s = symmetrize(params.C * q * params.C.transpose() + params.R2);
  const Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw DegeneracyError(
        "stationary_obs_log_det: C Q C^T + R2 is not positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw DegeneracyError(
        "stationary_obs_log_det: C Q C^T + R2 is not positive definite");
  }
  return 2.0 * diag.array().log().sum();
}

}  // namespace ldsmdl
