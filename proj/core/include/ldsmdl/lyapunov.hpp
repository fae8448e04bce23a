#pragma once

#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

/// Largest latent dimension solved through the Kronecker-vectorized linear
/// system; larger problems use the doubling iteration.
inline constexpr int kLyapunovDirectMaxDim = 32;

/// Solves Q = A Q A^T + W for a stable A and symmetric PSD W.
///
/// The solution equals sum_{m>=0} A^m W (A^T)^m, i.e. the stationary covariance
/// of x_{t+1} = A x_t + w_t with w_t ~ N(0, W). Throws InstabilityError when
/// rho(A) >= 1 - kStabilityMargin and DimensionError on shape mismatch.
Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& w);

/// log det(C Q C^T + R2): log-volume of the stationary observation covariance.
/// Throws DegeneracyError when the matrix is not positive definite.
double stationary_obs_log_det(const LdsParams& params, const Matrix& q);

}  // namespace ldsmdl
