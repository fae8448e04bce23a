#pragma once

#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

/// Spectral radii at or above 1 - kStabilityMargin count as unstable.
inline constexpr double kStabilityMargin = 1e-9;

/// Factor applied on top of the spectral radius when an unstable transition
/// matrix is pulled back inside the unit circle.
inline constexpr double kStabilityRescale = 1.1;

/// max_i |lambda_i(A)| over the (complex) eigenvalues of a square matrix.
double spectral_radius(const Matrix& a);

/// True when spectral_radius(a) < 1 - kStabilityMargin.
bool is_stable(const Matrix& a);

/// Returns `a` unchanged when it is stable, otherwise a / (1.1 * rho(a)), whose
/// spectral radius is 1/1.1.
Matrix enforce_stability(const Matrix& a);

}  // namespace ldsmdl
