#include "ldsmdl/stability.hpp"

#include <string>

#include <Eigen/Eigenvalues>

#include "ldsmdl/errors.hpp"

namespace ldsmdl {

namespace {

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw DimensionError(std::string(what) + ": matrix has non-finite entries");
  }
}

}  // namespace

double spectral_radius(const Matrix& a) {
  require_square_finite(a, "spectral_radius");
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw DimensionError("spectral_radius: eigenvalue iteration did not converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const Matrix& a) {
  return spectral_radius(a) < 1.0 - kStabilityMargin;
}

Matrix enforce_stability(const Matrix& a) {
  const double rho = spectral_radius(a);
  if (rho < 1.0 - kStabilityMargin) return a;
  return a / (kStabilityRescale * rho);
}

}  // namespace ldsmdl
