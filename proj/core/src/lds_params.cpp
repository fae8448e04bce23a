#include "ldsmdl/lds_params.hpp"

#include <string>

#include "ldsmdl/errors.hpp"

namespace ldsmdl {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string("LdsParams: ") + name + " has shape " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!m.allFinite()) {
    throw DomainError(std::string("LdsParams: ") + name + " has non-finite entries");
  }
}

void require_covariance(const Matrix& m, const char* name) {
  if (!is_symmetric_psd(m)) {
    throw DomainError(std::string("LdsParams: ") + name +
                      " is not symmetric positive semidefinite");
  }
}

}  // namespace

void LdsParams::validate() const {
  const Eigen::Index d = A.rows();
  const Eigen::Index d_out = C.rows();
  if (d < 1 || d_out < 1) {
    throw DimensionError("LdsParams: latent and observation dimensions must be positive");
  }
  require_shape(A, d, d, "A");
  require_shape(C, d_out, d, "C");
  require_shape(R1, d, d, "R1");
  require_shape(R2, d_out, d_out, "R2");
  require_shape(R0, d, d, "R0");
  if (mu0.size() != d || !mu0.allFinite()) {
    throw DimensionError("LdsParams: mu0 must be a finite vector of length d");
  }
  require_covariance(R1, "R1");
  require_covariance(R2, "R2");
  require_covariance(R0, "R0");
}

LdsParams LdsParams::zeros(int d, int d_out) {
  LdsParams p;
  p.A = Matrix::Zero(d, d);
  p.C = Matrix::Zero(d_out, d);
  p.R1 = Matrix::Zero(d, d);
  p.R2 = Matrix::Zero(d_out, d_out);
  p.mu0 = Vector::Zero(d);
  p.R0 = Matrix::Zero(d, d);
  return p;
}

void SequenceData::validate(int min_length) const {
  if (Y.rows() == 0 || Y.cols() == 0) {
    throw DimensionError("SequenceData: empty observation matrix");
  }
  if (!Y.allFinite()) {
    throw DimensionError("SequenceData: non-finite observation");
  }
  if (Y.rows() < min_length) {
    throw InsufficientDataError("SequenceData: need at least " +
                                std::to_string(min_length) + " time steps, got " +
                                std::to_string(Y.rows()));
  }
}

void ModelOrderBounds::validate() const {
  if (d_min < 1 || d_max < d_min) {
    throw DomainError("ModelOrderBounds: require 1 <= d_min <= d_max, got [" +
                      std::to_string(d_min) + ", " + std::to_string(d_max) + "]");
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric_psd(const Matrix& m, double sym_tol, double psd_tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > sym_tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -psd_tol;
}

}  // namespace ldsmdl
