#pragma once

#include <string>

#include <Eigen/Cholesky>

#include "ldsmdl/errors.hpp"
#include "ldsmdl/lds_params.hpp"

namespace ldsmdl::detail {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// Cholesky of a symmetric matrix that must be positive definite with
// reciprocal condition number at least `rcond_floor`.
inline Eigen::LLT<Matrix> checked_llt(const Matrix& m, double rcond_floor,
                                      const std::string& what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw DegeneracyError(what + " is not positive definite");
  }
  if (m.rows() > 1 && llt.rcond() < rcond_floor) {
    throw DegeneracyError(what + " is numerically singular");
  }
  return llt;
}

inline double llt_log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace ldsmdl::detail
