#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace ldsmdl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerances used when validating covariance blocks.
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-10;

/// Parameters of the time-invariant linear-Gaussian state-space model
///
///   x_1     ~ N(mu0, R0)
///   x_{t+1} = A x_t + w_t,   w_t ~ N(0, R1)
///   y_t     = C x_t + v_t,   v_t ~ N(0, R2)
///
/// The latent dimension d and the observation dimension d_out are implied by
/// the shapes of A and C.
struct LdsParams {
  Matrix A;    // d x d
  Matrix C;    // d_out x d
  Matrix R1;   // d x d
  Matrix R2;   // d_out x d_out
  Vector mu0;  // d
  Matrix R0;   // d x d

  [[nodiscard]] int latent_dim() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] int obs_dim() const { return static_cast<int>(C.rows()); }

  /// Throws DimensionError on inconsistent shapes, non-finite entries, or
  /// covariance blocks that are not symmetric PSD within 1e-10.
  void validate() const;

  /// Zero matrices of the right shapes.
  static LdsParams zeros(int d, int d_out);
};

/// Observation sequence: one row per time step.
struct SequenceData {
  Matrix Y;  // T x d_out
  std::optional<std::uint64_t> seed;

  SequenceData() = default;
  explicit SequenceData(Matrix y, std::optional<std::uint64_t> s = std::nullopt)
      : Y(std::move(y)), seed(s) {}

  [[nodiscard]] int length() const { return static_cast<int>(Y.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(Y.cols()); }

  /// Observation at time index t (0-based) as a column vector.
  [[nodiscard]] Vector at(int t) const { return Y.row(t).transpose(); }

  /// Throws DimensionError on non-finite entries or an empty matrix, and
  /// InsufficientDataError when fewer than `min_length` rows are present.
  void validate(int min_length = 1) const;
};

struct ModelOrderBounds {
  int d_min = 1;
  int d_max = 1;

  /// Throws DomainError unless 1 <= d_min <= d_max.
  void validate() const;
};

/// Symmetric part (M + M^T) / 2.
Matrix symmetrize(const Matrix& m);

/// True when `m` is symmetric to `sym_tol` and its smallest eigenvalue is at
/// least -psd_tol.
bool is_symmetric_psd(const Matrix& m, double sym_tol = kSymmetryTolerance,
                      double psd_tol = kPsdTolerance);

}  // namespace ldsmdl
