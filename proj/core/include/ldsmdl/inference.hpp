#pragma once

#include <vector>

#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

/// Innovation covariances whose reciprocal condition number falls below this
/// are treated as singular.
inline constexpr double kConditionFloor = 1e-12;

/// Forward pass. Index t (0-based) holds the quantities for time t + 1.
struct FilterResult {
  std::vector<Vector> pred_means;  // E[x_t | y_1..y_{t-1}]
  std::vector<Matrix> pred_covs;
  std::vector<Vector> filt_means;  // E[x_t | y_1..y_t]
  std::vector<Matrix> filt_covs;
  std::vector<double> step_loglik;  // log p(y_t | y_1..y_{t-1})
  double loglik = 0.0;              // log p(Y | theta)

  [[nodiscard]] int length() const { return static_cast<int>(filt_means.size()); }
};

/// Backward (Rauch-Tung-Striebel) pass over a FilterResult.
struct SmoothedPosterior {
  std::vector<Vector> means;       // x_hat_t = E[x_t | Y]
  std::vector<Matrix> covs;        // V_t
  std::vector<Matrix> cross_covs;  // entry t: V_{t+1,t} = Cov(x_{t+1}, x_t | Y), T-1 entries
  std::vector<Matrix> Z;           // V_t + x_hat_t x_hat_t^T
  std::vector<Matrix> Z_cross;     // entry t: V_{t+1,t} + x_hat_{t+1} x_hat_t^T

  [[nodiscard]] int length() const { return static_cast<int>(means.size()); }
};

/// Kalman filter with Joseph-form covariance updates. Throws DegeneracyError
/// when an innovation covariance is singular or its reciprocal condition number
/// is below kConditionFloor.
FilterResult kalman_filter(const LdsParams& params, const SequenceData& data);

/// RTS smoother with lag-one cross-covariances V_{t+1,t} = V_{t+1} J_t^T.
SmoothedPosterior rts_smooth(const LdsParams& params, const FilterResult& filter);

/// Convenience: rts_smooth(params, kalman_filter(params, data)).
SmoothedPosterior smooth(const LdsParams& params, const SequenceData& data);

/// sum_t log N(y_t; C x_hat_t, R2), the observation log-likelihood at the
/// smoothed state means.
double complete_data_loglik(const LdsParams& params,
                            const SmoothedPosterior& posterior,
                            const SequenceData& data);

}  // namespace ldsmdl
