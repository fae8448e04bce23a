#pragma once

#include <cstdint>
#include <vector>

#include "ldsmdl/inference.hpp"
#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

/// Eigenvalue floor applied to re-estimated covariance blocks.
inline constexpr double kCovarianceFloor = 1e-10;

struct EmConfig {
  double eps = 1e-4;       // stop when |L(t) - L(t-1)| < eps
  int max_iters = 300;
  int n_restarts = 10;
  std::uint64_t seed = 0;

  /// Observable-state mode: C is pinned to the identity and R2 to
  /// observable_noise * I; only A, R1, mu0 and R0 are learned. Requires the
  /// latent and observation dimensions to agree (see delay_embed).
  bool observable_state = false;
  double observable_noise = 1e-6;

  /// Throws DomainError on eps <= 0, max_iters < 1 or n_restarts < 1.
  void validate() const;
};

struct FitResult {
  LdsParams params;
  double loglik = 0.0;
  std::vector<double> loglik_trace;
  /// Parallel to loglik_trace: entry k is true when the parameters scored at
  /// k came out of an M-step whose transition matrix had to be rescaled.
  std::vector<bool> rescaled;
  /// Parallel to loglik_trace: an eigenvalue floor was applied to a covariance.
  std::vector<bool> floored;
  bool converged = false;
  int iterations = 0;  // number of M-steps performed
  int restart = 0;     // restart index that produced this fit
};

struct MStepOptions {
  /// Rescale an unstable A and re-estimate R1 for the rescaled A.
  bool enforce_stability = false;
  bool observable_state = false;
  double observable_noise = 1e-6;
};

struct MStepResult {
  LdsParams params;
  bool rescaled = false;
  bool floored = false;
};

/// Closed-form maximizer of the expected complete-data log-likelihood:
///
///   A  = (sum_{t>=2} Z_{t,t-1}) (sum_{t>=2} Z_{t-1})^{-1}
///   C  = (sum_t y_t x_hat_t^T) (sum_t Z_t)^{-1}
///   R1 = (sum_{t>=2} Z_t - A sum_{t>=2} Z_{t-1,t}) / (T - 1)
///   R2 = sum_t (y_t y_t^T - C x_hat_t y_t^T) / T
///   mu0 = x_hat_1,  R0 = Z_1 - x_hat_1 x_hat_1^T
///
/// Covariances are symmetrized and eigenvalue-floored at kCovarianceFloor.
/// Throws RankDeficiencyError when a second-moment accumulator is singular.
MStepResult m_step(const SmoothedPosterior& posterior, const SequenceData& data,
                   int d, const MStepOptions& options = {});

/// E_{X|Y}[log p(X, Y | params)] under a fixed posterior.
double expected_complete_loglik(const LdsParams& params,
                                const SmoothedPosterior& posterior,
                                const SequenceData& data);

/// Alternates smoothing and m_step (with stability enforcement) starting from
/// `init` until the log-likelihood changes by less than config.eps or
/// config.max_iters M-steps were taken. Errors from inference and the M-step
/// propagate.
FitResult em_fit(const SequenceData& data, int d, const LdsParams& init,
                 const EmConfig& config);

/// Random starting point for restart `restart` of master seed `seed`:
/// A = 0.5 * (random orthogonal), C ~ N(0, 1) entrywise, R1 = R2 = R0 = I and
/// mu0 = pinv(C) * mean(y).
LdsParams random_initialization(const SequenceData& data, int d,
                                std::uint64_t seed, std::uint64_t restart,
                                const EmConfig& config);

/// Best (highest log-likelihood) of config.n_restarts em_fit runs, restart r
/// started from random_initialization(data, d, config.seed, r). Rethrows the
/// last error when every restart fails.
FitResult multi_restart_fit(const SequenceData& data, int d, const EmConfig& config);

}  // namespace ldsmdl
