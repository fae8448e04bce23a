#include "ldsmdl/em.hpp"

#include <cmath>
#include <exception>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ldsmdl/errors.hpp"
#include "ldsmdl/random.hpp"
#include "ldsmdl/stability.hpp"
#include "linalg_internal.hpp"

namespace ldsmdl {

namespace {

struct SufficientStats {
  Matrix state_all;     // sum_{t=1..T} Z_t
  Matrix state_prev;    // sum_{t=1..T-1} Z_t
  Matrix state_next;    // sum_{t=2..T} Z_t
  Matrix cross;         // sum_{t=2..T} Z_{t,t-1}
  Matrix obs_state;     // sum_t y_t x_hat_t^T
  Matrix obs_obs;       // sum_t y_t y_t^T
  int length = 0;
};

SufficientStats accumulate(const SmoothedPosterior& posterior,
                           const SequenceData& data, int d) {
  const int T = data.length();
  const int d_out = data.dim();
  SufficientStats s;
  s.length = T;
  s.state_all = Matrix::Zero(d, d);
  s.state_prev = Matrix::Zero(d, d);
  s.cross = Matrix::Zero(d, d);
  s.obs_state = Matrix::Zero(d_out, d);
  s.obs_obs = Matrix::Zero(d_out, d_out);
  for (int t = 0; t < T; ++t) {
    s.state_all += posterior.Z[t];
    if (t + 1 < T) {
      s.state_prev += posterior.Z[t];
      s.cross += posterior.Z_cross[t];
    }
    const Vector y = data.at(t);
    s.obs_state.noalias() += y * posterior.means[t].transpose();
    s.obs_obs.noalias() += y * y.transpose();
  }
  s.state_next = s.state_all - posterior.Z[0];
  return s;
}

// right * m^{-1} for symmetric PD m.
Matrix solve_right(const Matrix& right, const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrize(m));
  if (llt.info() != Eigen::Success ||
      (m.rows() > 1 && llt.rcond() < kConditionFloor)) {
    throw RankDeficiencyError(std::string("m_step: ") + what +
                              " is singular (redundant latent dimensions)");
  }
  return llt.solve(right.transpose()).transpose();
}

Matrix floor_covariance(const Matrix& m, bool& floored) {
  const Matrix sym = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& values = es.eigenvalues();
  if (values.minCoeff() >= kCovarianceFloor) return sym;
  floored = true;
  const Vector clipped = values.cwiseMax(kCovarianceFloor);
  return symmetrize(es.eigenvectors() * clipped.asDiagonal() *
                    es.eigenvectors().transpose());
}

// (1/(T-1)) sum_{t>=2} E[(x_t - A x_{t-1})(x_t - A x_{t-1})^T]
Matrix transition_noise(const Matrix& a, const SufficientStats& s) {
  const Matrix ac = a * s.cross.transpose();
  return (s.state_next - ac - ac.transpose() + a * s.state_prev * a.transpose()) /
         static_cast<double>(s.length - 1);
}

double gaussian_expectation(const Matrix& cov, const Matrix& scatter, double count,
                            const char* what) {
  const auto llt = detail::checked_llt(symmetrize(cov), 0.0, what);
  const int n = static_cast<int>(cov.rows());
  const double trace = llt.solve(scatter).trace();
  return -0.5 * (count * (n * detail::kLog2Pi + detail::llt_log_det(llt)) + trace);
}

}  // namespace

void EmConfig::validate() const {
  if (!(eps > 0.0)) throw DomainError("EmConfig: eps must be positive");
  if (max_iters < 1) throw DomainError("EmConfig: max_iters must be >= 1");
  if (n_restarts < 1) throw DomainError("EmConfig: n_restarts must be >= 1");
  if (observable_state && !(observable_noise > 0.0)) {
    throw DomainError("EmConfig: observable_noise must be positive");
  }
}

MStepResult m_step(const SmoothedPosterior& posterior, const SequenceData& data,
                   int d, const MStepOptions& options) {
  const int T = data.length();
  if (T < 2) throw InsufficientDataError("m_step: need at least two time steps");
  if (posterior.length() != T || static_cast<int>(posterior.Z_cross.size()) != T - 1) {
    throw DimensionError("m_step: posterior length does not match data");
  }
  if (posterior.means[0].size() != d) {
    throw DimensionError("m_step: posterior latent dimension does not match d");
  }
  const int d_out = data.dim();
  const SufficientStats s = accumulate(posterior, data, d);

  MStepResult out;
  LdsParams& p = out.params;

  p.A = solve_right(s.cross, s.state_prev, "sum of Z_{t-1}");
  if (options.enforce_stability) {
    out.rescaled = !is_stable(p.A);
    if (out.rescaled) p.A = enforce_stability(p.A);
  }
  p.R1 = floor_covariance(transition_noise(p.A, s), out.floored);

  if (options.observable_state) {
    if (d != d_out) {
      throw DimensionError("m_step: observable-state mode needs d == d_out");
    }
    p.C = Matrix::Identity(d_out, d);
    p.R2 = options.observable_noise * Matrix::Identity(d_out, d_out);
  } else {
    p.C = solve_right(s.obs_state, s.state_all, "sum of Z_t");
    p.R2 = floor_covariance(
        (s.obs_obs - p.C * s.obs_state.transpose()) / static_cast<double>(T),
        out.floored);
  }

  p.mu0 = posterior.means[0];
  p.R0 = floor_covariance(posterior.Z[0] - p.mu0 * p.mu0.transpose(), out.floored);
  return out;
}

double expected_complete_loglik(const LdsParams& params,
                                const SmoothedPosterior& posterior,
                                const SequenceData& data) {
  const int d = params.latent_dim();
  const SufficientStats s = accumulate(posterior, data, d);
  const int T = s.length;

  const Vector& x1 = posterior.means[0];
  const Matrix init_scatter = posterior.Z[0] - x1 * params.mu0.transpose() -
                              params.mu0 * x1.transpose() +
                              params.mu0 * params.mu0.transpose();
  double total = gaussian_expectation(params.R0, init_scatter, 1.0, "R0");

  if (T > 1) {
    const Matrix trans_scatter = transition_noise(params.A, s) * (T - 1.0);
    total += gaussian_expectation(params.R1, trans_scatter, T - 1.0, "R1");
  }

  const Matrix cy = params.C * s.obs_state.transpose();
  const Matrix obs_scatter = s.obs_obs - cy - cy.transpose() +
                             params.C * s.state_all * params.C.transpose();
  total += gaussian_expectation(params.R2, obs_scatter, T, "R2");
  return total;
}

FitResult em_fit(const SequenceData& data, int d, const LdsParams& init,
                 const EmConfig& config) {
  config.validate();
  data.validate(2);
  init.validate();
  if (init.latent_dim() != d || init.obs_dim() != data.dim()) {
    throw DimensionError("em_fit: initial parameters do not match (d, d_out)");
  }
  if (!is_stable(init.A)) {
    throw InstabilityError("em_fit: initial transition matrix is unstable");
  }

  const MStepOptions options{.enforce_stability = true,
                             .observable_state = config.observable_state,
                             .observable_noise = config.observable_noise};
  FitResult fit;
  fit.params = init;
  bool last_rescaled = false;
  bool last_floored = false;
  while (true) {
    const FilterResult filtered = kalman_filter(fit.params, data);
    if (!std::isfinite(filtered.loglik)) {
      throw DegeneracyError("em_fit: non-finite log-likelihood");
    }
    fit.loglik = filtered.loglik;
    fit.loglik_trace.push_back(filtered.loglik);
    fit.rescaled.push_back(last_rescaled);
    fit.floored.push_back(last_floored);

    const std::size_t n = fit.loglik_trace.size();
    if (n >= 2 && std::abs(fit.loglik_trace[n - 1] - fit.loglik_trace[n - 2]) < config.eps) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= config.max_iters) break;

    const SmoothedPosterior posterior = rts_smooth(fit.params, filtered);
    MStepResult next = m_step(posterior, data, d, options);
    fit.params = std::move(next.params);
    last_rescaled = next.rescaled;
    last_floored = next.floored;
    ++fit.iterations;
  }
  return fit;
}

LdsParams random_initialization(const SequenceData& data, int d,
                                std::uint64_t seed, std::uint64_t restart,
                                const EmConfig& config) {
  data.validate(1);
  if (d < 1) throw DomainError("random_initialization: d must be >= 1");
  const int d_out = data.dim();
  Rng rng = make_rng(seed, restart);

  const Matrix gaussian = Eigen::Map<Matrix>(standard_normal(d * d, rng).data(), d, d);
  const Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix orthogonal = qr.householderQ();
  const Vector signs = qr.matrixQR().diagonal().unaryExpr(
      [](double v) { return v < 0.0 ? -1.0 : 1.0; });
  orthogonal = orthogonal * signs.asDiagonal();

  LdsParams p;
  p.A = 0.5 * orthogonal;
  if (config.observable_state) {
    if (d != d_out) {
      throw DimensionError("random_initialization: observable-state mode needs d == d_out");
    }
    p.C = Matrix::Identity(d_out, d);
    p.R2 = config.observable_noise * Matrix::Identity(d_out, d_out);
  } else {
    p.C = Eigen::Map<Matrix>(standard_normal(d_out * d, rng).data(), d_out, d);
    p.R2 = Matrix::Identity(d_out, d_out);
  }
  p.R1 = Matrix::Identity(d, d);
  p.R0 = Matrix::Identity(d, d);
  const Vector mean = data.Y.colwise().mean().transpose();
  p.mu0 = p.C.completeOrthogonalDecomposition().pseudoInverse() * mean;
  return p;
}

FitResult multi_restart_fit(const SequenceData& data, int d, const EmConfig& config) {
  config.validate();
  std::exception_ptr last_error;
  FitResult best;
  bool have_best = false;
  for (int r = 0; r < config.n_restarts; ++r) {
    try {
      const LdsParams init = random_initialization(data, d, config.seed, r, config);
      FitResult fit = em_fit(data, d, init, config);
      fit.restart = r;
      if (!have_best || fit.loglik > best.loglik) {
        best = std::move(fit);
        have_best = true;
      }
    } catch (const Error&) {
      last_error = std::current_exception();
    }
  }
  if (!have_best) std::rethrow_exception(last_error);
  return best;
}

}  // namespace ldsmdl
