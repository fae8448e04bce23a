#include "ldsmdl/inference.hpp"

#include <string>

#include "inference_internal.hpp"
#include "linalg_internal.hpp"

namespace ldsmdl {

using detail::checked_llt;
using detail::kLog2Pi;

namespace detail {

FilterResult run_filter(const LdsParams& params, const SequenceData& data) {
  const int T = data.length();
  const int d = params.latent_dim();
  const int d_out = params.obs_dim();
  const Matrix& A = params.A;
  const Matrix& C = params.C;
  const Matrix identity = Matrix::Identity(d, d);

  FilterResult out;
  out.pred_means.reserve(T);
  out.pred_covs.reserve(T);
  out.filt_means.reserve(T);
  out.filt_covs.reserve(T);
  out.step_loglik.reserve(T);

  Vector m = params.mu0;
  Matrix P = params.R0;
  for (int t = 0; t < T; ++t) {
    const Matrix PCt = P * C.transpose();
    const Matrix S = symmetrize(C * PCt + params.R2);
    const auto llt = checked_llt(S, kConditionFloor,
                                 "kalman_filter: innovation covariance at t=" +
                                     std::to_string(t + 1));
    const Vector innovation = data.at(t) - C * m;
    const Matrix K = llt.solve(PCt.transpose()).transpose();

    const Matrix IKC = identity - K * C;
    Matrix V = IKC * P * IKC.transpose() + K * params.R2 * K.transpose();
    V = symmetrize(V);
    Vector mf = m + K * innovation;

    const double quad = innovation.dot(llt.solve(innovation));
    const double step = -0.5 * (d_out * kLog2Pi + detail::llt_log_det(llt) + quad);
    out.step_loglik.push_back(step);
    out.loglik += step;

    out.pred_means.push_back(m);
    out.pred_covs.push_back(P);
    m = A * mf;
    P = symmetrize(A * V * A.transpose() + params.R1);
    out.filt_means.push_back(std::move(mf));
    out.filt_covs.push_back(std::move(V));
  }
  return out;
}

}  // namespace detail

FilterResult kalman_filter(const LdsParams& params, const SequenceData& data) {
  params.validate();
  data.validate(1);
  if (data.dim() != params.obs_dim()) {
    throw DimensionError("kalman_filter: data has " + std::to_string(data.dim()) +
                         " columns, model expects " + std::to_string(params.obs_dim()));
  }
  return detail::run_filter(params, data);
}

SmoothedPosterior rts_smooth(const LdsParams& params, const FilterResult& filter) {
  const int T = filter.length();
  if (T < 1) throw InsufficientDataError("rts_smooth: empty filter result");
  const Matrix& A = params.A;

  SmoothedPosterior out;
  out.means.resize(T);
  out.covs.resize(T);
  out.cross_covs.resize(T - 1);
  out.means[T - 1] = filter.filt_means[T - 1];
  out.covs[T - 1] = filter.filt_covs[T - 1];

  for (int t = T - 2; t >= 0; --t) {
    const Matrix& P_next = filter.pred_covs[t + 1];
    const auto llt = checked_llt(P_next, kConditionFloor,
                                 "rts_smooth: predicted covariance at t=" +
                                     std::to_string(t + 2));
    const Matrix& Vf = filter.filt_covs[t];
    // J_t = Vf A^T P_next^{-1}
    const Matrix J = llt.solve(A * Vf).transpose();
    out.means[t] = filter.filt_means[t] +
                   J * (out.means[t + 1] - filter.pred_means[t + 1]);
    out.covs[t] = symmetrize(Vf + J * (out.covs[t + 1] - P_next) * J.transpose());
    out.cross_covs[t] = out.covs[t + 1] * J.transpose();
  }

  out.Z.resize(T);
  out.Z_cross.resize(T - 1);
  for (int t = 0; t < T; ++t) {
    out.Z[t] = out.covs[t] + out.means[t] * out.means[t].transpose();
  }
  for (int t = 0; t + 1 < T; ++t) {
    out.Z_cross[t] = out.cross_covs[t] + out.means[t + 1] * out.means[t].transpose();
  }
  return out;
}

SmoothedPosterior smooth(const LdsParams& params, const SequenceData& data) {
  return rts_smooth(params, kalman_filter(params, data));
}

double complete_data_loglik(const LdsParams& params,
                            const SmoothedPosterior& posterior,
                            const SequenceData& data) {
  if (posterior.length() != data.length()) {
    throw DimensionError("complete_data_loglik: posterior and data lengths differ");
  }
  const auto llt = checked_llt(params.R2, kConditionFloor,
                               "complete_data_loglik: observation covariance R2");
  const double log_det = detail::llt_log_det(llt);
  const int d_out = params.obs_dim();
  double total = 0.0;
  for (int t = 0; t < data.length(); ++t) {
    const Vector r = data.at(t) - params.C * posterior.means[t];
    total += -0.5 * (d_out * kLog2Pi + log_det + r.dot(llt.solve(r)));
  }
  return total;
}

}  // namespace ldsmdl
