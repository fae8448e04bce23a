#include "ldsmdl/simulate.hpp"

#include <string>

#include "ldsmdl/errors.hpp"
#include "ldsmdl/random.hpp"
#include "ldsmdl/stability.hpp"

namespace ldsmdl {

SequenceData simulate(const LdsParams& params, int length, int burn_in,
                      std::uint64_t seed) {
  params.validate();
  if (length < 1) throw DomainError("simulate: length must be >= 1");
  if (burn_in < 0) throw DomainError("simulate: burn_in must be >= 0");
  if (!is_stable(params.A)) {
    throw InstabilityError("simulate: transition matrix has spectral radius " +
                           std::to_string(spectral_radius(params.A)));
  }

  const Matrix state_factor = covariance_factor(params.R1);
  const Matrix obs_factor = covariance_factor(params.R2);
  const Vector zero_state = Vector::Zero(params.latent_dim());
  const Vector zero_obs = Vector::Zero(params.obs_dim());

  Rng rng = make_rng(seed);
  Vector x = sample_gaussian(params.mu0, covariance_factor(params.R0), rng);
  Matrix y(length, params.obs_dim());
  const int total = burn_in + length;
  for (int t = 0; t < total; ++t) {
    const Vector obs = params.C * x + sample_gaussian(zero_obs, obs_factor, rng);
    if (t >= burn_in) y.row(t - burn_in) = obs.transpose();
    x = params.A * x + sample_gaussian(zero_state, state_factor, rng);
  }
  return SequenceData(std::move(y), seed);
}

}  // namespace ldsmdl
