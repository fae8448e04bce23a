#pragma once

#include <cstdint>
#include <random>

#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

using Rng = std::mt19937_64;

/// Engine seeded from (seed, stream) through std::seed_seq, so that distinct
/// streams of one master seed are decorrelated and reproducible.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Factor L with L L^T = cov for a symmetric PSD matrix. Negative roundoff
/// eigenvalues are clamped to zero, so singular covariances are allowed.
Matrix covariance_factor(const Matrix& cov);

/// n draws of N(0, 1).
Vector standard_normal(Eigen::Index n, Rng& rng);

/// Draw from N(mean, L L^T) given the factor L.
Vector sample_gaussian(const Vector& mean, const Matrix& factor, Rng& rng);

}  // namespace ldsmdl
