#include "ldsmdl/random.hpp"

#include <Eigen/Eigenvalues>

namespace ldsmdl {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Matrix covariance_factor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(cov));
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal();
}

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

Vector sample_gaussian(const Vector& mean, const Matrix& factor, Rng& rng) {
  return mean + factor * standard_normal(factor.cols(), rng);
}

}  // namespace ldsmdl
