#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "ldsmdl/errors.hpp"
#include "ldsmdl/inference.hpp"
#include "oracles.hpp"

using namespace ldsmdl;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

LdsParams unit_scalar() {
  LdsParams p;
  p.A = m1(0.0);
  p.C = m1(1.0);
  p.R1 = m1(1.0);
  p.R2 = m1(1.0);
  p.R0 = m1(1.0);
  p.mu0 = Vector::Zero(1);
  return p;
}

Matrix random_orthogonal(int d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(d, d, rng));
  return qr.householderQ();
}

}  // namespace

TEST(KalmanFilter, ConjugateScalarUpdate) {
  const FilterResult f = kalman_filter(unit_scalar(), SequenceData(m1(1.0)));
  EXPECT_NEAR(f.filt_means[0](0), 0.5, 1e-15);
  EXPECT_NEAR(f.filt_covs[0](0, 0), 0.5, 1e-15);
  const double expected = -0.5 * std::log(2.0 * std::numbers::pi * 2.0) - 0.25;
  EXPECT_NEAR(f.loglik, expected, 1e-14);
  EXPECT_NEAR(f.loglik, -1.5155, 1e-4);
}

TEST(KalmanFilter, SingleStepIsMarginal) {
  std::mt19937_64 rng(3);
  const LdsParams p = oracle::random_model(3, 2, rng);
  const SequenceData y = oracle::random_sequence(1, 2, rng);
  const double marginal = oracle::gaussian_logpdf(
      y.at(0), p.C * p.mu0, p.C * p.R0 * p.C.transpose() + p.R2);
  EXPECT_NEAR(kalman_filter(p, y).loglik, marginal, 1e-12);
}

TEST(KalmanFilter, PerfectPrediction) {
  std::mt19937_64 rng(4);
  LdsParams p = oracle::random_model(2, 2, rng);
  p.R0.setZero();
  p.R2 = 1e-9 * Matrix::Identity(2, 2);
  const SequenceData y(Matrix((p.C * p.mu0).transpose()));
  const FilterResult f = kalman_filter(p, y);
  EXPECT_LE((f.filt_means[0] - p.mu0).norm(), 1e-12);
}

TEST(KalmanFilter, StepLogliksSumToTotal) {
  std::mt19937_64 rng(5);
  const LdsParams p = oracle::random_model(2, 1, rng);
  const FilterResult f = kalman_filter(p, oracle::random_sequence(12, 1, rng));
  double sum = 0.0;
  for (double v : f.step_loglik) sum += v;
  EXPECT_NEAR(sum, f.loglik, 1e-12);
}

TEST(KalmanFilter, DegenerateInnovationThrows) {
  LdsParams p = unit_scalar();
  p.R0 = m1(0.0);
  p.R2 = m1(0.0);
  EXPECT_THROW(kalman_filter(p, SequenceData(m1(1.0))), DegeneracyError);
}

TEST(KalmanFilter, RejectsDimensionMismatch) {
  EXPECT_THROW(kalman_filter(unit_scalar(), SequenceData(Matrix::Zero(3, 2))), DimensionError);
}

TEST(Smoother, SingleStepEqualsFilter) {
  std::mt19937_64 rng(6);
  const LdsParams p = oracle::random_model(2, 2, rng);
  const SequenceData y = oracle::random_sequence(1, 2, rng);
  const FilterResult f = kalman_filter(p, y);
  const SmoothedPosterior s = rts_smooth(p, f);
  EXPECT_EQ(s.means[0], f.filt_means[0]);
  EXPECT_EQ(s.covs[0], f.filt_covs[0]);
  EXPECT_TRUE(s.cross_covs.empty());
}

TEST(Smoother, ZeroTransitionKeepsFilteredMeans) {
  std::mt19937_64 rng(7);
  LdsParams p = oracle::random_model(2, 1, rng);
  p.A.setZero();
  const SequenceData y = oracle::random_sequence(6, 1, rng);
  const FilterResult f = kalman_filter(p, y);
  const SmoothedPosterior s = rts_smooth(p, f);
  for (int t = 0; t < 6; ++t) EXPECT_LE((s.means[t] - f.filt_means[t]).norm(), 1e-14);
}

TEST(Smoother, MatchesJointGaussianOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    const int k = 1 + trial % 2;
    const int T = 1 + trial % 5;
    const LdsParams p = oracle::random_model(d, k, rng);
    const SequenceData y = oracle::random_sequence(T, k, rng);
    const oracle::JointPosterior ref = oracle::joint_posterior(p, y);
    const FilterResult f = kalman_filter(p, y);
    const SmoothedPosterior s = rts_smooth(p, f);
    EXPECT_NEAR(f.loglik, ref.loglik, 1e-8);
    for (int t = 0; t < T; ++t) {
      EXPECT_LE((s.means[t] - ref.means[t]).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LE((s.covs[t] - ref.covs[t]).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LE((s.Z[t] - (ref.covs[t] + ref.means[t] * ref.means[t].transpose()))
                    .cwiseAbs().maxCoeff(), 1e-8);
    }
    for (int t = 0; t + 1 < T; ++t) {
      EXPECT_LE((s.cross_covs[t] - ref.cross[t]).cwiseAbs().maxCoeff(), 1e-8);
      const Matrix z = ref.cross[t] + ref.means[t + 1] * ref.means[t].transpose();
      EXPECT_LE((s.Z_cross[t] - z).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Smoother, SmoothedCovarianceBelowFiltered) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const LdsParams p = oracle::random_model(3, 2, rng);
    const SequenceData y = oracle::random_sequence(15, 2, rng);
    const FilterResult f = kalman_filter(p, y);
    const SmoothedPosterior s = rts_smooth(p, f);
    for (int t = 0; t < 15; ++t) {
      const Matrix gap = f.filt_covs[t] - s.covs[t];
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gap + gap.transpose()));
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(KalmanFilter, OrthogonalSimilarityInvariance) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 3;
    const LdsParams p = oracle::random_model(d, 2, rng);
    const SequenceData y = oracle::random_sequence(30, 2, rng);
    const Matrix u = random_orthogonal(d, rng);
    LdsParams q = p;
    q.A = u * p.A * u.transpose();
    q.C = p.C * u.transpose();
    q.R1 = u * p.R1 * u.transpose();
    q.R0 = u * p.R0 * u.transpose();
    q.mu0 = u * p.mu0;
    EXPECT_NEAR(kalman_filter(p, y).loglik, kalman_filter(q, y).loglik, 1e-8);
  }
}

TEST(CompleteDataLoglik, ZeroResidual) {
  LdsParams p = unit_scalar();
  SmoothedPosterior s;
  s.means = {Vector::Constant(1, 2.0)};
  EXPECT_NEAR(complete_data_loglik(p, s, SequenceData(m1(2.0))),
              -0.5 * std::log(2.0 * std::numbers::pi), 1e-14);
  EXPECT_NEAR(complete_data_loglik(p, s, SequenceData(m1(2.0))), -0.9189, 1e-4);
}

TEST(CompleteDataLoglik, TwoStepHandValue) {
  LdsParams p = unit_scalar();
  p.R2 = m1(0.5);
  SmoothedPosterior s;
  s.means = {Vector::Constant(1, 0.0), Vector::Constant(1, 0.0)};
  Matrix y(2, 1);
  y << 0.1, -0.2;
  const double expected = -std::log(std::numbers::pi) - (0.01 + 0.04) / 1.0;
  EXPECT_NEAR(complete_data_loglik(p, s, SequenceData(y)), expected, 1e-14);
  EXPECT_NEAR(complete_data_loglik(p, s, SequenceData(y)), -1.1947, 1e-4);
}

TEST(CompleteDataLoglik, DoublingResidualsScalesQuadraticTerm) {
  const LdsParams p = unit_scalar();
  SmoothedPosterior s;
  s.means = {Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
  Matrix y(3, 1);
  y << 0.3, -1.2, 0.7;
  const double base = complete_data_loglik(p, s, SequenceData(y));
  const double doubled = complete_data_loglik(p, s, SequenceData(Matrix(2.0 * y)));
  EXPECT_NEAR(base - doubled, 1.5 * y.squaredNorm(), 1e-12);
}

TEST(CompleteDataLoglik, SingularNoiseThrows) {
  LdsParams p = unit_scalar();
  p.R2 = m1(0.0);
  SmoothedPosterior s;
  s.means = {Vector::Zero(1)};
  EXPECT_THROW(complete_data_loglik(p, s, SequenceData(m1(1.0))), DegeneracyError);
}
