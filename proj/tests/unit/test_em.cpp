#include <gtest/gtest.h>

#include <random>

#include "ldsmdl/datagen.hpp"
#include "ldsmdl/em.hpp"
#include "ldsmdl/errors.hpp"
#include "ldsmdl/inference.hpp"
#include "ldsmdl/simulate.hpp"
#include "ldsmdl/stability.hpp"
#include "oracles.hpp"

using namespace ldsmdl;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

// Scalar posterior with the given means and zero posterior covariance.
SmoothedPosterior point_posterior(const std::vector<double>& xs) {
  SmoothedPosterior s;
  for (double x : xs) {
    s.means.push_back(Vector::Constant(1, x));
    s.covs.push_back(m1(0.0));
    s.Z.push_back(m1(x * x));
  }
  for (std::size_t t = 0; t + 1 < xs.size(); ++t) {
    s.cross_covs.push_back(m1(0.0));
    s.Z_cross.push_back(m1(xs[t + 1] * xs[t]));
  }
  return s;
}

SequenceData column(const std::vector<double>& ys) {
  Matrix y(static_cast<Eigen::Index>(ys.size()), 1);
  for (std::size_t i = 0; i < ys.size(); ++i) y(i, 0) = ys[i];
  return SequenceData(y);
}

SequenceData synthetic(int d, int T, std::uint64_t seed, LdsParams* truth = nullptr) {
  RandomLdsConfig rc;
  rc.d = d;
  rc.seed = seed;
  const LdsParams p = random_stable_lds(rc);
  if (truth) *truth = p;
  return simulate(p, T, 0, seed + 100);
}

Matrix sym_direction(int n, std::mt19937_64& rng) {
  const Matrix g = oracle::random_matrix(n, n, rng);
  return 0.5 * (g + g.transpose());
}

}  // namespace

TEST(EmConfig, Validate) {
  EmConfig c;
  EXPECT_NO_THROW(c.validate());
  c.eps = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = EmConfig{};
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = EmConfig{};
  c.n_restarts = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(MStep, ObservationMatrixFromIdenticalSums) {
  const std::vector<double> xs = {0.4, -1.3, 2.0, 0.7};
  const MStepResult r = m_step(point_posterior(xs), column(xs), 1);
  EXPECT_NEAR(r.params.C(0, 0), 1.0, 1e-14);
}

TEST(MStep, ConstantStateIsRescaled) {
  const std::vector<double> xs = {1.0, 1.0, 1.0};
  const MStepResult raw = m_step(point_posterior(xs), column(xs), 1);
  EXPECT_NEAR(raw.params.A(0, 0), 1.0, 1e-14);
  EXPECT_FALSE(raw.rescaled);

  MStepOptions options;
  options.enforce_stability = true;
  const MStepResult fixed = m_step(point_posterior(xs), column(xs), 1, options);
  EXPECT_TRUE(fixed.rescaled);
  EXPECT_NEAR(fixed.params.A(0, 0), 1.0 / 1.1, 1e-12);
  EXPECT_NEAR(fixed.params.A(0, 0), 0.9091, 1e-4);
}

TEST(MStep, TwoStepHandValues) {
  SmoothedPosterior s;
  s.means = {Vector::Zero(1), Vector::Zero(1)};
  s.covs = {m1(1.0), m1(1.0)};
  s.cross_covs = {m1(0.5)};
  s.Z = {m1(1.0), m1(1.0)};
  s.Z_cross = {m1(0.5)};
  const MStepResult r = m_step(s, column({0.3, -0.1}), 1);
  EXPECT_NEAR(r.params.A(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(r.params.R1(0, 0), 0.75, 1e-14);
  EXPECT_NEAR(r.params.R0(0, 0), 1.0, 1e-14);
}

TEST(MStep, SingularAccumulatorThrows) {
  const std::vector<double> xs = {0.0, 0.0, 0.0};
  EXPECT_THROW(m_step(point_posterior(xs), column({1.0, 2.0, 3.0}), 1), RankDeficiencyError);
}

TEST(MStep, FlooredCovarianceIsFlagged) {
  const std::vector<double> xs = {1.0, 0.5, 0.25, 0.125};
  const MStepResult r = m_step(point_posterior(xs), column(xs), 1);
  EXPECT_TRUE(r.floored);
  EXPECT_GE(r.params.R1(0, 0), kCovarianceFloor * (1 - 1e-12));
  EXPECT_GE(r.params.R2(0, 0), kCovarianceFloor * (1 - 1e-12));
}

TEST(MStep, PerturbationsDoNotImproveObjective) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 3;
    const int k = 1 + trial % 2;
    const LdsParams p = oracle::random_model(d, k, rng);
    const SequenceData y = simulate(p, 40, 0, 500 + trial);
    const SmoothedPosterior post = smooth(p, y);
    const LdsParams best = m_step(post, y, d).params;
    const double base = expected_complete_loglik(best, post, y);

    for (int block = 0; block < 6; ++block) {
      for (double sign : {-1.0, 1.0}) {
        LdsParams q = best;
        const double h = 1e-3 * sign;
        switch (block) {
          case 0: q.A += h * oracle::random_matrix(d, d, rng).normalized(); break;
          case 1: q.C += h * oracle::random_matrix(k, d, rng).normalized(); break;
          case 2: q.R1 += h * sym_direction(d, rng).normalized(); break;
          case 3: q.R2 += h * sym_direction(k, rng).normalized(); break;
          case 4: q.mu0 += h * oracle::random_matrix(d, 1, rng).normalized(); break;
          case 5: q.R0 += h * sym_direction(d, rng).normalized(); break;
        }
        EXPECT_LE(expected_complete_loglik(q, post, y), base + 1e-9)
            << "trial " << trial << " block " << block;
      }
    }
  }
}

TEST(EmFit, NoiselessFixedPoint) {
  LdsParams truth;
  truth.A = m1(0.9);
  truth.C = m1(1.0);
  truth.R1 = m1(0.0);
  truth.R2 = m1(0.0);
  truth.R0 = m1(0.0);
  truth.mu0 = Vector::Constant(1, 1.0);
  const SequenceData y = simulate(truth, 40, 0, 1);

  LdsParams init = truth;
  init.R1 = init.R2 = init.R0 = m1(kCovarianceFloor);
  EmConfig config;
  const FitResult fit = em_fit(y, 1, init, config);
  EXPECT_LE(fit.iterations, 2);
  EXPECT_NEAR(fit.params.A(0, 0), 0.9, 1e-8);
  EXPECT_NEAR(fit.params.C(0, 0), 1.0, 1e-8);
  EXPECT_NEAR(fit.params.mu0(0), 1.0, 1e-8);
  EXPECT_NEAR(fit.params.R1(0, 0), kCovarianceFloor, 1e-8);
  EXPECT_NEAR(fit.params.R2(0, 0), kCovarianceFloor, 1e-8);
}

TEST(EmFit, RefitFromConvergedParametersStays) {
  const SequenceData y = synthetic(2, 150, 31);
  EmConfig config;
  config.eps = 1e-6;
  config.max_iters = 5000;
  const FitResult first = em_fit(y, 2, random_initialization(y, 2, 0, 0, config), config);
  ASSERT_TRUE(first.converged) << first.iterations;
  const FitResult again = em_fit(y, 2, first.params, config);
  EXPECT_LE(again.iterations, 2);
  EXPECT_LE((again.params.A - first.params.A).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_NEAR(again.loglik, first.loglik, 1e-6);
}

TEST(EmFit, TraceIsMonotoneOutsideRescales) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SequenceData y = synthetic(3, 100, seed);
    EmConfig config;
    const FitResult fit = em_fit(y, 3, random_initialization(y, 3, seed, 0, config), config);
    ASSERT_EQ(fit.loglik_trace.size(), fit.rescaled.size());
    ASSERT_EQ(fit.loglik_trace.size(), fit.floored.size());
    for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k) {
      if (fit.rescaled[k]) continue;
      EXPECT_GE(fit.loglik_trace[k], fit.loglik_trace[k - 1] - 1e-6) << "seed " << seed;
    }
    EXPECT_GE(fit.loglik_trace.back(), fit.loglik_trace.front() - 1e-6);
    EXPECT_LT(spectral_radius(fit.params.A), 1.0);
  }
}

TEST(EmFit, ReachesTrueLikelihood) {
  LdsParams truth;
  const SequenceData y = synthetic(2, 200, 41, &truth);
  EmConfig config;
  config.n_restarts = 5;
  const FitResult fit = multi_restart_fit(y, 2, config);
  EXPECT_GE(fit.loglik, kalman_filter(truth, y).loglik - 2.0);
  EXPECT_NEAR(fit.loglik, kalman_filter(fit.params, y).loglik, 1e-6);
}

TEST(MultiRestart, SingleRestartEqualsEmFit) {
  const SequenceData y = synthetic(2, 60, 5);
  EmConfig config;
  config.n_restarts = 1;
  config.seed = 9;
  const FitResult a = multi_restart_fit(y, 2, config);
  const FitResult b = em_fit(y, 2, random_initialization(y, 2, 9, 0, config), config);
  EXPECT_EQ(a.loglik, b.loglik);
  EXPECT_TRUE(a.params.A == b.params.A);
}

TEST(MultiRestart, MoreRestartsNeverWorse) {
  const SequenceData y = synthetic(3, 80, 6);
  EmConfig one;
  one.n_restarts = 1;
  one.seed = 3;
  EmConfig five = one;
  five.n_restarts = 5;
  EXPECT_GE(multi_restart_fit(y, 3, five).loglik, multi_restart_fit(y, 3, one).loglik);
}

TEST(MultiRestart, FourDimensionalProtocolNearTruth) {
  RandomLdsConfig rc;
  rc.d = 4;
  rc.seed = 12;
  const LdsParams truth = random_stable_lds(rc);
  const SequenceData y = simulate(truth, 100, 20, 13);
  EmConfig config;
  config.n_restarts = 10;
  EXPECT_GE(multi_restart_fit(y, 4, config).loglik, kalman_filter(truth, y).loglik - 5.0);
}

TEST(MultiRestart, Deterministic) {
  const SequenceData y = synthetic(2, 50, 8);
  EmConfig config;
  config.n_restarts = 3;
  const FitResult a = multi_restart_fit(y, 2, config);
  const FitResult b = multi_restart_fit(y, 2, config);
  EXPECT_EQ(a.loglik_trace, b.loglik_trace);
  EXPECT_EQ(a.restart, b.restart);
}

TEST(MultiRestart, NestedOrdersDoNotLoseLikelihood) {
  const SequenceData y = synthetic(2, 100, 17);
  EmConfig config;
  config.n_restarts = 10;
  config.max_iters = 1000;
  config.eps = 1e-6;
  double previous = -INFINITY;
  for (int d = 1; d <= 3; ++d) {
    const double best = multi_restart_fit(y, d, config).loglik;
    EXPECT_GE(best, previous - 1e-3) << "d=" << d;
    previous = best;
  }
}

TEST(RandomInitialization, ShapesAndStability) {
  const SequenceData y = synthetic(2, 30, 1);
  EmConfig config;
  const LdsParams p = random_initialization(y, 4, 1, 2, config);
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.latent_dim(), 4);
  EXPECT_NEAR(spectral_radius(p.A), 0.5, 1e-12);
  EXPECT_TRUE(p.R1.isIdentity() && p.R2.isIdentity() && p.R0.isIdentity());
}

TEST(RandomInitialization, ObservableMode) {
  const SequenceData y = delay_embed(synthetic(2, 30, 1), 3);
  EmConfig config;
  config.observable_state = true;
  const LdsParams p = random_initialization(y, 3, 1, 0, config);
  EXPECT_TRUE(p.C.isIdentity());
  EXPECT_TRUE(p.R2.isApprox(1e-6 * Matrix::Identity(3, 3)));
  const FitResult fit = em_fit(y, 3, p, config);
  EXPECT_TRUE(fit.params.C.isIdentity());
  EXPECT_TRUE(fit.params.R2.isApprox(1e-6 * Matrix::Identity(3, 3)));
}
