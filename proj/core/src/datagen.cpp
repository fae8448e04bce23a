#include "ldsmdl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ldsmdl/errors.hpp"
#include "ldsmdl/random.hpp"
#include "ldsmdl/stability.hpp"

namespace ldsmdl {

namespace {

constexpr double kNarmaDivergence = 1e6;

// Independent streams of one RandomLdsConfig seed.
enum Stream : std::uint64_t { kTransition = 1, kObservation, kStateNoise, kObsNoise, kInit };

Matrix uniform_matrix(int rows, int cols, Interval range, Rng& rng) {
  std::uniform_real_distribution<double> uniform(range.lo, range.hi);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng);
  return m;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  return rng();
}

void require_scalar(const SequenceData& data, const char* what) {
  data.validate(1);
  if (data.dim() != 1) {
    throw DimensionError(std::string(what) + ": expects a scalar (one-column) sequence");
  }
}

}  // namespace

void RandomLdsConfig::validate() const {
  if (d < 1 || d_out < 1) throw DomainError("RandomLdsConfig: dimensions must be >= 1");
  if (!(entry_range.lo < entry_range.hi)) {
    throw DomainError("RandomLdsConfig: entry_range must be a non-empty interval");
  }
  if (iw_dof && *iw_dof <= std::max(d, d_out) + 1) {
    throw DomainError("RandomLdsConfig: iw_dof must exceed dimension + 1");
  }
}

Matrix sample_inverse_wishart(int dim, int dof, std::uint64_t seed) {
  if (dim < 1) throw DomainError("sample_inverse_wishart: dim must be >= 1");
  if (dof <= dim - 1) {
    throw DomainError("sample_inverse_wishart: need dof > dim - 1, got dof=" +
                      std::to_string(dof) + " for dim=" + std::to_string(dim));
  }
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Bartlett: W = L L^T, L lower triangular, L_ii^2 ~ chi2(dof - i), L_ij ~ N(0,1).
  Matrix lower = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    std::chi_squared_distribution<double> chi2(static_cast<double>(dof - i));
    lower(i, i) = std::sqrt(chi2(rng));
    for (int j = 0; j < i; ++j) lower(i, j) = normal(rng);
  }
  // W^{-1} = L^{-T} L^{-1}
  const Matrix lower_inv = lower.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(dim, dim));
  return symmetrize(lower_inv.transpose() * lower_inv);
}

RandomLds random_stable_lds_detailed(const RandomLdsConfig& config) {
  config.validate();
  const int d = config.d;
  const int d_out = config.d_out;
  const auto dof = [&](int dim) { return config.iw_dof.value_or(dim + 2); };

  RandomLds out;
  Rng transition_rng = make_rng(config.seed, kTransition);
  Rng observation_rng = make_rng(config.seed, kObservation);
  out.raw_transition = uniform_matrix(d, d, config.entry_range, transition_rng);

  LdsParams& p = out.params;
  p.A = enforce_stability(out.raw_transition);
  p.C = uniform_matrix(d_out, d, config.entry_range, observation_rng);
  p.R1 = sample_inverse_wishart(d, dof(d), substream_seed(config.seed, kStateNoise));
  p.R2 = sample_inverse_wishart(d_out, dof(d_out), substream_seed(config.seed, kObsNoise));
  p.R0 = sample_inverse_wishart(d, dof(d), substream_seed(config.seed, kInit));
  p.mu0 = Vector::Zero(d);
  return out;
}

LdsParams random_stable_lds(const RandomLdsConfig& config) {
  return random_stable_lds_detailed(config).params;
}

void NarmaSpec::validate() const {
  const int n = static_cast<int>(order);
  if (n != 10 && n != 20 && n != 30) throw DomainError("NarmaSpec: order must be 10, 20 or 30");
  if (length < n + 1) {
    throw DomainError("NarmaSpec: length must be at least order + 1");
  }
  if (!(input_range.lo <= input_range.hi)) {
    throw DomainError("NarmaSpec: input_range must be an interval");
  }
}

std::vector<double> narma_series(NarmaOrder order, std::span<const double> u) {
  const int n = static_cast<int>(order);
  const std::size_t steps = u.size();
  // x[k] holds x(k - n + 1); the first n - 1 slots are the zero history and
  // slot n - 1 is x(0) = 0.
  std::vector<double> x(steps + n, 0.0);
  const auto input = [&](std::ptrdiff_t t) {  // u(t), zero before the stream
    return t >= 0 ? u[static_cast<std::size_t>(t)] : 0.0;
  };

  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t now = s + n - 1;  // index of x(t), t = s
    const double xt = x[now];
    double window = 0.0;
    for (int i = 0; i < n; ++i) window += x[now - i];
    const auto t = static_cast<std::ptrdiff_t>(s);
    const double drive = 1.5 * input(t - n + 1) * input(t);
    double next = 0.0;
    switch (order) {
      case NarmaOrder::k10:
        next = 0.3 * xt + 0.05 * xt * window + drive + 0.1;
        break;
      case NarmaOrder::k20:
        next = std::tanh(0.3 * xt + 0.05 * xt * window + drive + 0.01) + 0.2;
        break;
      case NarmaOrder::k30:
        next = 0.2 * xt + 0.004 * xt * window + drive + 0.201;
        break;
    }
    if (!std::isfinite(next) || std::abs(next) > kNarmaDivergence) {
      throw DivergenceError("narma_series: recursion diverged at step " +
                            std::to_string(s + 1));
    }
    x[now + 1] = next;
  }
  return {x.begin() + n, x.end()};
}

SequenceData narma_generate(const NarmaSpec& spec) {
  spec.validate();
  const int n = static_cast<int>(spec.order);
  const int total = spec.length + n;
  Rng rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> uniform(spec.input_range.lo, spec.input_range.hi);
  std::vector<double> u(total);
  for (double& v : u) v = uniform(rng);
  const std::vector<double> x = narma_series(spec.order, u);
  Matrix y(spec.length, 1);
  for (int t = 0; t < spec.length; ++t) y(t, 0) = x[t + n];
  return SequenceData(std::move(y), spec.seed);
}

SequenceData preprocess_center_trim(const SequenceData& data, Interval bounds) {
  require_scalar(data, "preprocess_center_trim");
  const Vector centered = data.Y.col(0).array() - data.Y.col(0).mean();
  std::vector<double> kept;
  kept.reserve(centered.size());
  for (const double v : centered) {
    if (v >= bounds.lo && v <= bounds.hi) kept.push_back(v);
  }
  if (kept.empty()) {
    throw InsufficientDataError("preprocess_center_trim: every sample fell outside the bounds");
  }
  Matrix y = Eigen::Map<const Matrix>(kept.data(), static_cast<Eigen::Index>(kept.size()), 1);
  return SequenceData(std::move(y), data.seed);
}

SequenceData delay_embed(const SequenceData& data, int d) {
  require_scalar(data, "delay_embed");
  if (d < 1) throw DomainError("delay_embed: d must be >= 1");
  const int T = data.length();
  if (T <= d) {
    throw InsufficientDataError("delay_embed: need more than d samples");
  }
  const int rows = T - d + 1;
  Matrix y(rows, d);
  for (int t = 0; t < rows; ++t)
    for (int k = 0; k < d; ++k) y(t, k) = data.Y(t + d - 1 - k, 0);
  return SequenceData(std::move(y), data.seed);
}

}  // namespace ldsmdl
