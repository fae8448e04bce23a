#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct RandomLdsConfig {
  int d = 4;
  int d_out = 1;
  Interval entry_range{-1.0, 1.0};
  /// Inverse-Wishart degrees of freedom; unset means dim + 2 for each block.
  std::optional<int> iw_dof;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draw W^{-1} with W ~ Wishart(I_dim, dof) built by the Bartlett
/// decomposition. Requires dof > dim - 1 (DomainError otherwise).
Matrix sample_inverse_wishart(int dim, int dof, std::uint64_t seed);

struct RandomLds {
  LdsParams params;
  Matrix raw_transition;  // A before stability enforcement
};

/// A and C entries i.i.d. uniform on entry_range, A passed through
/// enforce_stability, R1/R2/R0 inverse-Wishart with identity scale, mu0 = 0.
RandomLds random_stable_lds_detailed(const RandomLdsConfig& config);
LdsParams random_stable_lds(const RandomLdsConfig& config);

enum class NarmaOrder { k10 = 10, k20 = 20, k30 = 30 };

struct NarmaSpec {
  NarmaOrder order = NarmaOrder::k10;
  int length = 1000;
  Interval input_range{0.0, 0.5};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Runs the NARMA recursion of the given order over the input stream `u` from
/// zero histories and returns x(1), ..., x(u.size()), where x(t+1) is driven by
/// u(t) and u(t - order + 1). Throws DivergenceError if |x| exceeds 1e6.
std::vector<double> narma_series(NarmaOrder order, std::span<const double> u);

/// Uniform inputs, recursion from zero histories, first `order` outputs
/// discarded; returns spec.length values as a one-column sequence.
SequenceData narma_generate(const NarmaSpec& spec);

/// Subtracts the sample mean and drops samples outside `bounds`. Scalar
/// sequences only. Throws InsufficientDataError if nothing survives.
SequenceData preprocess_center_trim(const SequenceData& data, Interval bounds);

/// (T - d + 1) x d delay embedding: row t is (y_{t+d-1}, ..., y_t).
/// Scalar sequences only; throws InsufficientDataError when T <= d.
SequenceData delay_embed(const SequenceData& data, int d);

}  // namespace ldsmdl
