#pragma once

#include <cstdint>

#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

/// Draws burn_in + length steps from the model and returns the last `length`
/// observations. Deterministic in `seed`. Throws InstabilityError for an
/// unstable transition matrix.
SequenceData simulate(const LdsParams& params, int length, int burn_in,
                      std::uint64_t seed);

}  // namespace ldsmdl
