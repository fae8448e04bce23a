#pragma once

#include "ldsmdl/inference.hpp"

namespace ldsmdl::detail {

// kalman_filter without argument validation; covariance blocks may be
// slightly indefinite as long as every innovation covariance is PD.
FilterResult run_filter(const LdsParams& params, const SequenceData& data);

}  // namespace ldsmdl::detail
