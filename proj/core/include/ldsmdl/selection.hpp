#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldsmdl/criteria.hpp"
#include "ldsmdl/em.hpp"
#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

enum class SearchMode { kAnnihilation, kGrid };

struct SelectionConfig {
  EmConfig em;
  /// Stop the annihilation loop once the description length rises again.
  bool early_stop = true;
  /// The FIA geometric term needs one pair of filter passes per parameter.
  bool compute_fia = true;
  /// Sample size N of the description length; unset means the sequence length.
  std::optional<double> sample_size;
};

/// Fit and scores for one candidate order. Failed orders keep dl = +inf.
struct OrderRecord {
  int order = 0;
  bool ok = false;
  std::string error;
  FitResult fit;
  double dl = 0.0;  // MDL description length
  std::vector<CriterionValue> criteria;  // AIC, BIC, FIA, MME, MDL

  [[nodiscard]] const CriterionValue* find(Criterion c) const;
  /// Value of criterion `c`, +inf for failed orders.
  [[nodiscard]] double value(Criterion c) const;
};

struct SelectionTrace {
  SearchMode mode = SearchMode::kGrid;
  Criterion criterion = Criterion::MDL;
  std::vector<OrderRecord> per_order;  // decreasing (annihilation) or increasing (grid)
  int chosen_order = 0;
  LdsParams chosen_params;
  bool stopped_early = false;
};

/// EM seed used for order d under master seed `seed`. Both search modes share
/// it, so an order is fitted identically by either.
std::uint64_t order_seed(std::uint64_t seed, int d);

/// Fits order d with restarts and scores all five criteria. In
/// observable-state mode a scalar sequence is delay-embedded to dimension d
/// first. Never throws for fitting failures; they are recorded instead.
OrderRecord evaluate_order(const SequenceData& data, int d,
                           const SelectionConfig& config);

/// Top-down search from d_max: fit each order, keep the minimum description
/// length, and (with early_stop) stop once the description length exceeds
/// that of the previously evaluated higher order. Throws SelectionError when
/// no order could be fitted.
SelectionTrace annihilation_search(const SequenceData& data, ModelOrderBounds bounds,
                                   const SelectionConfig& config);

/// Fits every order in [d_min, d_max] and picks the minimizer of `criterion`.
SelectionTrace grid_search(const SequenceData& data, ModelOrderBounds bounds,
                           const SelectionConfig& config,
                           Criterion criterion = Criterion::MDL);

/// Orders that minimize each criterion over the evaluated orders.
int argmin_order(const SelectionTrace& trace, Criterion criterion);

}  // namespace ldsmdl
