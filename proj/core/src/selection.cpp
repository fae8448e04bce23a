#include "ldsmdl/selection.hpp"

#include <limits>

#include "ldsmdl/datagen.hpp"
#include "ldsmdl/errors.hpp"
#include "ldsmdl/inference.hpp"

namespace ldsmdl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void choose(SelectionTrace& trace) {
  const OrderRecord* best = nullptr;
  for (const auto& rec : trace.per_order) {
    if (!rec.ok) continue;
    // Ties keep the smaller order.
    if (best == nullptr || rec.value(trace.criterion) < best->value(trace.criterion) ||
        (rec.value(trace.criterion) == best->value(trace.criterion) &&
         rec.order < best->order)) {
      best = &rec;
    }
  }
  if (best == nullptr) {
    std::string message = "no candidate order could be fitted";
    if (!trace.per_order.empty()) message += ": " + trace.per_order.back().error;
    throw SelectionError(message);
  }
  trace.chosen_order = best->order;
  trace.chosen_params = best->fit.params;
}

}  // namespace

const CriterionValue* OrderRecord::find(Criterion c) const {
  for (const auto& v : criteria) {
    if (v.name == c) return &v;
  }
  return nullptr;
}

double OrderRecord::value(Criterion c) const {
  if (!ok) return kInf;
  const CriterionValue* v = find(c);
  return v ? v->value : kInf;
}

std::uint64_t order_seed(std::uint64_t seed, int d) {
  return mix(seed ^ mix(static_cast<std::uint64_t>(d)));
}

OrderRecord evaluate_order(const SequenceData& data, int d, const SelectionConfig& config) {
  OrderRecord rec;
  rec.order = d;
  rec.dl = kInf;
  try {
    const bool observable = config.em.observable_state;
    const SequenceData fitted_data = observable ? delay_embed(data, d) : data;
    EmConfig em = config.em;
    em.seed = order_seed(config.em.seed, d);

    rec.fit = multi_restart_fit(fitted_data, d, em);
    const SmoothedPosterior posterior = smooth(rec.fit.params, fitted_data);

    const long long n = fitted_data.length();
    const double sample_size = config.sample_size.value_or(static_cast<double>(n));
    const int n_theta = count_params(d, fitted_data.dim(), observable).n_theta;
    const double loglik = rec.fit.loglik;

    const CriterionValue dl =
        mdl_description_length(rec.fit.params, posterior, fitted_data, sample_size);
    // A Fisher failure only disqualifies FIA for this order.
    double fisher = 0.0;
    if (config.compute_fia) {
      try {
        fisher = empirical_fisher_log_det(rec.fit.params, fitted_data, observable);
      } catch (const Error&) {
        fisher = kInf;
      }
    }
    rec.criteria = {aic(loglik, n_theta, d), bic(loglik, n_theta, n, d),
                    fia(loglik, n_theta, n, fisher, d), mme(loglik, n_theta, n, d), dl};
    rec.dl = dl.value;
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.dl = kInf;
    rec.criteria.clear();
  }
  return rec;
}

SelectionTrace annihilation_search(const SequenceData& data, ModelOrderBounds bounds,
                                   const SelectionConfig& config) {
  bounds.validate();
  config.em.validate();
  SelectionTrace trace;
  trace.mode = SearchMode::kAnnihilation;
  trace.criterion = Criterion::MDL;

  double previous_dl = kInf;  // last successfully evaluated (higher) order
  for (int d = bounds.d_max; d >= bounds.d_min; --d) {
    trace.per_order.push_back(evaluate_order(data, d, config));
    const OrderRecord& rec = trace.per_order.back();
    if (!rec.ok) continue;
    if (config.early_stop && rec.dl > previous_dl) {
      trace.stopped_early = d > bounds.d_min;
      break;
    }
    previous_dl = rec.dl;
  }
  choose(trace);
  return trace;
}

SelectionTrace grid_search(const SequenceData& data, ModelOrderBounds bounds,
                           const SelectionConfig& config, Criterion criterion) {
  bounds.validate();
  config.em.validate();
  SelectionTrace trace;
  trace.mode = SearchMode::kGrid;
  trace.criterion = criterion;
  for (int d = bounds.d_min; d <= bounds.d_max; ++d) {
    trace.per_order.push_back(evaluate_order(data, d, config));
  }
  choose(trace);
  return trace;
}

int argmin_order(const SelectionTrace& trace, Criterion criterion) {
  int best_order = 0;
  double best = kInf;
  for (const auto& rec : trace.per_order) {
    const double v = rec.value(criterion);
    if (v < best || (v == best && best_order != 0 && rec.order < best_order)) {
      best = v;
      best_order = rec.order;
    }
  }
  return best_order;
}

}  // namespace ldsmdl
