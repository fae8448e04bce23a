#pragma once

#include <array>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldsmdl/em.hpp"
#include "ldsmdl/inference.hpp"
#include "ldsmdl/lds_params.hpp"

namespace ldsmdl {

enum class Criterion { AIC, BIC, FIA, MME, MDL };

inline constexpr std::array<Criterion, 5> kAllCriteria = {
    Criterion::AIC, Criterion::BIC, Criterion::FIA, Criterion::MME, Criterion::MDL};

/// Lower-case name ("aic", "bic", ...).
std::string_view criterion_name(Criterion c);

/// Case-insensitive inverse of criterion_name. Throws ParseError.
Criterion parse_criterion(std::string_view name);

/// A criterion score for one model order. `value` is the sum of `components`.
struct CriterionValue {
  Criterion name = Criterion::MDL;
  int order = 0;
  double value = 0.0;
  std::map<std::string, double> components;
};

struct ParamCount {
  int n_theta = 0;
  std::map<std::string, int> breakdown;
};

/// Raw parameter count of all blocks:
///   A d^2, C d d_out, R1 d(d+1)/2, R2 d_out(d_out+1)/2, mu0 d, R0 d(d+1)/2.
/// Similarity-transform redundancy is not subtracted. In observable-state mode
/// C and R2 are fixed and not counted.
ParamCount count_params(int d, int d_out, bool observable_state = false);

/// Asymptotic normalized second moment of optimal quantizing lattices.
inline constexpr double kKappaAsymptotic = 1.0 / (2.0 * std::numbers::pi * std::numbers::e);
/// The cubic-lattice value 1/12, used by the message-length criterion.
inline constexpr double kKappaCubic = 1.0 / 12.0;

/// Lattice constant used in the description length; the asymptotic value for
/// every d >= 1.
double kappa_d(int d);

CriterionValue aic(double loglik, int n_theta, int order = 0);
CriterionValue bic(double loglik, int n_theta, double n, int order = 0);
/// -loglik + (n_theta/2) ln(n / 2pi) + fisher_log_det.
CriterionValue fia(double loglik, int n_theta, double n, double fisher_log_det,
                   int order = 0);
/// -loglik + (n_theta/2) ln(n / 12) + n_theta / 2.
CriterionValue mme(double loglik, int n_theta, double n, int order = 0);

/// (d/2) ln(2 N^2 / (2 pi)^2): the order-dependent part of the description
/// length.
double mdl_order_penalty(int d, double sample_size);

/// Description length
///
///   -log p(Y | X_hat, theta) + 1/2 log det(C Q C^T + R2) + mdl_order_penalty(d, N)
///
/// with Q the stationary state covariance solving Q = A Q A^T + R1 and X_hat
/// the smoothed state means. Components: "fit", "stability", "order_penalty".
/// Throws InstabilityError if A is not stable.
CriterionValue mdl_description_length(const LdsParams& params,
                                      const SmoothedPosterior& posterior,
                                      const SequenceData& data, double sample_size);

CriterionValue mdl_description_length(const FitResult& fit,
                                      const SmoothedPosterior& posterior,
                                      const SequenceData& data, double sample_size);

/// Min-max normalization to [0, 1]; a constant list maps to zeros. Infinite
/// entries are ignored when computing the range and map to 1.
std::vector<double> normalize_values(std::span<const double> values);
std::vector<double> normalize_values(std::span<const CriterionValue> values);

/// Flat parameter vector in count_params order: A row-major, C row-major,
/// upper triangles (row-major) of R1 and R2, mu0, upper triangle of R0.
Vector flatten_params(const LdsParams& params);
LdsParams unflatten_params(const Vector& theta, int d, int d_out);

/// Relative step used for score finite differences.
inline constexpr double kFisherRelativeStep = 1e-5;
/// Eigenvalues of the empirical Fisher below this fraction of the largest one
/// are treated as null directions.
inline constexpr double kFisherRankTolerance = 1e-8;

/// Per-step scores d/dtheta log p(y_t | y_1..y_{t-1}) by central differences
/// over flatten_params coordinates; row t is the score at time t.
Matrix innovation_scores(const LdsParams& params, const SequenceData& data,
                         double relative_step = kFisherRelativeStep);

/// 1/2 log pdet(sum_t s_t s_t^T) of the empirical Fisher information built
/// from innovation_scores, counting eigenvalues above kFisherRankTolerance
/// times the largest.
/// In observable-state mode the fixed C and R2 coordinates are left out.
double empirical_fisher_log_det(const LdsParams& params, const SequenceData& data,
                                bool observable_state = false,
                                double relative_step = kFisherRelativeStep);

/// 1/2 log pdet(F) with the same rank rule, for a given Fisher matrix.
double half_log_pdet(const Matrix& fisher);

}  // namespace ldsmdl
