#include "ldsmdl/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "inference_internal.hpp"
#include "ldsmdl/errors.hpp"
#include "ldsmdl/lyapunov.hpp"
#include "ldsmdl/stability.hpp"

namespace ldsmdl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CriterionValue make_value(Criterion name, int order,
                          std::map<std::string, double> components) {
  CriterionValue v;
  v.name = name;
  v.order = order;
  v.components = std::move(components);
  for (const auto& [key, part] : v.components) v.value += part;
  return v;
}

int triangle(int n) { return n * (n + 1) / 2; }

}  // namespace

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::AIC: return "aic";
    case Criterion::BIC: return "bic";
    case Criterion::FIA: return "fia";
    case Criterion::MME: return "mme";
    case Criterion::MDL: return "mdl";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (const Criterion c : kAllCriteria) {
    if (criterion_name(c) == lower) return c;
  }
  throw ParseError("unknown criterion '" + std::string(name) +
                   "' (expected aic, bic, fia, mme or mdl)");
}

ParamCount count_params(int d, int d_out, bool observable_state) {
  if (d < 1 || d_out < 1) throw DomainError("count_params: dimensions must be >= 1");
  ParamCount count;
  count.breakdown = {{"A", d * d}, {"R1", triangle(d)}, {"mu0", d}, {"R0", triangle(d)}};
  if (!observable_state) {
    count.breakdown["C"] = d * d_out;
    count.breakdown["R2"] = triangle(d_out);
  }
  for (const auto& [block, n] : count.breakdown) count.n_theta += n;
  return count;
}

double kappa_d(int d) {
  if (d < 1) throw DomainError("kappa_d: d must be >= 1");
  return kKappaAsymptotic;
}

CriterionValue aic(double loglik, int n_theta, int order) {
  return make_value(Criterion::AIC, order,
                    {{"fit", -2.0 * loglik}, {"penalty", 2.0 * n_theta}});
}

CriterionValue bic(double loglik, int n_theta, double n, int order) {
  if (!(n >= 1.0)) throw DomainError("bic: sample size must be >= 1");
  return make_value(Criterion::BIC, order,
                    {{"fit", -2.0 * loglik},
                     {"penalty", n_theta * std::log(n)}});
}

CriterionValue fia(double loglik, int n_theta, double n, double fisher_log_det,
                   int order) {
  if (!(n >= 1.0)) throw DomainError("fia: sample size must be >= 1");
  return make_value(
      Criterion::FIA, order,
      {{"fit", -loglik},
       {"dimension_penalty", 0.5 * n_theta * std::log(n / kTwoPi)},
       {"geometric_complexity", fisher_log_det}});
}

CriterionValue mme(double loglik, int n_theta, double n, int order) {
  if (!(n >= 1.0)) throw DomainError("mme: sample size must be >= 1");
  return make_value(
      Criterion::MME, order,
      {{"fit", -loglik},
       {"dimension_penalty", 0.5 * n_theta * std::log(n / 12.0)},
       {"lattice", 0.5 * n_theta}});
}

double mdl_order_penalty(int d, double sample_size) {
  return 0.5 * d * std::log(2.0 * sample_size * sample_size / (kTwoPi * kTwoPi));
}

CriterionValue mdl_description_length(const LdsParams& params,
                                      const SmoothedPosterior& posterior,
                                      const SequenceData& data, double sample_size) {
  if (!(sample_size >= 1.0)) {
    throw DomainError("mdl_description_length: sample size must be >= 1");
  }
  const Matrix q = solve_discrete_lyapunov(params.A, params.R1);
  const double fit = -complete_data_loglik(params, posterior, data);
  const double stability = 0.5 * stationary_obs_log_det(params, q);
  const int d = params.latent_dim();
  return make_value(Criterion::MDL, d,
                    {{"fit", fit},
                     {"stability", stability},
                     {"order_penalty", mdl_order_penalty(d, sample_size)}});
}

CriterionValue mdl_description_length(const FitResult& fit,
                                      const SmoothedPosterior& posterior,
                                      const SequenceData& data, double sample_size) {
  return mdl_description_length(fit.params, posterior, data, sample_size);
}

std::vector<double> normalize_values(std::span<const double> values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const double v : values) {
    if (!std::isfinite(v)) {
      out.push_back(1.0);
    } else if (hi > lo) {
      out.push_back((v - lo) / (hi - lo));
    } else {
      out.push_back(0.0);
    }
  }
  return out;
}

std::vector<double> normalize_values(std::span<const CriterionValue> values) {
  std::vector<double> raw;
  raw.reserve(values.size());
  for (const auto& v : values) raw.push_back(v.value);
  return normalize_values(std::span<const double>(raw));
}

Vector flatten_params(const LdsParams& p) {
  const int d = p.latent_dim();
  const int d_out = p.obs_dim();
  Vector theta(count_params(d, d_out).n_theta);
  Eigen::Index k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) theta(k++) = p.A(i, j);
  for (int i = 0; i < d_out; ++i)
    for (int j = 0; j < d; ++j) theta(k++) = p.C(i, j);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) theta(k++) = p.R1(i, j);
  for (int i = 0; i < d_out; ++i)
    for (int j = i; j < d_out; ++j) theta(k++) = p.R2(i, j);
  for (int i = 0; i < d; ++i) theta(k++) = p.mu0(i);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) theta(k++) = p.R0(i, j);
  return theta;
}

LdsParams unflatten_params(const Vector& theta, int d, int d_out) {
  if (theta.size() != count_params(d, d_out).n_theta) {
    throw DimensionError("unflatten_params: parameter vector has wrong length");
  }
  LdsParams p = LdsParams::zeros(d, d_out);
  Eigen::Index k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p.A(i, j) = theta(k++);
  for (int i = 0; i < d_out; ++i)
    for (int j = 0; j < d; ++j) p.C(i, j) = theta(k++);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) p.R1(i, j) = p.R1(j, i) = theta(k++);
  for (int i = 0; i < d_out; ++i)
    for (int j = i; j < d_out; ++j) p.R2(i, j) = p.R2(j, i) = theta(k++);
  for (int i = 0; i < d; ++i) p.mu0(i) = theta(k++);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) p.R0(i, j) = p.R0(j, i) = theta(k++);
  return p;
}

Matrix innovation_scores(const LdsParams& params, const SequenceData& data,
                         double relative_step) {
  params.validate();
  data.validate(1);
  const int d = params.latent_dim();
  const int d_out = params.obs_dim();
  const Vector theta = flatten_params(params);
  const int T = data.length();

  const auto step_logliks = [&](const Vector& th) {
    const FilterResult f = detail::run_filter(unflatten_params(th, d, d_out), data);
    Vector v = Eigen::Map<const Vector>(f.step_loglik.data(), T);
    if (!v.allFinite()) throw DegeneracyError("innovation_scores: non-finite perturbed loglik");
    return v;
  };

  // Covariance entries are stepped relative to sqrt(S_ii S_jj) so that tiny
  // variances are not pushed through zero.
  Vector scale = Vector::Ones(theta.size());
  {
    Eigen::Index k = static_cast<Eigen::Index>(d) * d + static_cast<Eigen::Index>(d_out) * d;
    const auto cov_scales = [&](const Matrix& s) {
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = i; j < s.rows(); ++j)
          scale(k++) = std::sqrt(std::max(s(i, i), 0.0) * std::max(s(j, j), 0.0));
    };
    cov_scales(params.R1);
    cov_scales(params.R2);
    k += d;
    cov_scales(params.R0);
  }
  const Vector base = step_logliks(theta);

  // Near-singular covariances can make perturbed points infeasible: fall back
  // to one-sided differences, then to smaller steps.
  constexpr int kMaxShrinks = 12;
  Matrix scores(T, theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    double h = relative_step * std::max(std::abs(theta(i)), scale(i));
    if (!(h > 0.0)) h = relative_step;
    for (int shrink = 0;; ++shrink, h *= 0.1) {
      Vector plus = theta;
      Vector minus = theta;
      plus(i) += h;
      minus(i) -= h;
      try {
        scores.col(i) = (step_logliks(plus) - step_logliks(minus)) / (2.0 * h);
        break;
      } catch (const Error&) {
      }
      try {
        scores.col(i) = (step_logliks(plus) - base) / h;
        break;
      } catch (const Error&) {
      }
      try {
        scores.col(i) = (base - step_logliks(minus)) / h;
        break;
      } catch (const Error&) {
        if (shrink == kMaxShrinks) throw;
      }
    }
  }
  return scores;
}

double half_log_pdet(const Matrix& fisher) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(fisher), Eigen::EigenvaluesOnly);
  const Vector& values = es.eigenvalues();
  const double largest = values.maxCoeff();
  if (!(largest > 0.0)) {
    throw DegeneracyError("empirical Fisher information is identically zero");
  }
  const double cutoff = kFisherRankTolerance * largest;
  double sum = 0.0;
  for (const double v : values) {
    if (v > cutoff) sum += std::log(v);
  }
  return 0.5 * sum;
}

double empirical_fisher_log_det(const LdsParams& params, const SequenceData& data,
                                bool observable_state, double relative_step) {
  Matrix scores = innovation_scores(params, data, relative_step);
  if (observable_state) {
    // Drop the C block and the R2 upper triangle.
    const int d = params.latent_dim();
    const int d_out = params.obs_dim();
    const int c_begin = d * d;
    const int c_end = c_begin + d * d_out;
    const int r2_begin = c_end + triangle(d);
    const int r2_end = r2_begin + triangle(d_out);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < scores.cols(); ++i) {
      if ((i >= c_begin && i < c_end) || (i >= r2_begin && i < r2_end)) continue;
      keep.push_back(i);
    }
    scores = scores(Eigen::all, keep).eval();
  }
  return half_log_pdet(scores.transpose() * scores);
}

}  // namespace ldsmdl
