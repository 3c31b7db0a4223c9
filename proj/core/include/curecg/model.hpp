#pragma once

// Box-Cox transformation cure rate model with Weibull lifetimes.
//
// The model links the population survival function to covariates through
//   G(S_p(y|x), alpha) = -phi(alpha, x) F(y),   0 <= alpha <= 1,
// where G is the Box-Cox transform.  alpha = 1 gives the mixture cure model
// and alpha = 0 the promotion time cure model.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace curecg {

// alpha values at or below this are evaluated on the promotion-time (alpha = 0)
// branch.  Coincides with the projection floor used by the optimizer.
inline constexpr double kAlphaZeroThreshold = 1e-10;

constexpr bool uses_promotion_branch(double alpha) noexcept {
  return alpha <= kAlphaZeroThreshold;
}

// x_i with the intercept slot at index 0 (always 1).
class CovariateVector {
 public:
  CovariateVector() : values_{1.0} {}
  explicit CovariateVector(std::vector<double> values);
  CovariateVector(std::initializer_list<double> values)
      : CovariateVector(std::vector<double>(values)) {}

  // Prepends the intercept to the given non-intercept covariates.
  static CovariateVector with_intercept(std::span<const double> covariates);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }

  friend bool operator==(const CovariateVector&, const CovariateVector&) = default;

 private:
  std::vector<double> values_;
};

// theta = (alpha, beta, gamma1, gamma2).  The flat layout used by the
// likelihood gradient and the optimizer is [alpha, beta_0..beta_p, gamma1, gamma2].
struct ParamVector {
  double alpha = 1.0;
  std::vector<double> beta;
  double gamma1 = 1.0;
  double gamma2 = 1.0;

  std::size_t dim() const noexcept { return beta.size() + 3; }
  std::size_t gamma1_index() const noexcept { return beta.size() + 1; }
  std::size_t gamma2_index() const noexcept { return beta.size() + 2; }

  std::vector<double> to_flat() const;
  static ParamVector from_flat(std::span<const double> flat);

  // 0 <= alpha <= 1, gamma1 > 0, gamma2 > 0, beta finite.
  bool is_feasible() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

class ModelVariant {
 public:
  static ModelVariant free_alpha() noexcept { return ModelVariant(false, 0.0); }
  // Throws DomainError unless 0 <= value <= 1.
  static ModelVariant fixed_alpha(double value);

  bool is_fixed() const noexcept { return fixed_; }
  double fixed_value() const noexcept { return value_; }

  friend bool operator==(const ModelVariant&, const ModelVariant&) = default;

 private:
  ModelVariant(bool fixed, double value) noexcept : fixed_(fixed), value_(value) {}
  bool fixed_;
  double value_;
};

double linear_predictor(const CovariateVector& x, std::span<const double> beta);

// exp(eta) / (1 + alpha exp(eta)), or exp(eta) on the alpha = 0 branch.
double phi(double alpha, double eta);

// Weibull in the (gamma1, gamma2) parameterization: shape 1/gamma1, scale 1/gamma2.
double weibull_cdf(double y, double gamma1, double gamma2);
double weibull_pdf(double y, double gamma1, double gamma2);
double weibull_quantile(double u, double gamma1, double gamma2);

double population_survival(double y, const CovariateVector& x, const ParamVector& theta);
double population_density(double y, const CovariateVector& x, const ParamVector& theta);
double cure_rate(const CovariateVector& x, const ParamVector& theta);

// Linear-predictor forms shared by the likelihood, the simulator and the
// functions above.  eta = x'beta; no feasibility checks.
namespace detail {

// log(1 + exp(t)) without overflow.
double softplus(double t) noexcept;

// log S_p(y) and log f_p(y) given eta.  May return -inf when a term underflows.
double log_survival_eta(double y, double eta, double alpha, double gamma1, double gamma2);
double log_density_eta(double y, double eta, double alpha, double gamma1, double gamma2);
double log_cure_rate_eta(double eta, double alpha);

}  // namespace detail

}  // namespace curecg
