#include "curecg/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "curecg/errors.hpp"

namespace curecg {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

void check_gamma(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !std::isfinite(gamma1) || !std::isfinite(gamma2)) {
    throw DomainError("Weibull parameters gamma1, gamma2 must be positive and finite");
  }
}

void check_theta(const CovariateVector& x, const ParamVector& theta) {
  if (x.size() != theta.beta.size()) {
    throw DimensionError("covariate length " + std::to_string(x.size()) +
                         " does not match beta length " + std::to_string(theta.beta.size()));
  }
  check_alpha(theta.alpha);
  check_gamma(theta.gamma1, theta.gamma2);
}

// log z with z = (gamma2 y)^(1/gamma1); y > 0.
double log_weibull_z(double y, double gamma1, double gamma2) {
  return (std::log(gamma2) + std::log(y)) / gamma1;
}

}  // namespace

CovariateVector::CovariateVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw DimensionError("covariate vector needs at least the intercept entry");
  }
  if (values_.front() != 1.0) {
    throw DomainError("first covariate entry is the intercept and must equal 1");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw DomainError("covariate entries must be finite");
    }
  }
}

CovariateVector CovariateVector::with_intercept(std::span<const double> covariates) {
  std::vector<double> v;
  v.reserve(covariates.size() + 1);
  v.push_back(1.0);
  v.insert(v.end(), covariates.begin(), covariates.end());
  return CovariateVector(std::move(v));
}

std::vector<double> ParamVector::to_flat() const {
  std::vector<double> flat;
  flat.reserve(dim());
  flat.push_back(alpha);
  flat.insert(flat.end(), beta.begin(), beta.end());
  flat.push_back(gamma1);
  flat.push_back(gamma2);
  return flat;
}

ParamVector ParamVector::from_flat(std::span<const double> flat) {
  if (flat.size() < 4) {
    throw DimensionError("flat parameter vector needs alpha, at least one beta, gamma1, gamma2");
  }
  ParamVector theta;
  theta.alpha = flat.front();
  theta.beta.assign(flat.begin() + 1, flat.end() - 2);
  theta.gamma1 = flat[flat.size() - 2];
  theta.gamma2 = flat[flat.size() - 1];
  return theta;
}

bool ParamVector::is_feasible() const noexcept {
  if (!(alpha >= 0.0 && alpha <= 1.0)) return false;
  if (!(gamma1 > 0.0 && gamma2 > 0.0) || !std::isfinite(gamma1) || !std::isfinite(gamma2)) {
    return false;
  }
  for (double b : beta) {
    if (!std::isfinite(b)) return false;
  }
  return !beta.empty();
}

ModelVariant ModelVariant::fixed_alpha(double value) {
  check_alpha(value);
  return ModelVariant(true, value);
}

double linear_predictor(const CovariateVector& x, std::span<const double> beta) {
  if (x.size() != beta.size()) {
    throw DimensionError("covariate length " + std::to_string(x.size()) +
                         " does not match beta length " + std::to_string(beta.size()));
  }
  double eta = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    eta += x[j] * beta[j];
  }
  if (!std::isfinite(eta)) {
    throw DomainError("non-finite linear predictor");
  }
  return eta;
}

double phi(double alpha, double eta) {
  check_alpha(alpha);
  if (uses_promotion_branch(alpha)) {
    return std::exp(eta);
  }
  if (eta > 30.0) {
    return 1.0 / (std::exp(-eta) + alpha);
  }
  const double e = std::exp(eta);
  return e / (1.0 + alpha * e);
}

double weibull_cdf(double y, double gamma1, double gamma2) {
  if (!(y >= 0.0)) {
    throw DomainError("weibull_cdf requires y >= 0");
  }
  check_gamma(gamma1, gamma2);
  if (y == 0.0) return 0.0;
  const double z = std::exp(log_weibull_z(y, gamma1, gamma2));
  return -std::expm1(-z);
}

double weibull_pdf(double y, double gamma1, double gamma2) {
  if (!(y > 0.0)) {
    throw DomainError("weibull_pdf requires y > 0");
  }
  check_gamma(gamma1, gamma2);
  const double log_z = log_weibull_z(y, gamma1, gamma2);
  const double z = std::exp(log_z);
  return std::exp(-std::log(gamma1) - std::log(y) + log_z - z);
}

double weibull_quantile(double u, double gamma1, double gamma2) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw DomainError("weibull_quantile requires 0 <= u < 1");
  }
  check_gamma(gamma1, gamma2);
  if (u == 0.0) return 0.0;
  return std::exp(gamma1 * std::log(-std::log1p(-u))) / gamma2;
}

double population_survival(double y, const CovariateVector& x, const ParamVector& theta) {
  if (!(y >= 0.0)) {
    throw DomainError("population_survival requires y >= 0");
  }
  check_theta(x, theta);
  const double eta = linear_predictor(x, theta.beta);
  return std::exp(detail::log_survival_eta(y, eta, theta.alpha, theta.gamma1, theta.gamma2));
}

double population_density(double y, const CovariateVector& x, const ParamVector& theta) {
  if (!(y > 0.0)) {
    throw DomainError("population_density requires y > 0");
  }
  check_theta(x, theta);
  const double eta = linear_predictor(x, theta.beta);
  return std::exp(detail::log_density_eta(y, eta, theta.alpha, theta.gamma1, theta.gamma2));
}

double cure_rate(const CovariateVector& x, const ParamVector& theta) {
  check_theta(x, theta);
  return std::exp(detail::log_cure_rate_eta(linear_predictor(x, theta.beta), theta.alpha));
}

namespace detail {

double softplus(double t) noexcept {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// With a = e^eta S(y), b = e^eta and S(y) = 1 - F(y):
//   1 - alpha phi F(y) = (1 + alpha a) / (1 + alpha b)
// so log S_p = [log1p(alpha a) - log1p(alpha b)] / alpha.
double log_survival_eta(double y, double eta, double alpha, double gamma1, double gamma2) {
  if (y == 0.0) return 0.0;
  const double z = std::exp(log_weibull_z(y, gamma1, gamma2));
  if (uses_promotion_branch(alpha)) {
    return -std::exp(eta) * -std::expm1(-z);
  }
  const double t_b = std::log(alpha) + eta;
  return (softplus(t_b - z) - softplus(t_b)) / alpha;
}

double log_density_eta(double y, double eta, double alpha, double gamma1, double gamma2) {
  const double log_z = log_weibull_z(y, gamma1, gamma2);
  const double z = std::exp(log_z);
  const double log_f = -std::log(gamma1) - std::log(y) + log_z - z;
  if (uses_promotion_branch(alpha)) {
    return -std::exp(eta) * -std::expm1(-z) + eta + log_f;
  }
  const double t_b = std::log(alpha) + eta;
  const double t_a = t_b - z;
  const double log_sp = (softplus(t_a) - softplus(t_b)) / alpha;
  return log_sp + eta + log_f - softplus(t_a);
}

double log_cure_rate_eta(double eta, double alpha) {
  if (uses_promotion_branch(alpha)) {
    return -std::exp(eta);
  }
  return -softplus(std::log(alpha) + eta) / alpha;
}

}  // namespace detail

}  // namespace curecg
