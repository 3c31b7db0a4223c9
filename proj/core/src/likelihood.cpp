#include "curecg/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curecg/errors.hpp"

namespace curecg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sigmoid(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// psi(t) / alpha^2 where psi(t) = log1p(t) - t / (1 + t), t = alpha * c = exp(log_t).
// Series psi(t) = sum_{k>=2} (-1)^k (k-1)/k t^k keeps the small-alpha limit c^2 / 2 exact.
double psi_over_alpha_sq(double log_t, double log_c, double alpha) {
  const double t = std::exp(log_t);
  if (t < 1e-2) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 2; k <= 14; ++k) {
      const double term = static_cast<double>(k - 1) / k * power;
      sum += (k % 2 == 0) ? term : -term;
      power *= t;
    }
    return std::exp(2.0 * log_c) * sum;
  }
  return (detail::softplus(log_t) - sigmoid(log_t)) / (alpha * alpha);
}

void check_inputs(const ParamVector& theta, const Dataset& data) {
  if (data.empty()) {
    throw DomainError("log-likelihood needs at least one record");
  }
  if (data.covariate_dim() != theta.beta.size()) {
    throw DimensionError("dataset covariate length " + std::to_string(data.covariate_dim()) +
                         " does not match beta length " + std::to_string(theta.beta.size()));
  }
  if (!theta.is_feasible()) {
    throw DomainError("theta outside the feasible set");
  }
}

}  // namespace

Dataset::Dataset(std::vector<SurvivalRecord> records) {
  records_.reserve(records.size());
  for (auto& r : records) {
    add(std::move(r));
  }
}

void Dataset::validate(const SurvivalRecord& r, std::size_t expected_dim) {
  if (!(r.y > 0.0) || !std::isfinite(r.y)) {
    throw DomainError("observed time must be positive and finite, got " + std::to_string(r.y));
  }
  if (r.delta != 0 && r.delta != 1) {
    throw DomainError("censoring indicator must be 0 or 1");
  }
  if (expected_dim != 0 && r.x.size() != expected_dim) {
    throw DimensionError("all records must share the same covariate length");
  }
}

void Dataset::add(SurvivalRecord record) {
  validate(record, covariate_dim());
  records_.push_back(std::move(record));
}

std::size_t Dataset::covariate_dim() const noexcept {
  return records_.empty() ? 0 : records_.front().x.size();
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.records_.reserve(indices.size());
  for (std::size_t i : indices) {
    out.records_.push_back(records_.at(i));
  }
  return out;
}

double log_likelihood(const ParamVector& theta, const Dataset& data) {
  check_inputs(theta, data);
  double total = 0.0;
  for (const auto& r : data) {
    const double eta = linear_predictor(r.x, theta.beta);
    const double term =
        r.delta == 1 ? detail::log_density_eta(r.y, eta, theta.alpha, theta.gamma1, theta.gamma2)
                     : detail::log_survival_eta(r.y, eta, theta.alpha, theta.gamma1, theta.gamma2);
    if (!std::isfinite(term)) return kNegInf;
    total += term;
  }
  return std::isfinite(total) ? total : kNegInf;
}

// Per record, with e = exp(eta), S = exp(-z), z = (gamma2 y)^(1/gamma1),
// a = e S, b = e, A = alpha a, B = alpha b:
//   l = [log1p(A) - log1p(B)] / alpha + delta (eta + log f - log1p(A))
//   dl/deta   = a/(1+A) - b/(1+B) + delta/(1+A)
//   dl/dz     = -(a + delta)/(1+A)           (plus delta d(log z) from log f)
//   dl/dalpha = [psi(B) - psi(A)] / alpha^2 - delta a/(1+A)
// On the alpha = 0 branch A = B = 0 and the alpha derivative takes its limit.
LogLikEval log_likelihood_and_gradient(const ParamVector& theta, const Dataset& data,
                                       const ModelVariant& variant) {
  check_inputs(theta, data);
  const std::size_t p1 = theta.beta.size();
  LogLikEval out;
  out.gradient.assign(theta.dim(), 0.0);
  auto& g = out.gradient;

  const double alpha = theta.alpha;
  const double g1 = theta.gamma1;
  const double g2 = theta.gamma2;
  const bool promotion = uses_promotion_branch(alpha);
  const double log_alpha = promotion ? 0.0 : std::log(alpha);
  const double log_g1 = std::log(g1);
  const double log_g2 = std::log(g2);

  double value = 0.0;
  double d_alpha = 0.0;
  double d_g1 = 0.0;
  double d_g2 = 0.0;

  for (const auto& r : data) {
    const double eta = linear_predictor(r.x, theta.beta);
    const double log_y = std::log(r.y);
    const double log_z = (log_g2 + log_y) / g1;
    const double z = std::exp(log_z);
    const double delta = r.delta;
    const double log_f = -log_g1 - log_y + log_z - z;

    double term = 0.0;
    double d_eta = 0.0;
    double d_z = 0.0;
    if (promotion) {
      const double e = std::exp(eta);
      const double surv = std::exp(-z);
      const double cdf = -std::expm1(-z);
      term = -e * cdf + delta * (eta + log_f);
      d_eta = -e * cdf + delta;
      d_z = -(e * surv + delta);
      // limit of [psi(B) - psi(A)] / alpha^2 is (b^2 - a^2) / 2
      d_alpha += 0.5 * e * e * (1.0 - surv * surv) - delta * e * surv;
    } else {
      const double t_b = log_alpha + eta;
      const double t_a = t_b - z;
      const double sp_a = detail::softplus(t_a);
      const double sp_b = detail::softplus(t_b);
      term = (sp_a - sp_b) / alpha + delta * (eta + log_f - sp_a);

      const double a_frac = 1.0 / (std::exp(z - eta) + alpha);  // a / (1 + A)
      const double b_frac = 1.0 / (std::exp(-eta) + alpha);     // b / (1 + B)
      const double inv_1pa = sigmoid(-t_a);                      // 1 / (1 + A)
      d_eta = a_frac - b_frac + delta * inv_1pa;
      d_z = -(a_frac + delta * inv_1pa);
      d_alpha += psi_over_alpha_sq(t_b, eta, alpha) - psi_over_alpha_sq(t_a, eta - z, alpha) -
                 delta * a_frac;
    }
    if (!std::isfinite(term)) {
      throw NumericError("log-likelihood is not finite at the evaluation point");
    }
    value += term;

    for (std::size_t j = 0; j < p1; ++j) {
      g[1 + j] += r.x[j] * d_eta;
    }
    // dz/dgamma1 = -z log z / gamma1, dz/dgamma2 = z / (gamma1 gamma2)
    d_g1 += d_z * (-z * log_z / g1) + delta * (-1.0 / g1 - log_z / g1);
    d_g2 += d_z * (z / (g1 * g2)) + delta / (g1 * g2);
  }

  g[0] = variant.is_fixed() ? 0.0 : d_alpha;
  g[theta.gamma1_index()] = d_g1;
  g[theta.gamma2_index()] = d_g2;
  for (double gj : g) {
    if (!std::isfinite(gj)) {
      throw NumericError("gradient is not finite at the evaluation point");
    }
  }
  out.value = value;
  return out;
}

std::vector<double> gradient(const ParamVector& theta, const Dataset& data,
                             const ModelVariant& variant) {
  return log_likelihood_and_gradient(theta, data, variant).gradient;
}

std::vector<double> fd_gradient(const ParamVector& theta, const Dataset& data, double h) {
  if (!(h > 0.0)) {
    throw DomainError("finite-difference step must be positive");
  }
  const auto base = theta.to_flat();
  std::vector<double> grad(base.size(), 0.0);
  for (std::size_t j = 0; j < base.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(base[j]));
    auto plus = base;
    auto minus = base;
    plus[j] += step;
    minus[j] -= step;
    const auto theta_plus = ParamVector::from_flat(plus);
    const auto theta_minus = ParamVector::from_flat(minus);
    if (!theta_plus.is_feasible() || !theta_minus.is_feasible()) {
      throw DomainError("finite-difference stencil leaves the feasible set in coordinate " +
                        std::to_string(j));
    }
    const double lp = log_likelihood(theta_plus, data);
    const double lm = log_likelihood(theta_minus, data);
    if (!std::isfinite(lp) || !std::isfinite(lm)) {
      throw NumericError("log-likelihood is not finite on the finite-difference stencil");
    }
    grad[j] = (lp - lm) / (2.0 * step);
  }
  return grad;
}

}  // namespace curecg
