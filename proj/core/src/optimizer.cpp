#include "curecg/optimizer.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "curecg/errors.hpp"

namespace curecg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": vector lengths differ");
  }
}

// Components of d that push a coordinate already on a bound further out are
// dropped; the projection would cancel them and the Armijo prediction would
// overstate the attainable increase.
void drop_blocked_components(const ParamVector& theta, std::vector<double>& d) {
  const std::size_t a = 0;
  const std::size_t g1 = theta.gamma1_index();
  const std::size_t g2 = theta.gamma2_index();
  if ((theta.alpha >= 1.0 && d[a] > 0.0) || (theta.alpha <= kProjectionFloor && d[a] < 0.0)) {
    d[a] = 0.0;
  }
  if (theta.gamma1 <= kProjectionFloor && d[g1] < 0.0) d[g1] = 0.0;
  if (theta.gamma2 <= kProjectionFloor && d[g2] < 0.0) d[g2] = 0.0;
}

}  // namespace

void NCGConfig::validate() const {
  if (k_max < 1) throw DomainError("k_max must be a positive integer");
  if (!(lambda > 0.0 && lambda < 0.5)) throw DomainError("lambda must lie in (0, 1/2)");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (!(s_init > 0.0)) throw DomainError("s_init must be positive");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw DomainError("backtrack_factor must lie in (0, 1)");
  }
  if (max_backtracks < 1) throw DomainError("max_backtracks must be a positive integer");
}

ParamVector project(std::span<const double> raw) {
  for (double v : raw) {
    if (!std::isfinite(v)) throw DomainError("cannot project a non-finite parameter vector");
  }
  ParamVector theta = ParamVector::from_flat(raw);
  theta.alpha = std::max(kProjectionFloor, std::min(1.0, theta.alpha));
  theta.gamma1 = std::max(kProjectionFloor, theta.gamma1);
  theta.gamma2 = std::max(kProjectionFloor, theta.gamma2);
  return theta;
}

std::optional<double> hager_zhang_beta(std::span<const double> d, std::span<const double> g,
                                       std::span<const double> g_next) {
  check_same_size(d, g, "hager_zhang_beta");
  check_same_size(d, g_next, "hager_zhang_beta");
  std::vector<double> w(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) w[i] = g_next[i] - g[i];
  const double dw = dot(d, w);
  if (!(std::abs(dw) >= 1e-14)) return std::nullopt;
  const double ww = dot(w, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += (w[i] - 2.0 * d[i] * ww / dw) * g_next[i];
  }
  const double xi = acc / dw;
  if (!std::isfinite(xi)) return std::nullopt;
  return xi;
}

std::optional<LineSearchResult> armijo_line_search(
    const ParamVector& theta, double value, std::span<const double> d,
    std::span<const double> g, const ObjectiveFn& objective, const NCGConfig& config,
    const std::function<void(ParamVector&)>& pin) {
  const auto base = theta.to_flat();
  check_same_size(base, d, "armijo_line_search");
  check_same_size(base, g, "armijo_line_search");
  const double dg = dot(d, g);

  std::vector<double> trial(base.size());
  double step = config.s_init;
  for (int j = 0; j <= config.max_backtracks; ++j, step *= config.backtrack_factor) {
    for (std::size_t i = 0; i < base.size(); ++i) trial[i] = base[i] + step * d[i];
    bool finite = true;
    for (double v : trial) finite = finite && std::isfinite(v);
    if (!finite) continue;
    ParamVector candidate = project(trial);
    if (pin) pin(candidate);
    double f = -std::numeric_limits<double>::infinity();
    try {
      f = objective(candidate);
    } catch (const NumericError&) {
      continue;
    }
    if (std::isfinite(f) && f >= value + config.lambda * step * dg) {
      return LineSearchResult{step, std::move(candidate), f, j};
    }
  }
  return std::nullopt;
}

double relative_change(const ParamVector& next, const ParamVector& prev) {
  const auto a = next.to_flat();
  const auto b = prev.to_flat();
  check_same_size(a, b, "relative_change");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    const double r = std::abs(b[i]) < 1e-8 ? diff : diff / b[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

FitResult ncg_maximize(const ObjectiveFn& objective, const GradientFn& gradient_fn,
                       const ParamVector& theta0, const ModelVariant& variant,
                       const NCGConfig& config) {
  config.validate();
  std::function<void(ParamVector&)> pin;
  if (variant.is_fixed()) {
    pin = [a = variant.fixed_value()](ParamVector& t) { t.alpha = a; };
  }
  auto masked_gradient = [&](const ParamVector& t) {
    auto g = gradient_fn(t);
    if (g.size() != t.dim()) throw DimensionError("gradient length does not match theta");
    if (variant.is_fixed()) g[0] = 0.0;
    return g;
  };

  ParamVector theta = theta0;
  if (pin) pin(theta);
  if (!theta.is_feasible()) throw DomainError("initial parameter vector is infeasible");
  if (!variant.is_fixed() && theta.alpha < kProjectionFloor) theta.alpha = kProjectionFloor;

  double value = objective(theta);
  if (!std::isfinite(value)) {
    throw NumericError("objective is not finite at the initial parameter vector");
  }

  FitResult result;
  result.status = "max_iterations";
  auto g = masked_gradient(theta);
  auto d = g;

  int k = 0;
  while (k < config.k_max) {
    bool restarted = false;
    drop_blocked_components(theta, d);
    if (!(dot(d, g) > 0.0)) {
      d = g;
      drop_blocked_components(theta, d);
      restarted = true;
    }
    auto ls = dot(d, g) > 0.0 ? armijo_line_search(theta, value, d, g, objective, config, pin)
                              : std::nullopt;
    if (!ls && !restarted) {
      d = g;
      drop_blocked_components(theta, d);
      restarted = true;
      if (dot(d, g) > 0.0) ls = armijo_line_search(theta, value, d, g, objective, config, pin);
    }
    if (!ls) {
      result.status = "line_search_failed";
      break;
    }

    auto g_next = masked_gradient(ls->theta);
    const double rel = relative_change(ls->theta, theta);
    if (config.record_trace) {
      result.trace.push_back(
          TraceEntry{k, value, ls->value, ls->step, dot(d, g), rel, restarted, ls->theta});
    }

    std::optional<double> xi;
    if (config.conjugacy == ConjugacyForm::kAscent) {
      std::vector<double> neg_g(g.size()), neg_g_next(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        neg_g[i] = -g[i];
        neg_g_next[i] = -g_next[i];
      }
      xi = hager_zhang_beta(d, neg_g, neg_g_next);
    } else {
      xi = hager_zhang_beta(d, g, g_next);
    }
    std::vector<double> d_next = g_next;
    if (xi) {
      for (std::size_t i = 0; i < d.size(); ++i) d_next[i] += *xi * d[i];
    }

    theta = std::move(ls->theta);
    value = ls->value;
    g = std::move(g_next);
    d = std::move(d_next);
    ++k;
    if (rel < config.tol) {
      result.converged = true;
      result.status = "converged";
      break;
    }
  }

  result.theta_hat = std::move(theta);
  result.loglik = value;
  result.iterations = k;
  return result;
}

FitResult fit_model(const Dataset& data, const ParamVector& theta0, const ModelVariant& variant,
                    const NCGConfig& config) {
  auto objective = [&data](const ParamVector& t) { return log_likelihood(t, data); };
  auto grad = [&data, &variant](const ParamVector& t) { return gradient(t, data, variant); };
  return ncg_maximize(objective, grad, theta0, variant, config);
}

}  // namespace curecg
