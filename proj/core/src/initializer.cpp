#include "curecg/initializer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "curecg/errors.hpp"

namespace curecg {

namespace {

// Gamma(1 + 2 g) / Gamma(1 + g)^2 - 1, the squared coefficient of variation.
double weibull_cv2(double gamma1) {
  return std::exp(std::lgamma(1.0 + 2.0 * gamma1) - 2.0 * std::lgamma(1.0 + gamma1)) - 1.0;
}

CovariateVector level_vector(std::size_t dim, double value) {
  std::vector<double> v(dim, 0.0);
  v[0] = 1.0;
  v[1] = value;
  return CovariateVector(std::move(v));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double KMCurve::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(std::distance(times.begin(), it)) - 1];
}

KMCurve kaplan_meier(const Dataset& data) {
  if (data.empty()) throw DomainError("Kaplan-Meier estimate needs at least one record");
  std::vector<std::pair<double, int>> obs;
  obs.reserve(data.size());
  for (const auto& r : data) obs.emplace_back(r.y, r.delta);
  // events (delta = 1) sort ahead of censorings at equal times
  std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  });

  KMCurve curve;
  double s = 1.0;
  std::size_t at_risk = obs.size();
  std::size_t i = 0;
  while (i < obs.size()) {
    const double t = obs[i].first;
    std::size_t events = 0;
    std::size_t tied = 0;
    while (i + tied < obs.size() && obs[i + tied].first == t) {
      events += static_cast<std::size_t>(obs[i + tied].second);
      ++tied;
    }
    if (events > 0) {
      s *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      curve.times.push_back(t);
      curve.survival.push_back(s);
    }
    at_risk -= tied;
    i += tied;
  }
  return curve;
}

double km_cure_estimate(const Dataset& data) {
  const auto curve = kaplan_meier(data);
  double y_max = 0.0;
  for (const auto& r : data) y_max = std::max(y_max, r.y);
  return curve.at(y_max);
}

double linear_predictor_for_cure_rate(double p, double alpha) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("cure rate must lie strictly between 0 and 1");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1]");
  }
  if (uses_promotion_branch(alpha)) {
    return std::log(-std::log(p));
  }
  // p^-alpha - 1 = expm1(-alpha log p)
  return std::log(std::expm1(-alpha * std::log(p)) / alpha);
}

std::pair<double, double> solve_betas_from_cure_rates(double alpha, double p_a, double p_b,
                                                      double x_a, double x_b) {
  if (x_a == x_b) throw DomainError("covariate levels must differ");
  const double eta_a = linear_predictor_for_cure_rate(p_a, alpha);
  const double eta_b = linear_predictor_for_cure_rate(p_b, alpha);
  const double beta1 = (eta_a - eta_b) / (x_a - x_b);
  const double beta0 = eta_b - beta1 * x_b;
  return {beta0, beta1};
}

std::pair<double, double> moment_match_weibull(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance)) {
    throw DomainError("moment matching needs a positive mean and variance");
  }
  const double target = variance / (mean * mean);
  double lo = kBisectionLow;
  double hi = kBisectionHigh;
  const double f_lo = weibull_cv2(lo);
  const double f_hi = weibull_cv2(hi);
  if (target < f_lo || target > f_hi) {
    std::ostringstream msg;
    msg << "squared coefficient of variation " << target << " outside the range [" << f_lo
        << ", " << f_hi << "] reachable with gamma1 in [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  // cv2 is increasing in gamma1
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (weibull_cv2(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double gamma1 = 0.5 * (lo + hi);
  const double gamma2 = std::exp(std::lgamma(1.0 + gamma1)) / mean;
  return {gamma1, gamma2};
}

std::pair<double, double> moment_match_weibull(const Dataset& data) {
  if (data.size() < 2) throw DomainError("moment matching needs at least two records");
  double mean = 0.0;
  for (const auto& r : data) mean += r.y;
  mean /= static_cast<double>(data.size());
  double ss = 0.0;
  for (const auto& r : data) ss += (r.y - mean) * (r.y - mean);
  const double variance = ss / static_cast<double>(data.size() - 1);
  return moment_match_weibull(mean, variance);
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

CovariateLevels levels_from_values(const Dataset& data, const CovariateVector& x_a,
                                   const CovariateVector& x_b) {
  CovariateLevels levels{x_a, {}, x_b, {}};
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].x == x_a) levels.idx_a.push_back(i);
    if (data[i].x == x_b) levels.idx_b.push_back(i);
  }
  return levels;
}

CovariateLevels default_levels(const Dataset& data, std::size_t max_discrete) {
  if (data.covariate_dim() < 2) {
    throw DomainError("initializer needs at least one covariate besides the intercept");
  }
  const std::size_t dim = data.covariate_dim();
  std::vector<double> col;
  col.reserve(data.size());
  for (const auto& r : data) col.push_back(r.x[1]);
  const std::set<double> distinct(col.begin(), col.end());
  if (distinct.size() < 2) {
    throw DomainError("first covariate takes a single value; cannot form two levels");
  }

  CovariateLevels levels{CovariateVector(), {}, CovariateVector(), {}};
  if (distinct.size() <= max_discrete) {
    const double hi = *distinct.rbegin();
    const double lo = *distinct.begin();
    levels.x_a = level_vector(dim, hi);
    levels.x_b = level_vector(dim, lo);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i] == hi) levels.idx_a.push_back(i);
      if (col[i] == lo) levels.idx_b.push_back(i);
    }
    return levels;
  }

  std::vector<double> sorted = col;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t last = sorted.size() - 1;
  for (std::size_t parts : {4, 3, 2}) {
    const double cut_lo = sorted[last / parts];
    const double cut_hi = sorted[last - last / parts];
    levels.idx_a.clear();
    levels.idx_b.clear();
    std::vector<double> upper, lower;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i] >= cut_hi) {
        levels.idx_a.push_back(i);
        upper.push_back(col[i]);
      }
      if (col[i] <= cut_lo) {
        levels.idx_b.push_back(i);
        lower.push_back(col[i]);
      }
    }
    levels.x_a = level_vector(dim, median_of(upper));
    levels.x_b = level_vector(dim, median_of(lower));
    const double p_a = km_cure_estimate(data.subset(levels.idx_a));
    const double p_b = km_cure_estimate(data.subset(levels.idx_b));
    if (p_a > 0.0 && p_a < 1.0 && p_b > 0.0 && p_b < 1.0) break;
  }
  return levels;
}

InitialGuess select_initial(const Dataset& data, const CovariateLevels& levels,
                            const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw DomainError("alpha grid is empty");
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha grid values must lie in [0, 1]");
  }
  if (levels.idx_a.empty() || levels.idx_b.empty()) {
    throw DomainError("both covariate levels must be present in the data");
  }
  if (levels.x_a.size() != data.covariate_dim() || levels.x_b.size() != data.covariate_dim() ||
      data.covariate_dim() < 2) {
    throw DimensionError("covariate levels do not match the dataset");
  }

  const double p_a = km_cure_estimate(data.subset(levels.idx_a));
  const double p_b = km_cure_estimate(data.subset(levels.idx_b));
  const auto [gamma1, gamma2] = moment_match_weibull(data);
  const bool usable = p_a > 0.0 && p_a < 1.0 && p_b > 0.0 && p_b < 1.0;

  InitialGuess best;
  best.loglik0 = -std::numeric_limits<double>::infinity();
  bool found = false;
  if (usable) {
    for (double alpha : alpha_grid) {
      const auto [b0, b1] = solve_betas_from_cure_rates(alpha, p_a, p_b, levels.x_a[1], levels.x_b[1]);
      ParamVector theta;
      theta.alpha = alpha;
      theta.beta.assign(data.covariate_dim(), 0.0);
      theta.beta[0] = b0;
      theta.beta[1] = b1;
      theta.gamma1 = gamma1;
      theta.gamma2 = gamma2;
      const double ll = log_likelihood(theta, data);
      if (!std::isfinite(ll)) continue;
      best.alpha_grid_used.push_back(alpha);
      if (!found || ll > best.loglik0) {
        best.theta0 = theta;
        best.loglik0 = ll;
        found = true;
      }
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "no usable initial value: Kaplan-Meier cure estimates (" << p_a << ", " << p_b
        << ") must lie strictly inside (0, 1)";
    throw DomainError(msg.str());
  }
  return best;
}

InitialGuess select_initial(const Dataset& data, const CovariateVector& x_low,
                            const CovariateVector& x_high, const std::vector<double>& alpha_grid) {
  return select_initial(data, levels_from_values(data, x_high, x_low), alpha_grid);
}

InitialGuess initialize(const Dataset& data, const ModelVariant& variant) {
  const auto levels = default_levels(data);
  const auto grid =
      variant.is_fixed() ? std::vector<double>{variant.fixed_value()} : default_alpha_grid();
  return select_initial(data, levels, grid);
}

}  // namespace curecg
