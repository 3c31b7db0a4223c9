#include "curecg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "curecg/errors.hpp"
#include "curecg/initializer.hpp"
#include "curecg/normal.hpp"
#include "curecg/parallel.hpp"

namespace curecg {

namespace {

constexpr double kUClamp = 1e-12;

double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

BootstrapResult bootstrap_se(const Dataset& data, const ModelVariant& variant, std::size_t B,
                             const SimSeed& seed, const BootstrapOptions& options) {
  if (B < 2) throw DomainError("bootstrap needs B >= 2");
  if (data.empty()) throw DomainError("bootstrap needs a non-empty dataset");
  options.optimizer.validate();
  const std::size_t n = data.size();

  std::vector<std::optional<std::vector<double>>> estimates(B);
  parallel_for(B, options.threads, [&](std::size_t b) {
    std::vector<std::size_t> idx;
    if (options.resampler) {
      idx = options.resampler(b, n);
    } else {
      auto rng = SplitMix64::for_substream(seed, b);
      idx.resize(n);
      for (auto& i : idx) i = rng.below(n);
    }
    try {
      const Dataset resample = data.subset(idx);
      const auto init = initialize(resample, variant);
      const auto fit = fit_model(resample, init.theta0, variant, options.optimizer);
      if (fit.converged) estimates[b] = fit.theta_hat.to_flat();
    } catch (const std::exception&) {
      // counted as a failure below
    }
  });

  BootstrapResult result;
  result.B = B;
  for (auto& e : estimates) {
    if (e) {
      result.replicate_estimates.push_back(std::move(*e));
    } else {
      ++result.failures;
    }
  }
  if (2 * result.failures > B) {
    throw NumericError("bootstrap unstable: " + std::to_string(result.failures) + " of " +
                       std::to_string(B) + " replicates failed");
  }
  const std::size_t ok = result.replicate_estimates.size();
  if (ok < 2) throw NumericError("bootstrap needs at least two successful replicates");

  const std::size_t dim = result.replicate_estimates.front().size();
  result.se.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    // shifted by the first replicate so that identical replicates give exactly 0
    const double shift = result.replicate_estimates.front()[j];
    double mean = 0.0;
    for (const auto& est : result.replicate_estimates) mean += est[j] - shift;
    mean /= static_cast<double>(ok);
    double ss = 0.0;
    for (const auto& est : result.replicate_estimates) {
      const double dev = est[j] - shift - mean;
      ss += dev * dev;
    }
    result.se[j] = std::sqrt(ss / static_cast<double>(ok - 1));
  }
  return result;
}

ResidualSet quantile_residuals(const ParamVector& theta_hat, const Dataset& data,
                               std::size_t m_sets, const SimSeed& seed) {
  if (m_sets < 1) throw DomainError("need at least one residual set");
  if (data.empty()) throw DomainError("residuals need a non-empty dataset");
  if (!theta_hat.is_feasible()) throw DomainError("theta_hat outside the feasible set");
  const std::size_t n = data.size();

  std::vector<double> lower(n);  // 1 - S_p(y_i)
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = 1.0 - population_survival(data[i].y, data[i].x, theta_hat);
  }

  ResidualSet out;
  out.seed = seed;
  out.sets.assign(m_sets, std::vector<double>(n));
  for (std::size_t s = 0; s < m_sets; ++s) {
    auto rng = SplitMix64::for_substream(seed, s);
    for (std::size_t i = 0; i < n; ++i) {
      double u = lower[i];
      if (data[i].delta == 0) u = lower[i] + (1.0 - lower[i]) * rng.uniform();
      if (u < kUClamp || u > 1.0 - kUClamp) {
        u = std::clamp(u, kUClamp, 1.0 - kUClamp);
        ++out.clamped;
      }
      out.sets[s][i] = normal_quantile(u);
    }
  }

  std::vector<std::vector<double>> sorted = out.sets;
  for (auto& set : sorted) std::sort(set.begin(), set.end());
  out.residuals.resize(n);
  std::vector<double> column(m_sets);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < m_sets; ++s) column[s] = sorted[s][i];
    out.residuals[i] = median_inplace(column);
  }
  return out;
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double p = 0.0;
  if (lambda < 1.0) {
    // P(K <= lambda) = sqrt(2 pi)/lambda sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * c);
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    p = 1.0 - cdf;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
      p += (k % 2 == 1) ? term : -term;
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

KSResult ks_normality_test(const std::vector<double>& residuals) {
  if (residuals.size() < 8) {
    throw DomainError("KS test with the asymptotic p-value needs at least 8 residuals");
  }
  for (double r : residuals) {
    if (!std::isfinite(r)) throw DomainError("residuals must be finite");
  }
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return KSResult{d, kolmogorov_survival(std::sqrt(n) * d)};
}

std::vector<std::pair<double, double>> qq_data(const std::vector<double>& residuals) {
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    pairs.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / n), sorted[i]);
  }
  return pairs;
}

}  // namespace curecg
