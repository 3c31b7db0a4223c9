#pragma once

// Post-fit inference: nonparametric bootstrap standard errors, randomized
// quantile residuals, and a Kolmogorov-Smirnov normality check.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "curecg/likelihood.hpp"
#include "curecg/model.hpp"
#include "curecg/optimizer.hpp"
#include "curecg/rng.hpp"

namespace curecg {

struct BootstrapResult {
  std::size_t B = 0;
  std::vector<double> se;  // flat layout (alpha, beta..., gamma1, gamma2)
  std::vector<std::vector<double>> replicate_estimates;  // successful replicates only
  std::size_t failures = 0;
};

// Indices of one resample of size n for replicate b.
using Resampler = std::function<std::vector<std::size_t>(std::size_t b, std::size_t n)>;

struct BootstrapOptions {
  NCGConfig optimizer{};
  unsigned threads = 0;
  Resampler resampler;  // empty = sample with replacement from substream b of the seed
};

// Each replicate is re-initialized from its own resample, then fitted.  Throws
// NumericError when more than half the replicates fail or fewer than two succeed.
BootstrapResult bootstrap_se(const Dataset& data, const ModelVariant& variant, std::size_t B,
                             const SimSeed& seed, const BootstrapOptions& options = {});

struct ResidualSet {
  std::vector<double> residuals;          // coordinatewise median of the sorted sets
  std::vector<std::vector<double>> sets;  // each set in record order
  std::size_t clamped = 0;                // u values pulled into [1e-12, 1 - 1e-12]
  SimSeed seed{};
};

// u_i = 1 - S_p(y_i) for events and u_i ~ Uniform(1 - S_p(y_i), 1) for censored
// records; r_i = Phi^{-1}(u_i).  Set s draws from substream s of the seed.
ResidualSet quantile_residuals(const ParamVector& theta_hat, const Dataset& data,
                               std::size_t m_sets, const SimSeed& seed);

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample KS against N(0, 1) with the asymptotic Kolmogorov p-value.
KSResult ks_normality_test(const std::vector<double>& residuals);

// Upper tail of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// (Phi^{-1}((i - 0.5)/n), r_(i)) for the sorted residuals.
std::vector<std::pair<double, double>> qq_data(const std::vector<double>& residuals);

}  // namespace curecg
