#pragma once

// Monte Carlo bias/RMSE studies: simulate, initialize, fit, aggregate.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "curecg/model.hpp"
#include "curecg/optimizer.hpp"
#include "curecg/rng.hpp"
#include "curecg/simulator.hpp"

namespace curecg {

struct BiasRmse {
  double bias = 0.0;
  double rmse = 0.0;
};

// bias = mean(est) - truth, rmse = sqrt(mean((est - truth)^2)).
BiasRmse bias_rmse(std::span<const double> estimates, double truth);

struct MCConfig {
  Design design = BinaryDesign{};
  std::size_t replications = 500;
  ModelVariant variant = ModelVariant::free_alpha();
  NCGConfig optimizer{};
  SimSeed master_seed{};
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct ParameterSummary {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
};

struct Replication {
  std::size_t index = 0;
  bool succeeded = false;
  std::string failure;  // empty on success
  FitResult fit;
};

struct MCSummary {
  std::vector<ParameterSummary> parameters;  // beta_0..beta_p, gamma1, gamma2[, alpha]
  std::vector<ParameterSummary> cure_rates;  // p01, p00 (binary designs only)
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  double wall_seconds = 0.0;
  std::vector<Replication> replications;  // in replication order
};

// Seed of replication r: same master seed, stream shifted by r.
SimSeed replication_seed(const SimSeed& master, std::size_t r) noexcept;

// Simulate, initialize and fit one replication.  Never throws; failures are
// reported in the returned record.
Replication run_replication(const MCConfig& config, std::size_t r);

MCSummary run_study(const MCConfig& config);

// Bias and RMSE of cure_rate at x = 1 and x = 0 against design.p01 / p00.
std::vector<ParameterSummary> cure_rate_summary(const std::vector<ParamVector>& fits,
                                                const BinaryDesign& design);

// Aligned "Parameter | Bias | RMSE" table.
std::string format_table(const MCSummary& summary);

}  // namespace curecg
