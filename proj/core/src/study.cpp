#include "curecg/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "curecg/errors.hpp"
#include "curecg/initializer.hpp"
#include "curecg/parallel.hpp"

namespace curecg {

namespace {

ParameterSummary summarize(std::string name, std::span<const double> est, double truth) {
  double mean = 0.0;
  for (double v : est) mean += v;
  mean /= static_cast<double>(est.size());
  const auto br = bias_rmse(est, truth);
  return ParameterSummary{std::move(name), truth, mean, br.bias, br.rmse};
}

}  // namespace

BiasRmse bias_rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw DomainError("bias_rmse needs at least one estimate");
  double sum = 0.0;
  double sq = 0.0;
  for (double v : estimates) {
    sum += v - truth;
    sq += (v - truth) * (v - truth);
  }
  const double n = static_cast<double>(estimates.size());
  return BiasRmse{sum / n, std::sqrt(sq / n)};
}

SimSeed replication_seed(const SimSeed& master, std::size_t r) noexcept {
  return SimSeed{master.seed, (master.stream << 32) + r};
}

Replication run_replication(const MCConfig& config, std::size_t r) {
  Replication rep;
  rep.index = r;
  try {
    const Dataset data = generate(config.design, replication_seed(config.master_seed, r));
    const auto init = initialize(data, config.variant);
    rep.fit = fit_model(data, init.theta0, config.variant, config.optimizer);
    rep.succeeded = rep.fit.converged;
    if (!rep.succeeded) rep.failure = rep.fit.status;
  } catch (const std::exception& e) {
    rep.succeeded = false;
    rep.failure = e.what();
  }
  return rep;
}

MCSummary run_study(const MCConfig& config) {
  if (config.replications < 1) throw DomainError("replications must be >= 1");
  validate_design(config.design);
  config.optimizer.validate();

  const auto start = std::chrono::steady_clock::now();
  MCSummary summary;
  summary.attempted = config.replications;
  summary.replications.resize(config.replications);
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    summary.replications[r] = run_replication(config, r);
  });
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<ParamVector> fits;
  for (const auto& rep : summary.replications) {
    if (rep.succeeded) fits.push_back(rep.fit.theta_hat);
  }
  summary.succeeded = fits.size();
  summary.failed = summary.attempted - summary.succeeded;
  if (fits.empty()) {
    throw NumericError("all " + std::to_string(summary.attempted) + " replications failed; first: " +
                       summary.replications.front().failure);
  }

  const ParamVector truth = design_truth(config.design);
  std::vector<double> col(fits.size());
  auto column = [&](auto get) {
    for (std::size_t i = 0; i < fits.size(); ++i) col[i] = get(fits[i]);
    return std::span<const double>(col);
  };
  for (std::size_t j = 0; j < truth.beta.size(); ++j) {
    summary.parameters.push_back(summarize(
        "beta" + std::to_string(j), column([j](const ParamVector& t) { return t.beta[j]; }),
        truth.beta[j]));
  }
  summary.parameters.push_back(summarize(
      "gamma1", column([](const ParamVector& t) { return t.gamma1; }), truth.gamma1));
  summary.parameters.push_back(summarize(
      "gamma2", column([](const ParamVector& t) { return t.gamma2; }), truth.gamma2));
  if (!config.variant.is_fixed()) {
    summary.parameters.push_back(summarize(
        "alpha", column([](const ParamVector& t) { return t.alpha; }), truth.alpha));
  }
  if (const auto* binary = std::get_if<BinaryDesign>(&config.design)) {
    summary.cure_rates = cure_rate_summary(fits, *binary);
  }
  return summary;
}

std::vector<ParameterSummary> cure_rate_summary(const std::vector<ParamVector>& fits,
                                                const BinaryDesign& design) {
  if (fits.empty()) throw DomainError("cure_rate_summary needs at least one fit");
  std::vector<double> p1, p0;
  p1.reserve(fits.size());
  p0.reserve(fits.size());
  const CovariateVector x1{1.0, 1.0};
  const CovariateVector x0{1.0, 0.0};
  for (const auto& t : fits) {
    p1.push_back(cure_rate(x1, t));
    p0.push_back(cure_rate(x0, t));
  }
  return {summarize("p01", p1, design.p01), summarize("p00", p0, design.p00)};
}

std::string format_table(const MCSummary& summary) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-18s %10s %10s\n", "Parameter", "Bias", "RMSE");
  out << line;
  auto rows = [&](const std::vector<ParameterSummary>& items) {
    for (const auto& p : items) {
      char label[64];
      std::snprintf(label, sizeof label, "%s=%.3f", p.name.c_str(), p.truth);
      std::snprintf(line, sizeof line, "%-18s %10.3f %10.3f\n", label, p.bias, p.rmse);
      out << line;
    }
  };
  rows(summary.parameters);
  if (!summary.cure_rates.empty()) {
    out << "\n";
    rows(summary.cure_rates);
  }
  std::snprintf(line, sizeof line, "\nreplications: %zu attempted, %zu succeeded, %zu excluded\n",
                summary.attempted, summary.succeeded, summary.failed);
  out << line;
  std::snprintf(line, sizeof line, "wall-clock: %.2f s\n", summary.wall_seconds);
  out << line;
  return out.str();
}

}  // namespace curecg
