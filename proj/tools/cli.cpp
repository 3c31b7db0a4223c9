#include "cli.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "curecg/diagnostics.hpp"
#include "curecg/errors.hpp"
#include "curecg/initializer.hpp"
#include "curecg/io.hpp"
#include "curecg/study.hpp"

namespace curecg::cli {

namespace {

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& ext) {
  std::filesystem::path p = out;
  if (p.has_extension()) {
    p.replace_extension(ext);
  } else {
    p += ext;
  }
  return p;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix) {
  std::filesystem::path p = prefix;
  p += suffix;
  return p;
}

ModelVariant variant_of(const RunConfig& config) {
  return config.alpha ? ModelVariant::fixed_alpha(*config.alpha) : ModelVariant::free_alpha();
}

CLI::Validator open_interval(double lo, double hi) {
  return CLI::Validator(
      [lo, hi](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > lo && v < hi)) {
          std::ostringstream msg;
          msg << "value " << s << " must lie in (" << lo << ", " << hi << ")";
          return msg.str();
        }
        return {};
      },
      "in (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

void add_optimizer_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--k-max", c.optimizer.k_max, "Maximum NCG iterations")
      ->check(CLI::Range(1, 1000000));
  sub->add_option("--lambda", c.optimizer.lambda, "Armijo constant, 0 < lambda < 0.5")
      ->check(open_interval(0.0, 0.5));
  sub->add_option("--tol", c.optimizer.tol, "Relative-change tolerance")
      ->check(open_interval(0.0, HUGE_VAL));
}

void add_variant_option(CLI::App* sub, RunConfig& c) {
  sub->add_option("--alpha", c.alpha, "Fix the Box-Cox index at this value")
      ->check(CLI::Range(0.0, 1.0));
}

void add_seed_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "Random seed (falls back to $CURECG_SEED)")
      ->envname("CURECG_SEED");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

std::string estimate_table(const FitResult& fit) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  const auto names = parameter_names(fit.theta_hat.beta.size());
  const auto flat = fit.theta_hat.to_flat();
  os << std::left << std::setw(12) << "Parameter" << std::right << std::setw(14) << "Estimate"
     << '\n';
  for (std::size_t j = 0; j < names.size(); ++j) {
    os << std::left << std::setw(12) << names[j] << std::right << std::setw(14) << flat[j]
       << '\n';
  }
  os << "\nlog-likelihood: " << fit.loglik << '\n'
     << "iterations: " << fit.iterations << " (" << fit.status << ")\n";
  return os.str();
}

std::string bootstrap_table(const BootstrapResult& result) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  const auto names = parameter_names(result.se.size() - 3);
  os << std::left << std::setw(12) << "Parameter" << std::right << std::setw(14) << "s.e." << '\n';
  for (std::size_t j = 0; j < names.size(); ++j) {
    os << std::left << std::setw(12) << names[j] << std::right << std::setw(14) << result.se[j]
       << '\n';
  }
  os << "\nB = " << result.B << ", failures = " << result.failures << '\n';
  return os.str();
}

ParamVector fallback_start(const Dataset& data, const ModelVariant& variant) {
  ParamVector theta;
  theta.alpha = variant.is_fixed() ? variant.fixed_value() : 0.5;
  theta.beta.assign(data.covariate_dim(), 0.0);
  double mean = 0.0;
  for (const auto& r : data) mean += r.y;
  mean /= static_cast<double>(data.size());
  theta.gamma1 = 1.0;
  theta.gamma2 = 1.0 / mean;
  return theta;
}

ParamVector starting_point(const Dataset& data, const ModelVariant& variant, bool quiet) {
  try {
    return initialize(data, variant).theta0;
  } catch (const std::exception& e) {
    if (!quiet) std::cerr << "curecg: initializer failed (" << e.what() << "); using default start\n";
    return fallback_start(data, variant);
  }
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Box-Cox transformation cure rate model: fitting and simulation", "curecg"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_flag("-q,--quiet", c.quiet, "Suppress warnings on stderr");

  auto* fit = app.add_subcommand("fit", "Fit the model to a dataset CSV");
  fit->add_option("--data", c.data, "Input dataset CSV")->required();
  fit->add_option("--out", c.out, "Output estimate JSON")->required();
  fit->add_option("--trace", c.trace, "Optional per-iteration JSONL log");
  add_variant_option(fit, c);
  add_optimizer_options(fit, c);

  auto* sim = app.add_subcommand("simulate", "Simulate a dataset from a design JSON");
  sim->add_option("--design", c.design, "Design JSON")->required();
  sim->add_option("--out", c.out, "Output dataset CSV")->required();
  add_seed_options(sim, c);

  auto* mc = app.add_subcommand("mc", "Monte Carlo bias/RMSE study");
  mc->add_option("--design", c.design, "Design JSON")->required();
  mc->add_option("--out", c.out, "Output summary JSON (table written next to it)");
  mc->add_option("--reps", c.reps, "Replications")->check(CLI::Range(1, 100000000));
  add_seed_options(mc, c);
  add_variant_option(mc, c);
  add_optimizer_options(mc, c);

  auto* boot = app.add_subcommand("bootstrap", "Nonparametric bootstrap standard errors");
  boot->add_option("--data", c.data, "Input dataset CSV")->required();
  boot->add_option("--out", c.out, "Output JSON")->required();
  boot->add_option("--B", c.B, "Bootstrap replicates")->check(CLI::Range(2, 100000000));
  add_seed_options(boot, c);
  add_variant_option(boot, c);
  add_optimizer_options(boot, c);

  auto* res = app.add_subcommand("residuals", "Randomized quantile residuals and KS test");
  res->add_option("--data", c.data, "Input dataset CSV")->required();
  res->add_option("--out", c.out, "Output prefix for .residuals.csv, .qq.csv, .ks.json")
      ->required();
  res->add_option("--estimate", c.estimate, "Estimate JSON from `fit` (refit when omitted)");
  res->add_option("--m-sets", c.m_sets, "Residual sets combined by the median")
      ->check(CLI::Range(1, 100000));
  add_seed_options(res, c);
  add_variant_option(res, c);
  add_optimizer_options(res, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), kExitOk);
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All), kExitOk);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (mc->parsed() && c.out.empty()) c.out = "mc_summary.json";
  if (fit->parsed()) c.command = Subcommand::kFit;
  if (sim->parsed()) c.command = Subcommand::kSimulate;
  if (mc->parsed()) c.command = Subcommand::kMc;
  if (boot->parsed()) c.command = Subcommand::kBootstrap;
  if (res->parsed()) c.command = Subcommand::kResiduals;
  return c;
}

int cmd_fit(const RunConfig& config) {
  const Dataset data = read_dataset_csv(config.data);
  const auto variant = variant_of(config);
  const ParamVector theta0 = starting_point(data, variant, config.quiet);
  const FitResult fit = fit_model(data, theta0, variant, config.optimizer);
  write_text_file(config.out, fit_to_json(fit));
  write_text_file(sibling(config.out, ".txt"), estimate_table(fit));
  if (!config.trace.empty()) {
    std::ofstream trace(config.trace);
    if (!trace) throw IoError("cannot write " + config.trace.string());
    write_trace_jsonl(fit, trace);
  }
  if (!fit.converged) {
    if (!config.quiet) std::cerr << "curecg: fit did not converge (" << fit.status << ")\n";
    return kExitNonconvergence;
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& config) {
  const Design design = read_design_json(config.design);
  write_dataset_csv(generate(design, SimSeed{config.seed, 0}), config.out);
  return kExitOk;
}

int cmd_mc(const RunConfig& config) {
  MCConfig mc;
  mc.design = read_design_json(config.design);
  mc.replications = config.reps;
  mc.variant = variant_of(config);
  mc.optimizer = config.optimizer;
  mc.optimizer.record_trace = false;
  mc.master_seed = SimSeed{config.seed, 0};
  mc.threads = config.threads;
  const MCSummary summary = run_study(mc);
  write_text_file(config.out, summary_to_json(summary));
  write_text_file(sibling(config.out, ".txt"), format_table(summary));
  if (summary.failed > 0 && !config.quiet) {
    std::cerr << "curecg: " << summary.failed << " of " << summary.attempted
              << " replications excluded\n";
  }
  return kExitOk;
}

int cmd_bootstrap(const RunConfig& config) {
  const Dataset data = read_dataset_csv(config.data);
  BootstrapOptions options;
  options.optimizer = config.optimizer;
  options.optimizer.record_trace = false;
  options.threads = config.threads;
  const auto result = bootstrap_se(data, variant_of(config), config.B, SimSeed{config.seed, 0},
                                   options);
  write_text_file(config.out, bootstrap_to_json(result));
  write_text_file(sibling(config.out, ".txt"), bootstrap_table(result));
  return kExitOk;
}

int cmd_residuals(const RunConfig& config) {
  const Dataset data = read_dataset_csv(config.data);
  ParamVector theta_hat;
  if (!config.estimate.empty()) {
    theta_hat = parse_estimate_json(read_text_file(config.estimate));
    if (theta_hat.beta.size() != data.covariate_dim()) {
      throw DimensionError("estimate has " + std::to_string(theta_hat.beta.size()) +
                           " regression coefficients, dataset needs " +
                           std::to_string(data.covariate_dim()));
    }
  } else {
    const auto variant = variant_of(config);
    const FitResult fit =
        fit_model(data, starting_point(data, variant, config.quiet), variant, config.optimizer);
    if (!fit.converged && !config.quiet) {
      std::cerr << "curecg: fit did not converge (" << fit.status << "); residuals use the last iterate\n";
    }
    theta_hat = fit.theta_hat;
  }
  const ResidualSet residuals = quantile_residuals(theta_hat, data, config.m_sets,
                                                   SimSeed{config.seed, 0});
  const KSResult ks = ks_normality_test(residuals.residuals);

  std::ofstream res_out(with_suffix(config.out, ".residuals.csv"));
  std::ofstream qq_out(with_suffix(config.out, ".qq.csv"));
  if (!res_out || !qq_out) throw IoError("cannot write outputs with prefix " + config.out.string());
  write_residuals_csv(residuals, res_out);
  write_qq_csv(qq_data(residuals.residuals), qq_out);
  write_text_file(with_suffix(config.out, ".ks.json"),
                  ks_to_json(ks, data.size(), config.m_sets, residuals.clamped));
  return kExitOk;
}

int run(const RunConfig& config) {
  try {
    switch (config.command) {
      case Subcommand::kFit: return cmd_fit(config);
      case Subcommand::kSimulate: return cmd_simulate(config);
      case Subcommand::kMc: return cmd_mc(config);
      case Subcommand::kBootstrap: return cmd_bootstrap(config);
      case Subcommand::kResiduals: return cmd_residuals(config);
    }
  } catch (const IoError& e) {
    std::cerr << "curecg: " << e.what() << '\n';
    return kExitIo;
  } catch (const DomainError& e) {
    std::cerr << "curecg: invalid input: " << e.what() << '\n';
    return kExitIo;
  } catch (const DimensionError& e) {
    std::cerr << "curecg: invalid input: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "curecg: numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

int main(int argc, const char* const* argv) {
  RunConfig config;
  try {
    config = parse_args(argc, argv);
  } catch (const UsageError& e) {
    (e.code() == kExitOk ? std::cout : std::cerr) << e.what() << '\n';
    return e.code();
  }
  return run(config);
}

}  // namespace curecg::cli
