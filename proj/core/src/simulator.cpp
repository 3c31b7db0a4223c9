#include "curecg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "curecg/errors.hpp"
#include "curecg/initializer.hpp"

namespace curecg {

namespace {

void check_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(name) + " must lie strictly between 0 and 1");
  }
}

void check_common(double alpha, double gamma1, double gamma2) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("design alpha must lie in [0, 1]");
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw DomainError("design gamma must be positive");
}

void check_rate(double c, const char* name) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError(std::string(name) + " must be a positive censoring rate");
  }
}

// One subject given its cure probability and linear predictor.  Draw order
// within the substream is fixed: U, then C, then U*.
SubjectDraw draw_subject(SplitMix64& rng, double p0, double alpha, double eta, double gamma1,
                         double gamma2, double censor_rate) {
  SubjectDraw draw;
  const double u = rng.uniform();
  draw.censor_time = rng.exponential(censor_rate);
  const double u_star = rng.uniform();
  draw.cured = u <= p0;
  draw.event_time = draw.cured ? std::numeric_limits<double>::infinity()
                               : susceptible_time(u_star, p0, alpha, phi(alpha, eta), gamma1,
                                                  gamma2);
  return draw;
}

SurvivalRecord to_record(const SubjectDraw& draw, CovariateVector x) {
  SurvivalRecord r;
  const bool event = draw.event_time <= draw.censor_time;
  // t = 0 only arises from rounding when U* is within an ulp of 1
  r.y = std::max(event ? draw.event_time : draw.censor_time,
                 std::numeric_limits<double>::min());
  r.delta = event ? 1 : 0;
  r.x = std::move(x);
  return r;
}

}  // namespace

void BinaryDesign::validate() const {
  if (n1 < 1 || n2 < 1) throw DomainError("binary design group sizes must be >= 1");
  check_probability(p01, "p01");
  check_probability(p00, "p00");
  check_common(alpha, gamma1, gamma2);
  check_rate(c1, "c1");
  check_rate(c2, "c2");
}

ParamVector BinaryDesign::truth() const {
  validate();
  const auto [b0, b1] = true_betas_binary(alpha, p01, p00);
  return ParamVector{alpha, {b0, b1}, gamma1, gamma2};
}

void ContinuousDesign::validate() const {
  if (n < 1) throw DomainError("continuous design sample size must be >= 1");
  check_probability(p_low, "p_low");
  check_probability(p_high, "p_high");
  if (!(p_low < p_high)) throw DomainError("p_low must be smaller than p_high");
  if (!(x_min < x_max)) throw DomainError("x_min must be smaller than x_max");
  check_common(alpha, gamma1, gamma2);
  check_rate(c, "c");
}

ParamVector ContinuousDesign::truth() const {
  validate();
  const auto [b0, b1] = true_betas_continuous(alpha, p_low, p_high, x_min, x_max);
  return ParamVector{alpha, {b0, b1}, gamma1, gamma2};
}

ParamVector design_truth(const Design& design) {
  return std::visit([](const auto& d) { return d.truth(); }, design);
}

void validate_design(const Design& design) {
  std::visit([](const auto& d) { d.validate(); }, design);
}

std::pair<std::size_t, std::size_t> binary_group_sizes(std::size_t n) {
  switch (n) {
    case 150: return {75, 75};
    case 200: return {120, 80};
    case 300: return {180, 120};
    default:
      throw DomainError("no default group split for n = " + std::to_string(n) +
                        "; set n1 and n2 explicitly");
  }
}

std::pair<double, double> true_betas_binary(double alpha, double p01, double p00) {
  return solve_betas_from_cure_rates(alpha, p01, p00, 1.0, 0.0);
}

std::pair<double, double> true_betas_continuous(double alpha, double p_low, double p_high,
                                                double x_min, double x_max) {
  if (!(x_min < x_max)) throw DomainError("x_min must be smaller than x_max");
  // beta_0 anchored at x_max: eta(p_low) - beta_1 x_max
  return solve_betas_from_cure_rates(alpha, p_high, p_low, x_min, x_max);
}

double susceptible_time(double u_star, double p0, double alpha, double phi_val, double gamma1,
                        double gamma2) {
  if (!(u_star > 0.0 && u_star < 1.0)) throw DomainError("u_star must lie in (0, 1)");
  check_probability(p0, "p0");
  if (!(phi_val > 0.0)) throw DomainError("phi must be positive");
  // q = p0 + (1 - p0) u*;  survival of F at t, i.e. 1 - F(t):
  //   alpha > 0: (q^alpha - p0^alpha) / (alpha phi)
  //   alpha = 0: (log q - log p0) / phi
  const double log_ratio = std::log1p((1.0 - p0) * u_star / p0);  // log(q / p0)
  double upper = 0.0;
  if (uses_promotion_branch(alpha)) {
    upper = log_ratio / phi_val;
  } else {
    upper = std::exp(alpha * std::log(p0)) * std::expm1(alpha * log_ratio) / (alpha * phi_val);
  }
  if (!std::isfinite(upper) || upper > 1.0 + 1e-9 || upper < 0.0) {
    throw DomainError("susceptible_time: inputs inconsistent, F^{-1} argument outside [0, 1)");
  }
  if (upper == 0.0) return std::numeric_limits<double>::infinity();
  if (upper >= 1.0) return 0.0;
  // F^{-1}(1 - upper) = (1/gamma2) (-log upper)^gamma1
  return std::exp(gamma1 * std::log(-std::log(upper))) / gamma2;
}

SimulatedData simulate_binary(const BinaryDesign& design, const SimSeed& seed) {
  const ParamVector truth = design.truth();
  const double eta1 = truth.beta[0] + truth.beta[1];
  const double eta0 = truth.beta[0];
  SimulatedData out;
  out.draws.reserve(design.n1 + design.n2);
  std::vector<SurvivalRecord> records;
  records.reserve(design.n1 + design.n2);
  for (std::size_t i = 0; i < design.n1 + design.n2; ++i) {
    const bool group1 = i < design.n1;
    auto rng = SplitMix64::for_substream(seed, i);
    const auto draw = group1 ? draw_subject(rng, design.p01, design.alpha, eta1, design.gamma1,
                                            design.gamma2, design.c1)
                             : draw_subject(rng, design.p00, design.alpha, eta0, design.gamma1,
                                            design.gamma2, design.c2);
    records.push_back(to_record(draw, CovariateVector{1.0, group1 ? 1.0 : 0.0}));
    out.draws.push_back(draw);
  }
  out.data = Dataset(std::move(records));
  return out;
}

SimulatedData simulate_continuous(const ContinuousDesign& design, const SimSeed& seed) {
  const ParamVector truth = design.truth();
  SimulatedData out;
  out.draws.reserve(design.n);
  std::vector<SurvivalRecord> records;
  records.reserve(design.n);
  for (std::size_t i = 0; i < design.n; ++i) {
    auto rng = SplitMix64::for_substream(seed, i);
    const double x = design.x_min + (design.x_max - design.x_min) * rng.uniform();
    const double eta = truth.beta[0] + truth.beta[1] * x;
    const double p0 = std::exp(detail::log_cure_rate_eta(eta, design.alpha));
    const auto draw =
        draw_subject(rng, p0, design.alpha, eta, design.gamma1, design.gamma2, design.c);
    records.push_back(to_record(draw, CovariateVector{1.0, x}));
    out.draws.push_back(draw);
  }
  out.data = Dataset(std::move(records));
  return out;
}

Dataset generate_binary(const BinaryDesign& design, const SimSeed& seed) {
  return simulate_binary(design, seed).data;
}

Dataset generate_continuous(const ContinuousDesign& design, const SimSeed& seed) {
  return simulate_continuous(design, seed).data;
}

Dataset generate(const Design& design, const SimSeed& seed) {
  return std::visit(
      [&seed](const auto& d) -> Dataset {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BinaryDesign>) {
          return generate_binary(d, seed);
        } else {
          return generate_continuous(d, seed);
        }
      },
      design);
}

}  // namespace curecg
