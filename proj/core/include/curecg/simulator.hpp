#pragma once

// Synthetic right-censored cure data from the Box-Cox transformation model,
// with exponential censoring.

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "curecg/likelihood.hpp"
#include "curecg/model.hpp"
#include "curecg/rng.hpp"

namespace curecg {

// Two groups: x = 1 (size n1, cure p01, censoring rate c1) and x = 0 (n2, p00, c2).
struct BinaryDesign {
  std::size_t n1 = 180;
  std::size_t n2 = 120;
  double p01 = 0.40;
  double p00 = 0.20;
  double alpha = 0.5;
  double gamma1 = 0.316;
  double gamma2 = 0.179;
  double c1 = 0.15;
  double c2 = 0.10;

  void validate() const;
  ParamVector truth() const;  // beta from the cure proportions
};

// x ~ Uniform(x_min, x_max); cure p_high at x_min and p_low at x_max.
struct ContinuousDesign {
  std::size_t n = 200;
  double p_low = 0.05;
  double p_high = 0.65;
  double x_min = 0.1;
  double x_max = 20.0;
  double alpha = 0.5;
  double gamma1 = 0.316;
  double gamma2 = 0.179;
  double c = 0.10;

  void validate() const;
  ParamVector truth() const;
};

using Design = std::variant<BinaryDesign, ContinuousDesign>;

ParamVector design_truth(const Design& design);
void validate_design(const Design& design);

// Sample sizes used in the binary study: 150 -> (75, 75), 200 -> (120, 80),
// 300 -> (180, 120).  Throws DomainError for other totals.
std::pair<std::size_t, std::size_t> binary_group_sizes(std::size_t n);

std::pair<double, double> true_betas_binary(double alpha, double p01, double p00);
std::pair<double, double> true_betas_continuous(double alpha, double p_low, double p_high,
                                                double x_min, double x_max);

// Inverts (S_p(t) - p0) / (1 - p0) = u_star for the susceptible lifetime t.
// Returns +inf when u_star is so close to 0 that F^{-1} reaches the upper tail.
// Throws DomainError when (p0, alpha, phi_val) are inconsistent.
double susceptible_time(double u_star, double p0, double alpha, double phi_val, double gamma1,
                        double gamma2);

// What happened to one simulated subject.
struct SubjectDraw {
  bool cured = false;
  double event_time = 0.0;  // susceptible lifetime (+inf for cured subjects)
  double censor_time = 0.0;
};

struct SimulatedData {
  Dataset data;
  std::vector<SubjectDraw> draws;
};

// Subject i consumes substream i of `seed`; the result depends only on (design, seed).
SimulatedData simulate_binary(const BinaryDesign& design, const SimSeed& seed);
SimulatedData simulate_continuous(const ContinuousDesign& design, const SimSeed& seed);

Dataset generate_binary(const BinaryDesign& design, const SimSeed& seed);
Dataset generate_continuous(const ContinuousDesign& design, const SimSeed& seed);
Dataset generate(const Design& design, const SimSeed& seed);

}  // namespace curecg
