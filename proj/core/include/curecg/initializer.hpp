#pragma once

// Starting values for the NCG fit: Kaplan-Meier cure fractions at two covariate
// levels, closed-form beta inversion over a grid of alpha, a moment-matched
// Weibull, and selection of the grid point with the largest log-likelihood.

#include <cstddef>
#include <utility>
#include <vector>

#include "curecg/likelihood.hpp"
#include "curecg/model.hpp"

namespace curecg {

struct KMCurve {
  std::vector<double> times;     // distinct event times, ascending
  std::vector<double> survival;  // S(t) just after each event time

  // Step-function value at t (1 before the first event time).
  double at(double t) const;
};

struct InitialGuess {
  ParamVector theta0;
  double loglik0 = 0.0;
  std::vector<double> alpha_grid_used;  // grid points that produced a candidate
};

// Two groups of records and the covariate vector each group stands for.
struct CovariateLevels {
  CovariateVector x_a;
  std::vector<std::size_t> idx_a;
  CovariateVector x_b;
  std::vector<std::size_t> idx_b;
};

// Product-limit estimator.  Events precede censorings at tied times.
KMCurve kaplan_meier(const Dataset& data);

// KM survival at the largest observed time.
double km_cure_estimate(const Dataset& data);

// (beta0, beta1) with cure_rate(x_a) = p_a and cure_rate(x_b) = p_b.
std::pair<double, double> solve_betas_from_cure_rates(double alpha, double p_a, double p_b,
                                                      double x_a, double x_b);

// Linear predictor that yields cure rate p: log[(p^-alpha - 1)/alpha], or
// log(-log p) on the alpha = 0 branch.
double linear_predictor_for_cure_rate(double p, double alpha);

// Mean and variance matching with mean = G(1+g1)/g2 and
// var = [G(1+2 g1) - G(1+g1)^2]/g2^2; g1 found by bisection on [0.01, 10].
std::pair<double, double> moment_match_weibull(const Dataset& data);
std::pair<double, double> moment_match_weibull(double mean, double variance);

inline constexpr double kBisectionLow = 0.01;
inline constexpr double kBisectionHigh = 10.0;

std::vector<double> default_alpha_grid();  // 0, 0.1, ..., 1.0

// Records whose covariate vector equals x_a / x_b exactly.
CovariateLevels levels_from_values(const Dataset& data, const CovariateVector& x_a,
                                   const CovariateVector& x_b);

// Levels chosen from the first non-intercept covariate: the extreme values
// when it takes at most `max_discrete` distinct values, otherwise the lower
// and upper quartile groups represented by their medians.  The tail groups
// widen to thirds, then halves, while a group's Kaplan-Meier cure estimate is
// 0 or 1.  Remaining covariate entries of the level vectors are 0.
CovariateLevels default_levels(const Dataset& data, std::size_t max_discrete = 10);

// Argmax over the grid of the log-likelihood of the closed-form candidates.
// For datasets with more than one non-intercept covariate the extra
// coefficients start at 0.
InitialGuess select_initial(const Dataset& data, const CovariateLevels& levels,
                            const std::vector<double>& alpha_grid);
InitialGuess select_initial(const Dataset& data, const CovariateVector& x_low,
                            const CovariateVector& x_high, const std::vector<double>& alpha_grid);

// default_levels + select_initial; a FixedAlpha variant collapses the grid to
// its value.
InitialGuess initialize(const Dataset& data, const ModelVariant& variant);

}  // namespace curecg
