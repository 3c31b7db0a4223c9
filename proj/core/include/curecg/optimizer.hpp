#pragma once

// Projected nonlinear conjugate gradient ascent over
//   U = { 0 < alpha <= 1, gamma1 > 0, gamma2 > 0 }
// with Hager-Zhang direction updates and Armijo backtracking.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curecg/likelihood.hpp"
#include "curecg/model.hpp"

namespace curecg {

inline constexpr double kProjectionFloor = 1e-10;

// How the Hager-Zhang coefficient enters the ascent direction.
enum class ConjugacyForm {
  // Coefficient of the minimization problem for -l, i.e. hager_zhang_beta
  // evaluated on the negated gradients.  Reduces to Fletcher-Reeves/
  // Hestenes-Stiefel on quadratics with exact line search.
  kAscent,
  // hager_zhang_beta applied to the gradients of l as they stand.
  kAsWritten,
};

struct NCGConfig {
  int k_max = 100;
  double lambda = 0.1;  // Armijo constant, 0 < lambda < 1/2
  double tol = 1e-3;
  double s_init = 1.0;
  double backtrack_factor = 0.5;
  int max_backtracks = 50;
  ConjugacyForm conjugacy = ConjugacyForm::kAscent;
  bool record_trace = true;

  // Throws DomainError on out-of-range settings.
  void validate() const;
};

struct TraceEntry {
  int k = 0;                  // iterate index of the step start
  double loglik_prev = 0.0;   // l(theta_k)
  double loglik = 0.0;        // l(theta_{k+1})
  double step = 0.0;          // accepted s_k
  double directional = 0.0;   // d_k' g_k
  double rel_change = 0.0;    // ||(theta_{k+1} - theta_k) / theta_k||
  bool restarted = false;     // d_k was reset to the steepest-ascent direction
  ParamVector theta;          // theta_{k+1}
};

struct FitResult {
  ParamVector theta_hat;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;  // "converged", "max_iterations", "line_search_failed"
  std::vector<TraceEntry> trace;
};

using ObjectiveFn = std::function<double(const ParamVector&)>;
using GradientFn = std::function<std::vector<double>(const ParamVector&)>;

// Clamp alpha into [1e-10, 1] and gamma1, gamma2 to >= 1e-10; beta unchanged.
// Input uses the flat layout [alpha, beta..., gamma1, gamma2].
ParamVector project(std::span<const double> raw);

// (1/(d'w)) (w - 2 d (w'w)/(d'w))' g_next with w = g_next - g.  Empty when
// |d'w| < 1e-14 (degenerate curvature); callers restart with steepest ascent.
std::optional<double> hager_zhang_beta(std::span<const double> d, std::span<const double> g,
                                       std::span<const double> g_next);

struct LineSearchResult {
  double step = 0.0;
  ParamVector theta;  // projected trial point
  double value = 0.0;
  int backtracks = 0;
};

// First s = s_init * backtrack_factor^j, j = 0..max_backtracks, with
//   l(P[theta + s d]) >= l(theta) + lambda s d'g.
// Empty when no step qualifies.  The optional pin applies after projection
// (used to hold alpha under FixedAlpha).
std::optional<LineSearchResult> armijo_line_search(
    const ParamVector& theta, double value, std::span<const double> d,
    std::span<const double> g, const ObjectiveFn& objective, const NCGConfig& config,
    const std::function<void(ParamVector&)>& pin = {});

// Euclidean norm of the coordinatewise relative change; coordinates with
// |old| < 1e-8 contribute their absolute change.
double relative_change(const ParamVector& next, const ParamVector& prev);

FitResult ncg_maximize(const ObjectiveFn& objective, const GradientFn& gradient,
                       const ParamVector& theta0, const ModelVariant& variant,
                       const NCGConfig& config = {});

// ncg_maximize on the cure-model log-likelihood of `data`.
FitResult fit_model(const Dataset& data, const ParamVector& theta0, const ModelVariant& variant,
                    const NCGConfig& config = {});

}  // namespace curecg
