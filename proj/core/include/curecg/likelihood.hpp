#pragma once

#include <cstddef>
#include <vector>

#include "curecg/model.hpp"

namespace curecg {

struct SurvivalRecord {
  double y = 0.0;   // min(failure time, censoring time), > 0
  int delta = 0;    // 1 = event observed, 0 = right censored
  CovariateVector x;
};

// Ordered collection of records sharing one covariate length.
class Dataset {
 public:
  Dataset() = default;
  // Throws DomainError / DimensionError on invalid records.
  explicit Dataset(std::vector<SurvivalRecord> records);

  void add(SurvivalRecord record);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  // Length of each covariate vector including the intercept; 0 when empty.
  std::size_t covariate_dim() const noexcept;

  const SurvivalRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<SurvivalRecord>& records() const noexcept { return records_; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  Dataset subset(const std::vector<std::size_t>& indices) const;

 private:
  static void validate(const SurvivalRecord& r, std::size_t expected_dim);
  std::vector<SurvivalRecord> records_;
};

struct LogLikEval {
  double value = 0.0;
  std::vector<double> gradient;  // (alpha, beta_0..beta_p, gamma1, gamma2)
};

// Sum over records of delta log f_p + (1 - delta) log S_p.  Returns -inf when
// any term is non-finite; the optimizer treats that as a rejected step.
double log_likelihood(const ParamVector& theta, const Dataset& data);

// Analytic value and gradient in one pass.  Under a FixedAlpha variant the alpha
// component is zero.  Throws NumericError when the value is -inf or non-finite.
LogLikEval log_likelihood_and_gradient(const ParamVector& theta, const Dataset& data,
                                       const ModelVariant& variant = ModelVariant::free_alpha());

std::vector<double> gradient(const ParamVector& theta, const Dataset& data,
                             const ModelVariant& variant = ModelVariant::free_alpha());

// Central differences with per-coordinate step h * max(1, |theta_j|).  Throws
// DomainError if a perturbed point leaves the feasible set, NumericError if the
// likelihood is non-finite there.
std::vector<double> fd_gradient(const ParamVector& theta, const Dataset& data, double h = 1e-6);

}  // namespace curecg
