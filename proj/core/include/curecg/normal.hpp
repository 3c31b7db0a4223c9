#pragma once

namespace curecg {

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Inverse standard normal CDF for p in (0, 1): Acklam's rational approximation
// (relative error below 1.2e-9) polished by one Halley step against
// normal_cdf, which brings it to near double precision.
double normal_quantile(double p);

}  // namespace curecg
