#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace wienerlab {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double stderr_of_mean(std::span<const double> x);

// (E|x|^q)^{1/q} with the standard error of the estimate propagated
// through the 1/q power (delta method).
struct LqEstimate {
    double value;
    double stderr_;
};
LqEstimate lq_norm(std::span<const double> x, double q);

// OLS slope of log(y) vs log(x); points with y <= 0 are skipped.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace wienerlab
