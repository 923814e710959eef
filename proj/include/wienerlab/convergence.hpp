#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wienerlab/cylindrical.hpp"

namespace wienerlab {

using PathFunctional = std::function<std::vector<double>(const PathSet&)>;

// (F o tau_{eps h} - F) / eps per path, on common random numbers.
std::vector<double> gateaux_quotient(const PathFunctional& F,
                                     const PathSet& paths, const Direction& h,
                                     double eps);

// The executable form of the L^q quotient-convergence criterion: per-eps
// L^q errors against a target pairing, log-log slope, pass verdict.
struct ConvergenceReport {
    std::vector<double> eps_schedule;
    std::vector<double> errors;
    std::vector<double> stderrs;
    double q = 1.0;
    double slope = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    int n_paths = 0;
    std::uint64_t seed = 0;

    std::string to_csv() const;   // columns: eps, lq_error, stderr
    std::string to_json() const;  // slope, passed, seed, n_paths, ...
};

// Verdict rule: errors decreasing across the schedule (5% slack per step for
// sampling noise) and smallest error below tolerance. Default tolerance is
// 10x the Monte Carlo standard error at the smallest eps.
bool convergence_verdict(const std::vector<double>& errors, double smallest_tol);

std::vector<double> default_eps_schedule();  // 2^-3 ... 2^-10

ConvergenceReport convergence_test(const PathFunctional& F,
                                   const std::vector<double>& target,
                                   const PathSet& paths, const Direction& h,
                                   const std::vector<double>& eps_schedule,
                                   double q,
                                   std::optional<double> tolerance = std::nullopt);

// |E[F delta(Gh)] - E[G <grad F, h>_H]| with the standard error of the
// paired per-path difference (common random numbers on both sides).
struct DualityResult {
    double residual;
    double stderr_;
};
DualityResult duality_residual(const CylindricalFunctional& F,
                               const CylindricalFunctional& G,
                               const Direction& h, const PathSet& paths);

}  // namespace wienerlab
