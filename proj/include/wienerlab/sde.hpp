#pragma once

#include <functional>
#include <vector>

#include "wienerlab/convergence.hpp"
#include "wienerlab/ensemble.hpp"

namespace wienerlab {

// Scalar forward SDE dX = b dt + sigma dW (Brownian dimension 1).
struct SdeSpec {
    double X0 = 0.0;
    std::function<double(double, double)> b, sigma;      // (t, x)
    std::function<double(double, double)> b_x, sigma_x;  // spatial partials

    // Finite-difference consistency of the partials at probe points.
    void validate(std::uint64_t probe_seed = 11) const;
};

struct SdePath {
    std::vector<double> values;  // [path][node]
    int n_paths = 0;
    int n_nodes = 0;
    double at(int path, int node) const {
        return values[static_cast<size_t>(path) * n_nodes + node];
    }
};

// Explicit Euler on the ensemble grid. Throws NumericalError with the
// offending step index on the first non-finite value.
SdePath solve_sde(const SdeSpec& spec, const PathSet& paths);

// Tangent (first-variation) process N^h solving
//   dN = N (b_x dt + sigma_x dW) + sigma hdot dt,  N_0 = 0;
// N^h(t) realizes the directional Malliavin pairing of X_t with hdot.
SdePath tangent_pairing(const SdeSpec& spec, const SdePath& X,
                        const Direction& h, const PathSet& paths);

// For each eps: re-solve on the shifted ensemble, form
// P = (X o tau_{eps h} - X)/eps - N^h, and report the L^1 norm of the
// sup-over-grid remainder. Passes iff decreasing to <= tolerance.
ConvergenceReport shift_remainder(const SdeSpec& spec, const PathSet& paths,
                                  const Direction& h,
                                  const std::vector<double>& eps_schedule,
                                  std::optional<double> tolerance = std::nullopt);

}  // namespace wienerlab
