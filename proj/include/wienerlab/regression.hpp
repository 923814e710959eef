#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wienerlab/ensemble.hpp"

namespace wienerlab {

// Polynomial regression basis on a declared finite-dimensional Markov state.
// The state callable returns the raw state variables of a path at a node;
// features are all monomials of total degree <= degree.
struct RegressionBasis {
    int degree = 3;
    double ridge = 1e-8;
    double cond_threshold = 1e14;
    int n_state = 1;
    std::function<void(const PathSet&, int path, int node, std::span<double>)> state;

    int n_features() const;
    // Expands raw state values into the monomial feature vector.
    void features(std::span<const double> state_vals, std::span<double> out) const;
};

// Convenience basis on the Brownian node value W_t (dim-1 ensembles).
RegressionBasis brownian_state_basis(int degree = 3, double ridge = 1e-8);

struct FitResult {
    std::vector<double> coef;
    double cond = 1.0;  // Cholesky-based estimate for the normal matrix
};

// Ridge least squares via normal equations; Phi is row-major (n_rows x k).
// Throws NumericalError when the (regularized) normal matrix is numerically
// singular or its condition estimate exceeds the threshold.
FitResult fit_least_squares(std::span<const double> phi, int n_rows, int k,
                            std::span<const double> y, double ridge,
                            double cond_threshold);

double eval_fit(std::span<const double> coef, std::span<const double> feat);

}  // namespace wienerlab
