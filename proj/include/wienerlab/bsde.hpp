#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wienerlab/convergence.hpp"
#include "wienerlab/regression.hpp"

namespace wienerlab {

enum class Regime { lipschitz, quadratic };

// Data of the terminal-value equation
//   Y_t = xi + int_t^T f(s, ., Y_s, Z_s) ds - int_t^T Z_s . dW_s.
// The driver reads the path only through the declared Markov state, so the
// fitted solution is a reusable functional of state and can be re-evaluated
// on shifted ensembles.
struct BsdeSpec {
    std::function<std::vector<double>(const PathSet&)> terminal;
    // (t, state, y, z) -> driver value; same signature for the partials.
    std::function<double(double, std::span<const double>, double,
                         std::span<const double>)> f;
    std::function<double(double, std::span<const double>, double,
                         std::span<const double>)> f_y;
    std::function<std::vector<double>(double, std::span<const double>, double,
                                      std::span<const double>)> f_z;
    // Directional Malliavin pairing of the driver at frozen (y,z):
    // <Df(t, ., y, z), hdot>, per path/node. Absent when the driver has no
    // direct path dependence worth pairing (treated as zero only if set
    // explicitly; the linear solver requires it).
    std::function<double(const PathSet&, int path, int node, double y,
                         std::span<const double> z, const Direction& h)>
        df_pairing;
    // <D xi, hdot> per path.
    std::function<std::vector<double>(const PathSet&, const Direction&)>
        dxi_pairing;
    Regime regime = Regime::lipschitz;
    double lipschitz_bound = 100.0;  // probe bound on |f_y|, |f_z| (Lipschitz)
    double quadratic_C = 1.0;        // |f_z| <= C(1+|z|) probe bound + step guard

    void validate(int dim, std::uint64_t probe_seed = 13) const;
};

struct BackwardSolution {
    std::vector<double> Y;  // [path][node]
    std::vector<double> Z;  // [path][step][comp]
    int n_paths = 0;
    int n_nodes = 0;
    int dim = 1;
    std::vector<std::vector<double>> coef_y;               // per step
    std::vector<std::vector<std::vector<double>>> coef_z;  // per step, per comp
    double max_cond = 1.0;

    double y(int path, int node) const {
        return Y[static_cast<size_t>(path) * n_nodes + node];
    }
    double z(int path, int step, int comp) const {
        return Z[(static_cast<size_t>(path) * (n_nodes - 1) + step) * dim + comp];
    }
    std::span<const double> z_row(int path, int step) const {
        return {Z.data() + (static_cast<size_t>(path) * (n_nodes - 1) + step) * dim,
                static_cast<size_t>(dim)};
    }

    // CSV summaries for the reporter: per-node quantiles of Y, per-step
    // quantiles of Z.
    std::string y_summary_csv() const;
    std::string z_summary_csv(const Grid& grid) const;
};

// Generic backward regression pass shared by the direct solver, the Picard
// linearizations and the linear Malliavin solver. The driver is evaluated
// pathwise; conditional expectations are least-squares fits on the basis.
using PathDriver =
    std::function<double(int path, int node, double y, std::span<const double> z)>;
// state_paths, when given, supplies the regression state instead of `paths`;
// used by shifted re-solves that keep the base-state regressors (same span
// and information set, identical ridge geometry). The driver always sees the
// solve's own paths.
BackwardSolution backward_regression_pass(const std::vector<double>& terminal,
                                          const PathDriver& driver,
                                          const PathSet& paths,
                                          const RegressionBasis& basis,
                                          Regime regime, double quadratic_C,
                                          const PathSet* state_paths = nullptr);

// Backward Euler with least-squares conditional expectations;
// implicit-in-y resolved by one inner fixed-point sweep per step. The control
// is fitted against the martingale increment (Y(t_{i+1}) - continuation) *
// dW / dt, which estimates the same conditional expectation with O(1)
// instead of O(1/sqrt(dt)) noise.
BackwardSolution solve_backward(const BsdeSpec& spec, const PathSet& paths,
                                const RegressionBasis& basis,
                                const PathSet* state_paths = nullptr);

// Picard iteration from (Y^0, Z^0) = (0, 0); each step solves the linear
// problem with the previous iterate frozen in the driver. Contraction
// diagnostics |Y^n - Y^{n-1}| are appended per iteration; three consecutive
// non-contracting ratios raise NumericalError.
BackwardSolution solve_picard(const BsdeSpec& spec, const PathSet& paths,
                              const RegressionBasis& basis, int n_iter,
                              std::vector<double>* contraction = nullptr);

// Terminal functional for the closed-form oracles: a general path functional,
// optionally recognized as xi = g(W_T) which unlocks the quadrature route.
struct TerminalFunctional {
    PathFunctional eval;
    std::function<double(double)> g_of_WT;  // optional analytic form
};
TerminalFunctional terminal_g_of_WT(std::function<double(double)> g);

struct OracleResult {
    std::vector<double> Y;  // [path][node]
    int n_paths = 0;
    int n_nodes = 0;
    double stderr_ = 0.0;  // zero on the quadrature route
    double at(int path, int node) const {
        return Y[static_cast<size_t>(path) * n_nodes + node];
    }
};

// Explicit-kernel oracle for the affine driver f = alpha + beta y + gamma z
// (constants, d = 1): conditional expectation under the gamma-drifted
// Gaussian law by quadrature when xi = g(W_T); nested Monte Carlo with
// n_inner branches per node otherwise.
OracleResult affine_oracle(double alpha, double beta, double gamma,
                           const TerminalFunctional& xi, const PathSet& paths,
                           int n_inner = 0);

// Exponential-transform oracle for f = (c/2) |z|^2:
// Y_t = (1/c) log E[exp(c xi) | F_t], with an exponent overflow guard.
OracleResult quadratic_oracle(double c, const TerminalFunctional& xi,
                              const PathSet& paths, int n_inner = 0);

}  // namespace wienerlab
