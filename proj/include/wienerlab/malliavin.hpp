#pragma once

#include <optional>
#include <vector>

#include "wienerlab/bsde.hpp"

namespace wienerlab {

// Solution of the linear equation satisfied by the directional derivative of
// (Y, Z) along a Cameron-Martin direction h:
//   Yhat_s = <Dxi, hdot> + int_s^T (<Df, hdot> + f_y Yhat + f_z . Zhat) dr
//            - int_s^T Zhat . dW,
// with (Y, Z) frozen at the base solution in the coefficients.
struct LinearMalliavinSolution {
    std::vector<double> Yhat;  // [path][node]
    std::vector<double> Zhat;  // [path][step][comp]
    int n_paths = 0;
    int n_nodes = 0;
    int dim = 1;
    const Direction* direction = nullptr;

    double yhat(int path, int node) const {
        return Yhat[static_cast<size_t>(path) * n_nodes + node];
    }
    double zhat(int path, int step, int comp) const {
        return Zhat[(static_cast<size_t>(path) * (n_nodes - 1) + step) * dim + comp];
    }
};

LinearMalliavinSolution solve_linear_malliavin(const BsdeSpec& spec,
                                               const BackwardSolution& base,
                                               const Direction& h,
                                               const PathSet& paths,
                                               const RegressionBasis& basis);

// Difference quotient of the solution map along the shift: the equation is
// re-solved on shift(paths, h, eps) with regressions re-fit on the shifted
// data, then differenced against the base on common random numbers.
struct QuotientSolution {
    std::vector<double> Yq;  // [path][node]
    std::vector<double> Zq;  // [path][step][comp]
    double epsilon = 0.0;
    int n_paths = 0;
    int n_nodes = 0;
    int dim = 1;

    double yq(int path, int node) const {
        return Yq[static_cast<size_t>(path) * n_nodes + node];
    }
    double zq(int path, int step, int comp) const {
        return Zq[(static_cast<size_t>(path) * (n_nodes - 1) + step) * dim + comp];
    }
};

// base_state_features re-solves with the base-state regressors (identical
// span and ridge geometry, so the projector matches the base solve exactly);
// the default uses the shifted state. The gap between the two routes is a
// machinery-only noise floor, independent of the linear-equation solution.
QuotientSolution bsde_quotient(const BsdeSpec& spec,
                               const BackwardSolution& base,
                               const PathSet& paths, const Direction& h,
                               double epsilon, const RegressionBasis& basis,
                               bool base_state_features = false);

// L^p verdict that the difference quotients converge to the linear-equation
// solution: per eps,
//   E[sup_t |Yq - Yhat|^p]^{1/p} + E[(int ||Zq - Zhat||^2 dt)^{p/2}]^{1/p},
// with sup and integral taken over t >= h.support_end (the quotient and the
// linear equation are only comparable once the shift stops; h must therefore
// stop strictly before the horizon). Default tolerance is the largest of
// 10x the Monte Carlo standard error at the smallest eps, 2x the linear-decay
// budget errors[0] * eps_min / eps_max, and 2x the regression floor (the
// route gap of bsde_quotient at the smallest eps); an error that plateaus
// above all three fails.
ConvergenceReport verify_malliavin(const BsdeSpec& spec, const PathSet& paths,
                                   const Direction& h,
                                   const std::vector<double>& eps_schedule,
                                   double p, const RegressionBasis& basis,
                                   std::optional<double> tolerance = std::nullopt);

// Diagonal identity D_t Y_t = Z_t, with the left side approximated by the
// linear solution along a mass-normalized bump direction ending at each
// requested node.
struct IdentityCheckReport {
    std::vector<int> nodes;
    std::vector<double> rel_residual;  // per node, relative L^2 over paths
    double worst = 0.0;
};

IdentityCheckReport markovian_identity_check(const BsdeSpec& spec,
                                             const BackwardSolution& solution,
                                             const PathSet& paths,
                                             const RegressionBasis& basis,
                                             const std::vector<int>& nodes,
                                             int bump_width_cells = 4);

}  // namespace wienerlab
