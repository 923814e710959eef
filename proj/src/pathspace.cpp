#include "wienerlab/pathspace.hpp"

#include <cmath>

#include "wienerlab/errors.hpp"

namespace wienerlab {

std::vector<double> wiener_integral(const Direction& h, const PathSet& paths) {
    if (!h.grid.same(paths.grid()) || h.dim != paths.dim())
        throw InvalidArgument("wiener_integral: grid or dimension mismatch");
    const int N = paths.n_steps(), d = paths.dim();
    std::vector<double> out(paths.n_paths(), 0.0);
    for (int p = 0; p < paths.n_paths(); ++p) {
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            for (int c = 0; c < d; ++c) s += h.hdot(i, c) * paths.incr(p, i, c);
        out[p] = s;
    }
    return out;
}

std::vector<double> cm_weight(const Direction& h, const PathSet& paths) {
    std::vector<double> w = wiener_integral(h, paths);
    const double half_norm = 0.5 * h.norm_sq_H();
    for (double& v : w) v = std::exp(v - half_norm);
    return w;
}

std::vector<double> shifted_integral_residual(const StepProcess& Z,
                                              const Direction& h,
                                              const WienerEnsemble& ensemble) {
    if (!Z.adapted)
        throw ContractViolation(
            "shifted_integral_residual: process declared non-adapted");
    PathSet base(ensemble);
    PathSet shifted = shift(base, h, 1.0);
    const int N = ensemble.grid.n_steps, d = ensemble.dim;
    std::vector<double> out(ensemble.n_paths, 0.0);
    for (int p = 0; p < ensemble.n_paths; ++p) {
        double lhs = 0.0, rhs_w = 0.0, rhs_h = 0.0;
        for (int i = 0; i < N; ++i) {
            const double dt = ensemble.grid.dt(i);
            for (int c = 0; c < d; ++c) {
                const double z = Z.eval(shifted, p, i, c);  // Z o tau_h
                lhs += z * shifted.incr(p, i, c);
                rhs_w += z * base.incr(p, i, c);
                rhs_h += z * h.hdot(i, c) * dt;
            }
        }
        out[p] = lhs - rhs_w - rhs_h;
    }
    return out;
}

}  // namespace wienerlab
