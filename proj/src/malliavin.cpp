#include "wienerlab/malliavin.hpp"

#include <cmath>

#include "wienerlab/errors.hpp"
#include "wienerlab/stats.hpp"

namespace wienerlab {

LinearMalliavinSolution solve_linear_malliavin(const BsdeSpec& spec,
                                               const BackwardSolution& base,
                                               const Direction& h,
                                               const PathSet& paths,
                                               const RegressionBasis& basis) {
    if (!spec.dxi_pairing || !spec.df_pairing)
        throw ContractViolation(
            "solve_linear_malliavin: dxi_pairing and df_pairing required");
    if (base.n_paths != paths.n_paths() ||
        base.n_nodes != paths.n_steps() + 1 || base.dim != paths.dim())
        throw InvalidArgument(
            "solve_linear_malliavin: base not solved on this ensemble");
    const Grid& g = paths.grid();
    std::vector<double> state(basis.n_state);
    // linear driver with (Y, Z) frozen at the base solution
    PathDriver driver = [&](int p, int i, double yhat,
                            std::span<const double> zhat) {
        const double y = base.y(p, i);
        const std::span<const double> z = base.z_row(p, i);
        basis.state(paths, p, i, state);
        const double t = g.times[i];
        double v = spec.df_pairing(paths, p, i, y, z, h) +
                   spec.f_y(t, state, y, z) * yhat;
        const std::vector<double> fz = spec.f_z(t, state, y, z);
        for (int c = 0; c < paths.dim(); ++c) v += fz[c] * zhat[c];
        return v;
    };
    BackwardSolution s =
        backward_regression_pass(spec.dxi_pairing(paths, h), driver, paths,
                                 basis, Regime::lipschitz, spec.quadratic_C);
    LinearMalliavinSolution out;
    out.Yhat = std::move(s.Y);
    out.Zhat = std::move(s.Z);
    out.n_paths = s.n_paths;
    out.n_nodes = s.n_nodes;
    out.dim = s.dim;
    out.direction = &h;
    return out;
}

QuotientSolution bsde_quotient(const BsdeSpec& spec,
                               const BackwardSolution& base,
                               const PathSet& paths, const Direction& h,
                               double epsilon, const RegressionBasis& basis,
                               bool base_state_features) {
    if (epsilon == 0.0)
        throw InvalidArgument("bsde_quotient: epsilon must be nonzero");
    if (base.n_paths != paths.n_paths() || base.n_nodes != paths.n_steps() + 1)
        throw InvalidArgument("bsde_quotient: base not solved on this ensemble");
    const BackwardSolution shifted =
        solve_backward(spec, shift(paths, h, epsilon), basis,
                       base_state_features ? &paths : nullptr);
    QuotientSolution q;
    q.epsilon = epsilon;
    q.n_paths = base.n_paths;
    q.n_nodes = base.n_nodes;
    q.dim = base.dim;
    q.Yq.resize(base.Y.size());
    q.Zq.resize(base.Z.size());
    for (size_t i = 0; i < base.Y.size(); ++i)
        q.Yq[i] = (shifted.Y[i] - base.Y[i]) / epsilon;
    for (size_t i = 0; i < base.Z.size(); ++i)
        q.Zq[i] = (shifted.Z[i] - base.Z[i]) / epsilon;
    return q;
}

namespace {

// E[sup_t |Yq - Yhat|^p]^{1/p} + E[(int ||Zq - Zhat||^2 dt)^{p/2}]^{1/p},
// over t >= the direction's support end: before it the quotient sees only
// the past part of the shift while the linear equation carries the full
// pairing, so the two routes are only comparable once the shift is frozen.
LqEstimate quotient_error(std::span<const double> Yq, std::span<const double> Zq,
                          const LinearMalliavinSolution& lin, const Grid& g,
                          double p, int start_node) {
    const int P = lin.n_paths, nodes = lin.n_nodes, d = lin.dim;
    std::vector<double> sup_y(P), int_z(P);
    for (int pa = 0; pa < P; ++pa) {
        double m = 0.0;
        for (int i = start_node; i < nodes; ++i)
            m = std::max(m, std::abs(Yq[static_cast<size_t>(pa) * nodes + i] -
                                     lin.yhat(pa, i)));
        sup_y[pa] = m;
        double acc = 0.0;
        for (int i = start_node; i < nodes - 1; ++i)
            for (int c = 0; c < d; ++c) {
                const double r =
                    Zq[(static_cast<size_t>(pa) * (nodes - 1) + i) * d + c] -
                    lin.zhat(pa, i, c);
                acc += r * r * g.dt(i);
            }
        int_z[pa] = std::sqrt(acc);
    }
    const LqEstimate ey = lq_norm(sup_y, p), ez = lq_norm(int_z, p);
    return {ey.value + ez.value,
            std::sqrt(ey.stderr_ * ey.stderr_ + ez.stderr_ * ez.stderr_)};
}

// Same functional between two quotient routes (shifted-state vs base-state
// regressors): a pure regression-noise floor that never sees the linear
// solution, so a wrong pairing cannot inflate it.
double route_gap(const QuotientSolution& a, const QuotientSolution& b,
                 const Grid& g, double p, int start_node) {
    LinearMalliavinSolution as_lin;
    as_lin.Yhat = b.Yq;
    as_lin.Zhat = b.Zq;
    as_lin.n_paths = b.n_paths;
    as_lin.n_nodes = b.n_nodes;
    as_lin.dim = b.dim;
    return quotient_error(a.Yq, a.Zq, as_lin, g, p, start_node).value;
}

}  // namespace

ConvergenceReport verify_malliavin(const BsdeSpec& spec, const PathSet& paths,
                                   const Direction& h,
                                   const std::vector<double>& eps_schedule,
                                   double p, const RegressionBasis& basis,
                                   std::optional<double> tolerance) {
    if (eps_schedule.empty())
        throw InvalidArgument("verify_malliavin: empty schedule");
    if (spec.regime == Regime::lipschitz ? !(p > 1.0 && p < 2.0) : !(p > 1.0))
        throw InvalidArgument(
            "verify_malliavin: p must lie in (1,2) (Lipschitz) or (1,inf) "
            "(quadratic)");
    const Grid& g = paths.grid();
    if (!h.support_end || !(*h.support_end < g.horizon))
        throw InvalidArgument(
            "verify_malliavin: direction support must end before the horizon "
            "(the routes are compared on t >= support end)");
    int start_node = 0;
    while (g.times[start_node] < *h.support_end - 1e-12 * g.horizon)
        ++start_node;
    const BackwardSolution base = solve_backward(spec, paths, basis);
    const LinearMalliavinSolution lin =
        solve_linear_malliavin(spec, base, h, paths, basis);

    ConvergenceReport rep;
    rep.eps_schedule = eps_schedule;
    rep.q = p;
    rep.n_paths = paths.n_paths();
    rep.seed = paths.base().seed;
    for (double eps : eps_schedule) {
        const QuotientSolution q = bsde_quotient(spec, base, paths, h, eps, basis);
        const LqEstimate e = quotient_error(q.Yq, q.Zq, lin, g, p, start_node);
        rep.errors.push_back(e.value);
        rep.stderrs.push_back(e.stderr_);
    }
    rep.slope = loglog_slope(rep.eps_schedule, rep.errors);

    // Default tolerance: the largest of sampling noise at the smallest eps,
    // the budget a linear O(eps) remainder allows from the top of the
    // schedule, and twice the regression floor (route gap at the smallest
    // eps). A plateau at the wrong limit exceeds all three and fails.
    if (tolerance) {
        rep.tolerance = *tolerance;
    } else {
        const double eps_min = eps_schedule.back();
        const QuotientSolution qa =
            bsde_quotient(spec, base, paths, h, eps_min, basis);
        const QuotientSolution qb =
            bsde_quotient(spec, base, paths, h, eps_min, basis, true);
        const double floor = route_gap(qa, qb, g, p, start_node);
        rep.tolerance = std::max(
            {10.0 * rep.stderrs.back(),
             2.0 * rep.errors.front() *
                 (eps_schedule.back() / eps_schedule.front()),
             2.0 * floor});
    }
    rep.passed = convergence_verdict(rep.errors, rep.tolerance);
    return rep;
}

IdentityCheckReport markovian_identity_check(const BsdeSpec& spec,
                                             const BackwardSolution& solution,
                                             const PathSet& paths,
                                             const RegressionBasis& basis,
                                             const std::vector<int>& nodes,
                                             int bump_width_cells) {
    if (bump_width_cells < 1)
        throw InvalidArgument(
            "markovian_identity_check: bump must span at least one grid cell");
    if (paths.dim() != 1)
        throw InvalidArgument("markovian_identity_check: dim-1 only");
    if (nodes.empty())
        throw InvalidArgument("markovian_identity_check: no nodes requested");
    IdentityCheckReport rep;
    const int P = paths.n_paths(), N = paths.n_steps();
    for (int node : nodes) {
        if (node < bump_width_cells || node > N)
            throw InvalidArgument(
                "markovian_identity_check: bump does not fit before node");
        const Direction bump =
            bump_direction(paths.grid(), 1, node, bump_width_cells);
        const LinearMalliavinSolution lin =
            solve_linear_malliavin(spec, solution, bump, paths, basis);
        const int zstep = std::min(node, N - 1);
        double num = 0.0, den = 0.0;
        for (int p = 0; p < P; ++p) {
            const double z = solution.z(p, zstep, 0);
            const double r = lin.yhat(p, node) - z;
            num += r * r;
            den += z * z;
        }
        rep.nodes.push_back(node);
        const double rel = den > 0.0 ? std::sqrt(num / den)
                                     : std::sqrt(num / P);
        rep.rel_residual.push_back(rel);
        rep.worst = std::max(rep.worst, rel);
    }
    return rep;
}

}  // namespace wienerlab
