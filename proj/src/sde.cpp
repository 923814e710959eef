#include "wienerlab/sde.hpp"

#include <cmath>
#include <random>
#include <string>

#include "wienerlab/errors.hpp"
#include "wienerlab/stats.hpp"

namespace wienerlab {

void SdeSpec::validate(std::uint64_t probe_seed) const {
    if (!b || !sigma || !b_x || !sigma_x)
        throw ContractViolation("SdeSpec: b, sigma and their partials required");
    std::mt19937_64 rng(probe_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double step = 1e-5;
    for (int probe = 0; probe < 8; ++probe) {
        const double t = 0.5 * (1.0 + std::tanh(gauss(rng)));
        const double x = 2.0 * gauss(rng);
        const double fd_b = (b(t, x + step) - b(t, x - step)) / (2 * step);
        const double fd_s = (sigma(t, x + step) - sigma(t, x - step)) / (2 * step);
        const double sb = std::max({1.0, std::abs(fd_b), std::abs(b_x(t, x))});
        const double ss = std::max({1.0, std::abs(fd_s), std::abs(sigma_x(t, x))});
        if (std::abs(fd_b - b_x(t, x)) > 1e-5 * sb ||
            std::abs(fd_s - sigma_x(t, x)) > 1e-5 * ss)
            throw ContractViolation("SdeSpec: partial inconsistent at probe");
    }
}

SdePath solve_sde(const SdeSpec& spec, const PathSet& paths) {
    if (paths.dim() != 1)
        throw InvalidArgument("solve_sde: scalar solver needs dim-1 ensemble");
    const int N = paths.n_steps(), P = paths.n_paths();
    SdePath X;
    X.n_paths = P;
    X.n_nodes = N + 1;
    X.values.resize(static_cast<size_t>(P) * (N + 1));
    const Grid& g = paths.grid();
    for (int p = 0; p < P; ++p) {
        double x = spec.X0;
        X.values[static_cast<size_t>(p) * (N + 1)] = x;
        for (int i = 0; i < N; ++i) {
            const double t = g.times[i];
            x += spec.b(t, x) * g.dt(i) + spec.sigma(t, x) * paths.incr(p, i, 0);
            if (!std::isfinite(x))
                throw NumericalError(
                    "solve_sde: blow-up at step " + std::to_string(i + 1), i + 1);
            X.values[static_cast<size_t>(p) * (N + 1) + i + 1] = x;
        }
    }
    return X;
}

SdePath tangent_pairing(const SdeSpec& spec, const SdePath& X,
                        const Direction& h, const PathSet& paths) {
    if (X.n_paths != paths.n_paths() || X.n_nodes != paths.n_steps() + 1)
        throw InvalidArgument("tangent_pairing: X not solved on this ensemble");
    const int N = paths.n_steps(), P = paths.n_paths();
    SdePath T;
    T.n_paths = P;
    T.n_nodes = N + 1;
    T.values.resize(static_cast<size_t>(P) * (N + 1));
    const Grid& g = paths.grid();
    for (int p = 0; p < P; ++p) {
        double n = 0.0;
        T.values[static_cast<size_t>(p) * (N + 1)] = n;
        for (int i = 0; i < N; ++i) {
            const double t = g.times[i];
            const double x = X.at(p, i);
            n += n * (spec.b_x(t, x) * g.dt(i) +
                      spec.sigma_x(t, x) * paths.incr(p, i, 0)) +
                 spec.sigma(t, x) * h.hdot(i, 0) * g.dt(i);
            if (!std::isfinite(n))
                throw NumericalError(
                    "tangent_pairing: blow-up at step " + std::to_string(i + 1),
                    i + 1);
            T.values[static_cast<size_t>(p) * (N + 1) + i + 1] = n;
        }
    }
    return T;
}

ConvergenceReport shift_remainder(const SdeSpec& spec, const PathSet& paths,
                                  const Direction& h,
                                  const std::vector<double>& eps_schedule,
                                  std::optional<double> tolerance) {
    if (eps_schedule.empty())
        throw InvalidArgument("shift_remainder: empty schedule");
    const SdePath X = solve_sde(spec, paths);
    const SdePath N = tangent_pairing(spec, X, h, paths);
    ConvergenceReport rep;
    rep.eps_schedule = eps_schedule;
    rep.q = 1.0;
    rep.n_paths = paths.n_paths();
    rep.seed = paths.base().seed;
    const int P = paths.n_paths(), nodes = X.n_nodes;
    for (double eps : eps_schedule) {
        const SdePath Xs = solve_sde(spec, shift(paths, h, eps));
        std::vector<double> sup(P, 0.0);
        for (int p = 0; p < P; ++p) {
            double m = 0.0;
            for (int i = 0; i < nodes; ++i) {
                const double r =
                    (Xs.at(p, i) - X.at(p, i)) / eps - N.at(p, i);
                m = std::max(m, std::abs(r));
            }
            sup[p] = m;
        }
        rep.errors.push_back(mean(sup));
        rep.stderrs.push_back(stderr_of_mean(sup));
    }
    rep.slope = loglog_slope(rep.eps_schedule, rep.errors);
    rep.tolerance = tolerance.value_or(10.0 * rep.stderrs.back());
    rep.passed = convergence_verdict(rep.errors, rep.tolerance);
    return rep;
}

}  // namespace wienerlab
