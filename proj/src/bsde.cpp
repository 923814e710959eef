#include "wienerlab/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "wienerlab/errors.hpp"
#include "wienerlab/stats.hpp"

namespace wienerlab {

void BsdeSpec::validate(int dim, std::uint64_t probe_seed) const {
    if (!terminal || !f || !f_y || !f_z)
        throw ContractViolation("BsdeSpec: terminal, f, f_y, f_z required");
    std::mt19937_64 rng(probe_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double step = 1e-5;
    std::vector<double> state(1), z(dim), zp(dim), zm(dim);
    for (int probe = 0; probe < 8; ++probe) {
        const double t = 0.5 * (1.0 + std::tanh(gauss(rng)));
        state[0] = gauss(rng);
        const double y = gauss(rng);
        for (double& v : z) v = gauss(rng);
        const double fy = f_y(t, state, y, z);
        const double fd_y =
            (f(t, state, y + step, z) - f(t, state, y - step, z)) / (2 * step);
        if (std::abs(fy - fd_y) > 1e-5 * std::max({1.0, std::abs(fy), std::abs(fd_y)}))
            throw ContractViolation("BsdeSpec: f_y inconsistent at probe");
        const std::vector<double> fz = f_z(t, state, y, z);
        double fz_norm = 0.0;
        for (int c = 0; c < dim; ++c) {
            zp = z;
            zm = z;
            zp[c] += step;
            zm[c] -= step;
            const double fd = (f(t, state, y, zp) - f(t, state, y, zm)) / (2 * step);
            if (std::abs(fz[c] - fd) >
                1e-5 * std::max({1.0, std::abs(fz[c]), std::abs(fd)}))
                throw ContractViolation("BsdeSpec: f_z inconsistent at probe");
            fz_norm += fz[c] * fz[c];
        }
        fz_norm = std::sqrt(fz_norm);
        double z_norm = 0.0;
        for (double v : z) z_norm += v * v;
        z_norm = std::sqrt(z_norm);
        if (regime == Regime::lipschitz) {
            if (std::abs(fy) > lipschitz_bound || fz_norm > lipschitz_bound)
                throw ContractViolation("BsdeSpec: driver partials exceed "
                                        "Lipschitz probe bound");
        } else {
            if (std::abs(fy) > quadratic_C ||
                fz_norm > quadratic_C * (1.0 + z_norm) + 1e-9)
                throw ContractViolation("BsdeSpec: quadratic growth probe "
                                        "bound violated");
        }
    }
}

BackwardSolution backward_regression_pass(const std::vector<double>& terminal,
                                          const PathDriver& driver,
                                          const PathSet& paths,
                                          const RegressionBasis& basis,
                                          Regime regime, double quadratic_C,
                                          const PathSet* state_paths) {
    if (!basis.state)
        throw ContractViolation("backward pass: Markov state not declared");
    const PathSet& sp = state_paths ? *state_paths : paths;
    const int P = paths.n_paths(), N = paths.n_steps(), d = paths.dim();
    if (static_cast<int>(terminal.size()) != P)
        throw InvalidArgument("backward pass: terminal size mismatch");
    const Grid& g = paths.grid();
    const int K = basis.n_features();

    BackwardSolution sol;
    sol.n_paths = P;
    sol.n_nodes = N + 1;
    sol.dim = d;
    sol.Y.resize(static_cast<size_t>(P) * (N + 1));
    sol.Z.assign(static_cast<size_t>(P) * N * d, 0.0);
    sol.coef_y.resize(N);
    sol.coef_z.assign(N, std::vector<std::vector<double>>(d));
    for (int p = 0; p < P; ++p) {
        if (!std::isfinite(terminal[p]))
            throw NumericalError("backward pass: non-finite terminal value", N);
        sol.Y[static_cast<size_t>(p) * (N + 1) + N] = terminal[p];
    }

    std::vector<double> phi(static_cast<size_t>(P) * K), state(basis.n_state);
    std::vector<double> target(P), cont(P), zrow(d);
    for (int i = N - 1; i >= 0; --i) {
        const double t = g.times[i], dt = g.dt(i);
        for (int p = 0; p < P; ++p) {
            basis.state(sp, p, i, state);
            basis.features(state, {phi.data() + static_cast<size_t>(p) * K,
                                   static_cast<size_t>(K)});
        }
        // continuation value first; it doubles as the control variate below
        for (int p = 0; p < P; ++p)
            target[p] = sol.Y[static_cast<size_t>(p) * (N + 1) + i + 1];
        FitResult fit = fit_least_squares(phi, P, K, target, basis.ridge,
                                          basis.cond_threshold);
        sol.max_cond = std::max(sol.max_cond, fit.cond);
        for (int p = 0; p < P; ++p)
            cont[p] = eval_fit(fit.coef, {phi.data() + static_cast<size_t>(p) * K,
                                          static_cast<size_t>(K)});
        sol.coef_y[i] = std::move(fit.coef);
        // Z(t_i) = regress((Y(t_{i+1}) - continuation) dW_i / dt | state_i):
        // the continuation is F_{t_i}-measurable so the conditional
        // expectation is unchanged, but the estimator noise drops from
        // O(1/sqrt(dt)) to O(1).
        for (int c = 0; c < d; ++c) {
            for (int p = 0; p < P; ++p)
                target[p] =
                    (sol.Y[static_cast<size_t>(p) * (N + 1) + i + 1] - cont[p]) *
                    paths.incr(p, i, c) / dt;
            FitResult zfit = fit_least_squares(phi, P, K, target, basis.ridge,
                                               basis.cond_threshold);
            sol.max_cond = std::max(sol.max_cond, zfit.cond);
            for (int p = 0; p < P; ++p)
                sol.Z[(static_cast<size_t>(p) * N + i) * d + c] = eval_fit(
                    zfit.coef, {phi.data() + static_cast<size_t>(p) * K,
                                static_cast<size_t>(K)});
            sol.coef_z[i][c] = std::move(zfit.coef);
        }
        if (regime == Regime::quadratic) {
            double max_z = 0.0;
            for (int p = 0; p < P; ++p)
                for (int c = 0; c < d; ++c)
                    max_z = std::max(max_z,
                                     std::abs(sol.Z[(static_cast<size_t>(p) * N + i) * d + c]));
            if (dt * quadratic_C * (1.0 + max_z) >= 0.5)
                throw NumericalError(
                    "backward pass: quadratic step-size guard violated", i);
        }
        // implicit-in-y resolved by one inner fixed-point sweep
        for (int p = 0; p < P; ++p) {
            for (int c = 0; c < d; ++c)
                zrow[c] = sol.Z[(static_cast<size_t>(p) * N + i) * d + c];
            const double y1 = cont[p] + driver(p, i, cont[p], zrow) * dt;
            const double y = cont[p] + driver(p, i, y1, zrow) * dt;
            if (!std::isfinite(y))
                throw NumericalError("backward pass: blow-up", i);
            sol.Y[static_cast<size_t>(p) * (N + 1) + i] = y;
        }
    }
    return sol;
}

BackwardSolution solve_backward(const BsdeSpec& spec, const PathSet& paths,
                                const RegressionBasis& basis,
                                const PathSet* state_paths) {
    spec.validate(paths.dim());
    const Grid& g = paths.grid();
    std::vector<double> state(basis.n_state);
    PathDriver driver = [&](int p, int i, double y, std::span<const double> z) {
        basis.state(paths, p, i, state);
        return spec.f(g.times[i], state, y, z);
    };
    return backward_regression_pass(spec.terminal(paths), driver, paths, basis,
                                    spec.regime, spec.quadratic_C, state_paths);
}

BackwardSolution solve_picard(const BsdeSpec& spec, const PathSet& paths,
                              const RegressionBasis& basis, int n_iter,
                              std::vector<double>* contraction) {
    if (spec.regime != Regime::lipschitz)
        throw ContractViolation("solve_picard: Lipschitz regime required");
    spec.validate(paths.dim());
    const int P = paths.n_paths(), N = paths.n_steps(), d = paths.dim();
    const Grid& g = paths.grid();

    BackwardSolution prev;
    prev.n_paths = P;
    prev.n_nodes = N + 1;
    prev.dim = d;
    prev.Y.assign(static_cast<size_t>(P) * (N + 1), 0.0);
    prev.Z.assign(static_cast<size_t>(P) * N * d, 0.0);

    std::vector<double> state(basis.n_state);
    int bad_streak = 0;
    double last_norm = 0.0;
    for (int it = 1; it <= n_iter; ++it) {
        PathDriver frozen = [&](int p, int i, double, std::span<const double>) {
            basis.state(paths, p, i, state);
            return spec.f(g.times[i], state, prev.y(p, i), prev.z_row(p, i));
        };
        BackwardSolution next =
            backward_regression_pass(spec.terminal(paths), frozen, paths, basis,
                                     spec.regime, spec.quadratic_C);
        std::vector<double> sup(P, 0.0);
        for (int p = 0; p < P; ++p) {
            double m = 0.0;
            for (int i = 0; i <= N; ++i)
                m = std::max(m, std::abs(next.y(p, i) - prev.y(p, i)));
            sup[p] = m * m;
        }
        const double norm = std::sqrt(mean(sup));
        if (contraction) contraction->push_back(norm);
        if (it > 1) {
            bad_streak = (norm >= last_norm && norm > 1e-14) ? bad_streak + 1 : 0;
            if (bad_streak >= 3)
                throw NumericalError("solve_picard: non-contraction over 3 "
                                     "consecutive iterations");
        }
        last_norm = norm;
        prev = std::move(next);
    }
    return prev;
}

TerminalFunctional terminal_g_of_WT(std::function<double(double)> g) {
    TerminalFunctional t;
    t.g_of_WT = g;
    t.eval = [g](const PathSet& paths) {
        std::vector<double> out(paths.n_paths());
        for (int p = 0; p < paths.n_paths(); ++p)
            out[p] = g(paths.node(p, paths.n_steps(), 0));
        return out;
    };
    return t;
}

namespace {

// E[f(m + s N)] by normalized composite Simpson over [-8, 8] standard
// deviations. Symmetric nodes, so affine integrands come out exact.
double gaussian_expectation(const std::function<double(double)>& f, double m,
                            double s) {
    if (s == 0.0) return f(m);
    constexpr int n = 800;  // even
    const double a = -8.0, dx = 16.0 / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + i * dx;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double pdf = std::exp(-0.5 * x * x);
        num += w * pdf * f(m + s * x);
        den += w * pdf;
    }
    return num / den;
}

// Dense table of a per-node value function of W_t, linear interpolation.
class NodeTable {
  public:
    NodeTable(double wmin, double wmax, int n,
              const std::function<double(double)>& f)
        : wmin_(wmin), n_(n) {
        dw_ = (wmax > wmin) ? (wmax - wmin) / n : 1.0;
        vals_.resize(n + 1);
        for (int i = 0; i <= n; ++i) vals_[i] = f(wmin_ + i * dw_);
    }
    double operator()(double w) const {
        double u = (w - wmin_) / dw_;
        u = std::clamp(u, 0.0, static_cast<double>(n_));
        const int i = std::min(static_cast<int>(u), n_ - 1);
        const double frac = u - i;
        return vals_[i] * (1.0 - frac) + vals_[i + 1] * frac;
    }

  private:
    double wmin_, dw_;
    int n_;
    std::vector<double> vals_;
};

std::pair<double, double> node_range(const PathSet& paths, int node) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int p = 0; p < paths.n_paths(); ++p) {
        const double w = paths.node(p, node, 0);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    return {lo, hi};
}

std::uint64_t mix_seed(std::uint64_t seed, int a, int b) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (a + 1)) ^
                      (0xbf58476d1ce4e5b9ULL * (b + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void rebuild_nodes(WienerEnsemble& e) {
    const int N = e.grid.n_steps;
    for (int p = 0; p < e.n_paths; ++p)
        for (int i = 0; i < N; ++i)
            for (int c = 0; c < e.dim; ++c)
                e.nodes[(static_cast<size_t>(p) * (N + 1) + i + 1) * e.dim + c] =
                    e.nodes[(static_cast<size_t>(p) * (N + 1) + i) * e.dim + c] +
                    e.increments[(static_cast<size_t>(p) * N + i) * e.dim + c];
}

}  // namespace

OracleResult affine_oracle(double alpha, double beta, double gamma,
                           const TerminalFunctional& xi, const PathSet& paths,
                           int n_inner) {
    if (paths.dim() != 1)
        throw InvalidArgument("affine_oracle: dim-1 ensembles only");
    const int P = paths.n_paths(), N = paths.n_steps();
    const Grid& g = paths.grid();
    OracleResult out;
    out.n_paths = P;
    out.n_nodes = N + 1;
    out.Y.resize(static_cast<size_t>(P) * (N + 1));

    if (xi.g_of_WT) {
        const auto& gfun = xi.g_of_WT;
        for (int i = 0; i <= N; ++i) {
            const double tau = g.horizon - g.times[i];
            const double disc = std::exp(beta * tau);
            const double alpha_term =
                beta != 0.0 ? alpha * (std::expm1(beta * tau)) / beta
                            : alpha * tau;
            const double s = std::sqrt(tau);
            auto value = [&](double w) {
                return disc * gaussian_expectation(gfun, w + gamma * tau, s) +
                       alpha_term;
            };
            if (i == N) {
                for (int p = 0; p < P; ++p)
                    out.Y[static_cast<size_t>(p) * (N + 1) + N] =
                        gfun(paths.node(p, N, 0));
                continue;
            }
            const auto [lo, hi] = node_range(paths, i);
            NodeTable table(lo, hi, 2048, value);
            for (int p = 0; p < P; ++p)
                out.Y[static_cast<size_t>(p) * (N + 1) + i] =
                    table(paths.node(p, i, 0));
        }
        return out;
    }

    if (n_inner < 2)
        throw InvalidArgument(
            "affine_oracle: general terminal needs n_inner >= 2 branches");
    if (!xi.eval) throw ContractViolation("affine_oracle: terminal missing");
    // nested Monte Carlo, branching at each node with common outer history
    for (int i = 0; i <= N; ++i) {
        for (int p = 0; p < P; ++p) {
            WienerEnsemble branch = sample_ensemble(
                g, 1, n_inner, mix_seed(paths.base().seed, p, i));
            for (int b = 0; b < n_inner; ++b)
                for (int j = 0; j < i; ++j)
                    branch.increments[static_cast<size_t>(b) * N + j] =
                        paths.incr(p, j, 0);
            rebuild_nodes(branch);
            const std::vector<double> xib = xi.eval(PathSet(branch));
            std::vector<double> vals(n_inner);
            for (int b = 0; b < n_inner; ++b) {
                const double wt = branch.node(b, i, 0);
                double riemann = 0.0;
                for (int k = i; k < N; ++k) {
                    const double m_ts = std::exp(
                        gamma * (branch.node(b, k, 0) - wt) -
                        0.5 * gamma * gamma * (g.times[k] - g.times[i]) +
                        beta * (g.times[k] - g.times[i]));
                    riemann += m_ts * alpha * g.dt(k);
                }
                const double m_tT = std::exp(
                    gamma * (branch.node(b, N, 0) - wt) -
                    0.5 * gamma * gamma * (g.horizon - g.times[i]) +
                    beta * (g.horizon - g.times[i]));
                vals[b] = m_tT * xib[b] + riemann;
            }
            out.Y[static_cast<size_t>(p) * (N + 1) + i] = mean(vals);
            out.stderr_ = std::max(out.stderr_, stderr_of_mean(vals));
        }
    }
    return out;
}

OracleResult quadratic_oracle(double c, const TerminalFunctional& xi,
                              const PathSet& paths, int n_inner) {
    if (c == 0.0) throw InvalidArgument("quadratic_oracle: c must be nonzero");
    if (paths.dim() != 1)
        throw InvalidArgument("quadratic_oracle: dim-1 ensembles only");
    const int P = paths.n_paths(), N = paths.n_steps();
    const Grid& g = paths.grid();
    OracleResult out;
    out.n_paths = P;
    out.n_nodes = N + 1;
    out.Y.resize(static_cast<size_t>(P) * (N + 1));

    if (xi.g_of_WT) {
        const auto& gfun = xi.g_of_WT;
        for (int i = 0; i <= N; ++i) {
            const double s = std::sqrt(g.horizon - g.times[i]);
            auto value = [&](double w) {
                auto integrand = [&](double x) {
                    const double e = c * gfun(x);
                    if (e > 700.0)
                        throw NumericalError(
                            "quadratic_oracle: inner-expectation overflow");
                    return std::exp(e);
                };
                return std::log(gaussian_expectation(integrand, w, s)) / c;
            };
            if (i == N) {
                for (int p = 0; p < P; ++p)
                    out.Y[static_cast<size_t>(p) * (N + 1) + N] =
                        gfun(paths.node(p, N, 0));
                continue;
            }
            const auto [lo, hi] = node_range(paths, i);
            NodeTable table(lo, hi, 2048, value);
            for (int p = 0; p < P; ++p)
                out.Y[static_cast<size_t>(p) * (N + 1) + i] =
                    table(paths.node(p, i, 0));
        }
        return out;
    }

    if (n_inner < 2)
        throw InvalidArgument(
            "quadratic_oracle: general terminal needs n_inner >= 2 branches");
    if (!xi.eval) throw ContractViolation("quadratic_oracle: terminal missing");
    for (int i = 0; i <= N; ++i) {
        for (int p = 0; p < P; ++p) {
            WienerEnsemble branch = sample_ensemble(
                g, 1, n_inner, mix_seed(paths.base().seed ^ 0x5bf0, p, i));
            for (int b = 0; b < n_inner; ++b)
                for (int j = 0; j < i; ++j)
                    branch.increments[static_cast<size_t>(b) * N + j] =
                        paths.incr(p, j, 0);
            rebuild_nodes(branch);
            const std::vector<double> xib = xi.eval(PathSet(branch));
            std::vector<double> vals(n_inner);
            for (int b = 0; b < n_inner; ++b) {
                const double e = c * xib[b];
                if (e > 700.0)
                    throw NumericalError(
                        "quadratic_oracle: inner-expectation overflow");
                vals[b] = std::exp(e);
            }
            const double m = mean(vals);
            out.Y[static_cast<size_t>(p) * (N + 1) + i] = std::log(m) / c;
            out.stderr_ =
                std::max(out.stderr_, stderr_of_mean(vals) / (std::abs(c) * m));
        }
    }
    return out;
}

namespace {
std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
std::vector<double> quantiles(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double qs[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
    std::vector<double> out;
    for (double q : qs) {
        const double pos = q * (v.size() - 1);
        const size_t i = static_cast<size_t>(pos);
        const double frac = pos - i;
        out.push_back(i + 1 < v.size() ? v[i] * (1 - frac) + v[i + 1] * frac
                                       : v[i]);
    }
    return out;
}
}  // namespace

std::string BackwardSolution::y_summary_csv() const {
    std::string out = "node,q05,q25,q50,q75,q95\n";
    for (int i = 0; i < n_nodes; ++i) {
        std::vector<double> col(n_paths);
        for (int p = 0; p < n_paths; ++p) col[p] = y(p, i);
        const auto q = quantiles(std::move(col));
        out += std::to_string(i);
        for (double v : q) out += "," + fmt_num(v);
        out += "\n";
    }
    return out;
}

std::string BackwardSolution::z_summary_csv(const Grid& grid) const {
    std::string out = "step,time,comp,q05,q25,q50,q75,q95\n";
    for (int i = 0; i < n_nodes - 1; ++i)
        for (int c = 0; c < dim; ++c) {
            std::vector<double> col(n_paths);
            for (int p = 0; p < n_paths; ++p) col[p] = z(p, i, c);
            const auto q = quantiles(std::move(col));
            out += std::to_string(i) + "," + fmt_num(grid.times[i]) + "," +
                   std::to_string(c);
            for (double v : q) out += "," + fmt_num(v);
            out += "\n";
        }
    return out;
}

}  // namespace wienerlab
