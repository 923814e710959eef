#include "wienerlab/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "wienerlab/convergence.hpp"
#include "wienerlab/errors.hpp"
#include "wienerlab/malliavin.hpp"
#include "wienerlab/parallel.hpp"
#include "wienerlab/sde.hpp"
#include "wienerlab/stats.hpp"

namespace wienerlab {

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Direction config_direction(const ScenarioConfig& cfg, const Grid& g) {
    if (cfg.direction.kind == "bump")
        return bump_direction(g, cfg.d, cfg.direction.node, cfg.direction.width);
    return constant_direction(g, cfg.d, cfg.direction.value, cfg.direction.until);
}

std::vector<double> harness_schedule(const ScenarioConfig& cfg, int k_max = 10) {
    if (!cfg.eps_schedule.empty()) return cfg.eps_schedule;
    std::vector<double> s;
    for (int k = 3; k <= k_max; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

// Re-issues the verdict with the linear-decay budget: the smallest error may
// also pass by having decayed proportionally to eps from the top of the
// schedule (deterministic O(eps) bias dominates the paired-estimator noise,
// so the pure-noise default tolerance is unreachable for smooth functionals).
void apply_decay_budget(ConvergenceReport& r) {
    r.tolerance = std::max(
        r.tolerance,
        2.0 * r.errors.front() * (r.eps_schedule.back() / r.eps_schedule.front()));
    r.passed = convergence_verdict(r.errors, r.tolerance);
}

// Directions for the quotient-vs-linear-equation harnesses must stop before
// the horizon; an unbounded constant direction is truncated at T/2.
Direction malliavin_direction(const ScenarioConfig& cfg, const Grid& g) {
    if (cfg.direction.kind == "constant" && !cfg.direction.until)
        return constant_direction(g, cfg.d, cfg.direction.value,
                                  0.5 * g.horizon);
    return config_direction(cfg, g);
}

void write_artifact(RunReport& rep, const std::string& dir,
                    const std::string& name, const std::string& content) {
    const std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write artifact " + path.string());
    out << content;
    rep.artifacts.push_back(path.string());
}

// ---- shared test matrices --------------------------------------------------

std::vector<Direction> shift_directions(const Grid& g, int dim) {
    std::vector<Direction> hs;
    hs.push_back(constant_direction(g, dim, 1.0));
    hs.push_back(make_direction(g, dim, [T = g.horizon](double t, int) {
        return 1.0 - t / T;
    }));
    hs.push_back(constant_direction(g, dim, 0.5, 0.6 * g.horizon));
    return hs;
}

std::vector<CylindricalFunctional> cylindrical_matrix(const Grid& g, int dim) {
    const double T = g.horizon;
    const Direction k1 = constant_direction(g, dim, 1.0);
    const Direction k2 = make_direction(g, dim, [T](double t, int) {
        return std::sin(2.0 * std::numbers::pi * t / T);
    });
    const Direction k3 = constant_direction(g, dim, 0.8, T / 2);

    std::vector<CylindricalFunctional> fs;
    {
        CylindricalFunctional F;
        F.directions = {k1};
        F.f = [](std::span<const double> x) { return std::sin(x[0]); };
        F.partials = {[](std::span<const double> x) { return std::cos(x[0]); }};
        fs.push_back(std::move(F));
    }
    {
        CylindricalFunctional F;
        F.directions = {k1, k2};
        F.f = [](std::span<const double> x) { return x[0] * x[1]; };
        F.partials = {[](std::span<const double> x) { return x[1]; },
                      [](std::span<const double> x) { return x[0]; }};
        F.growth = Growth::polynomial;
        fs.push_back(std::move(F));
    }
    {
        CylindricalFunctional F;
        F.directions = {k2};
        F.f = [](std::span<const double> x) { return std::exp(-x[0] * x[0]); };
        F.partials = {[](std::span<const double> x) {
            return -2.0 * x[0] * std::exp(-x[0] * x[0]);
        }};
        fs.push_back(std::move(F));
    }
    {
        CylindricalFunctional F;
        F.directions = {k1, k3};
        F.f = [](std::span<const double> x) { return std::cos(x[0] + 2.0 * x[1]); };
        F.partials = {
            [](std::span<const double> x) { return -std::sin(x[0] + 2.0 * x[1]); },
            [](std::span<const double> x) {
                return -2.0 * std::sin(x[0] + 2.0 * x[1]);
            }};
        fs.push_back(std::move(F));
    }
    {
        CylindricalFunctional F;
        F.directions = {k3};
        F.f = [](std::span<const double> x) { return x[0] * x[0] * x[0]; };
        F.partials = {[](std::span<const double> x) { return 3.0 * x[0] * x[0]; }};
        F.growth = Growth::polynomial;
        fs.push_back(std::move(F));
    }
    return fs;
}

// ---- BSDE scenario specs ---------------------------------------------------

// f == 0, xi = W(k)^2 with k the unit-density direction (so W(k) = W_T).
BsdeSpec spec_square(const Grid& g) {
    BsdeSpec s;
    const Direction k = constant_direction(g, 1, 1.0);
    s.terminal = [](const PathSet& ps) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p) {
            const double w = ps.node(p, ps.n_steps(), 0);
            out[p] = w * w;
        }
        return out;
    };
    s.f = [](double, std::span<const double>, double, std::span<const double>) {
        return 0.0;
    };
    s.f_y = [](double, std::span<const double>, double, std::span<const double>) {
        return 0.0;
    };
    s.f_z = [](double, std::span<const double>, double,
               std::span<const double> z) {
        return std::vector<double>(z.size(), 0.0);
    };
    s.df_pairing = [](const PathSet&, int, int, double, std::span<const double>,
                      const Direction&) { return 0.0; };
    s.dxi_pairing = [k](const PathSet& ps, const Direction& h) {
        const double inner = inner_H(k, h);
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = 2.0 * ps.node(p, ps.n_steps(), 0) * inner;
        return out;
    };
    return s;
}

// f = alpha + beta y + gamma z, xi = W_T.
BsdeSpec spec_affine(double alpha, double beta, double gamma) {
    BsdeSpec s;
    s.terminal = [](const PathSet& ps) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = ps.node(p, ps.n_steps(), 0);
        return out;
    };
    s.f = [alpha, beta, gamma](double, std::span<const double>, double y,
                               std::span<const double> z) {
        return alpha + beta * y + gamma * z[0];
    };
    s.f_y = [beta](double, std::span<const double>, double,
                   std::span<const double>) { return beta; };
    s.f_z = [gamma](double, std::span<const double>, double,
                    std::span<const double> z) {
        std::vector<double> out(z.size(), 0.0);
        out[0] = gamma;
        return out;
    };
    s.df_pairing = [](const PathSet&, int, int, double, std::span<const double>,
                      const Direction&) { return 0.0; };
    s.dxi_pairing = [](const PathSet& ps, const Direction& h) {
        return std::vector<double>(ps.n_paths(), h.h(ps.n_steps(), 0));
    };
    return s;
}

// f = -beta y, xi = sin(W_T).
BsdeSpec spec_sin(double beta) {
    BsdeSpec s;
    s.terminal = [](const PathSet& ps) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = std::sin(ps.node(p, ps.n_steps(), 0));
        return out;
    };
    s.f = [beta](double, std::span<const double>, double y,
                 std::span<const double>) { return -beta * y; };
    s.f_y = [beta](double, std::span<const double>, double,
                   std::span<const double>) { return -beta; };
    s.f_z = [](double, std::span<const double>, double,
               std::span<const double> z) {
        return std::vector<double>(z.size(), 0.0);
    };
    s.df_pairing = [](const PathSet&, int, int, double, std::span<const double>,
                      const Direction&) { return 0.0; };
    s.dxi_pairing = [](const PathSet& ps, const Direction& h) {
        std::vector<double> out(ps.n_paths());
        const double hT = h.h(ps.n_steps(), 0);
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = std::cos(ps.node(p, ps.n_steps(), 0)) * hT;
        return out;
    };
    return s;
}

// f = (c/2) |z|^2, xi = a W_T (quadratic regime).
BsdeSpec spec_quadratic(double c, double a) {
    BsdeSpec s;
    s.terminal = [a](const PathSet& ps) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = a * ps.node(p, ps.n_steps(), 0);
        return out;
    };
    s.f = [c](double, std::span<const double>, double,
              std::span<const double> z) {
        double n2 = 0.0;
        for (double v : z) n2 += v * v;
        return 0.5 * c * n2;
    };
    s.f_y = [](double, std::span<const double>, double,
               std::span<const double>) { return 0.0; };
    s.f_z = [c](double, std::span<const double>, double,
                std::span<const double> z) {
        std::vector<double> out(z.size());
        for (size_t i = 0; i < z.size(); ++i) out[i] = c * z[i];
        return out;
    };
    s.df_pairing = [](const PathSet&, int, int, double, std::span<const double>,
                      const Direction&) { return 0.0; };
    s.dxi_pairing = [a](const PathSet& ps, const Direction& h) {
        return std::vector<double>(ps.n_paths(), a * h.h(ps.n_steps(), 0));
    };
    s.regime = Regime::quadratic;
    s.quadratic_C = std::abs(c);
    return s;
}

double rel_l2_vs_oracle(const BackwardSolution& sol, const OracleResult& oracle) {
    double num = 0.0, den = 0.0;
    for (int p = 0; p < sol.n_paths; ++p)
        for (int i = 0; i < sol.n_nodes; ++i) {
            const double r = sol.y(p, i) - oracle.at(p, i);
            num += r * r;
            den += oracle.at(p, i) * oracle.at(p, i);
        }
    return std::sqrt(num / den);
}

// ---- scenarios -------------------------------------------------------------

void run_shift_identities(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, cfg.d, cfg.n_paths, cfg.seed);
    const Direction h = config_direction(cfg, g);
    const Direction h2 = make_direction(g, cfg.d, [T = cfg.T](double t, int) {
        return std::cos(2.0 * std::numbers::pi * t / T);
    });

    auto max_node_gap = [&](const PathSet& a, const PathSet& b) {
        double m = 0.0;
        for (int p = 0; p < e.n_paths; ++p)
            for (int i = 0; i <= g.n_steps; ++i)
                for (int c = 0; c < cfg.d; ++c)
                    m = std::max(m, std::abs(a.node(p, i, c) - b.node(p, i, c)));
        return m;
    };

    const double comp =
        max_node_gap(shift(shift(PathSet(e), h, 0.3), h, 0.4), shift(e, h, 0.7));
    rep.checks.push_back({"shift-composition-exact", comp <= 1e-12, comp, 1e-12});

    const double comm = max_node_gap(shift(shift(PathSet(e), h, 0.25), h2, 0.5),
                                     shift(shift(PathSet(e), h2, 0.5), h, 0.25));
    rep.checks.push_back({"shift-commutation-exact", comm <= 1e-12, comm, 1e-12});

    const StepProcess constant_z{
        [](const PathSet&, int, int, int) { return 1.5; }, true};
    const StepProcess brownian_z{
        [](const PathSet& ps, int p, int i, int c) { return ps.node(p, i, c); },
        true};
    const StepProcess half_support_z{
        [N = g.n_steps](const PathSet&, int, int i, int) {
            return i < N / 2 ? 2.0 : 0.0;
        },
        true};
    for (const auto& [name, z] :
         {std::pair<const char*, const StepProcess*>{"constant", &constant_z},
          {"brownian", &brownian_z},
          {"disjoint-support", &half_support_z}}) {
        const std::vector<double> res = shifted_integral_residual(*z, h, e);
        double m = 0.0;
        for (double v : res) m = std::max(m, std::abs(v));
        rep.checks.push_back({std::string("integral-identity-") + name,
                              m <= 1e-12, m, 1e-12});
    }

    // truncating the density after t leaves history up to t untouched
    const Direction ht = truncate(h, 0.5 * cfg.T);
    const PathSet full = shift(e, h, 1.0), trunc = shift(e, ht, 1.0);
    double m = 0.0;
    for (int p = 0; p < e.n_paths; ++p)
        for (int i = 0; i <= g.n_steps && g.times[i] <= 0.5 * cfg.T; ++i)
            for (int c = 0; c < cfg.d; ++c)
                m = std::max(m,
                             std::abs(full.node(p, i, c) - trunc.node(p, i, c)));
    rep.checks.push_back({"truncation-measurability", m <= 1e-12, m, 1e-12});
}

void run_cameron_martin(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, cfg.d, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const auto fs = cylindrical_matrix(g, cfg.d);
    const auto hs = shift_directions(g, cfg.d);
    std::string csv = "functional,direction,gap,combined_stderr\n";
    for (size_t fi = 0; fi < fs.size(); ++fi)
        for (size_t hi = 0; hi < hs.size(); ++hi) {
            const std::vector<double> lhs = eval(fs[fi], shift(base, hs[hi], 1.0));
            const std::vector<double> f0 = eval(fs[fi], base);
            const std::vector<double> w = cm_weight(hs[hi], base);
            std::vector<double> rhs(f0.size());
            for (size_t p = 0; p < f0.size(); ++p) rhs[p] = f0[p] * w[p];
            const double gap = std::abs(mean(lhs) - mean(rhs));
            const double se = std::sqrt(stderr_of_mean(lhs) * stderr_of_mean(lhs) +
                                        stderr_of_mean(rhs) * stderr_of_mean(rhs));
            rep.checks.push_back({"cm-F" + std::to_string(fi + 1) + "-h" +
                                      std::to_string(hi + 1),
                                  gap <= 3.0 * se, gap, 3.0 * se});
            csv += std::to_string(fi + 1) + "," + std::to_string(hi + 1) + "," +
                   fmt_num(gap) + "," + fmt_num(se) + "\n";
        }
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".pairs.csv", csv);
}

void run_cylindrical_convergence(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, cfg.d, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const Direction h = config_direction(cfg, g);
    const auto schedule = harness_schedule(cfg);
    const auto fs = cylindrical_matrix(g, cfg.d);
    for (size_t fi = 0; fi < fs.size(); ++fi) {
        const auto& F = fs[fi];
        PathFunctional pf = [&F](const PathSet& ps) { return eval(F, ps); };
        const std::vector<double> target = gradient_pairing(F, h, base);
        ConvergenceReport r =
            convergence_test(pf, target, base, h, schedule, cfg.q);
        apply_decay_budget(r);
        // the direction may be orthogonal to the functional's directions, in
        // which case the quotient matches the pairing to machine precision
        // and the slope is noise
        double worst = 0.0;
        for (double v : r.errors) worst = std::max(worst, v);
        const bool exact = worst <= 1e-10;
        rep.checks.push_back({"quotient-F" + std::to_string(fi + 1),
                              exact || r.passed, r.errors.back(), r.tolerance});
        const bool slope_ok = exact || (r.slope > 0.8 && r.slope < 1.2);
        rep.checks.push_back({"slope-F" + std::to_string(fi + 1), slope_ok,
                              exact ? 1.0 : r.slope, 1.2});
        if (fi == 0)
            write_artifact(rep, cfg.out_dir, cfg.scenario + ".report.csv",
                           r.to_csv());
    }
    // linear functional: quotient equals the pairing identically
    {
        CylindricalFunctional L;
        L.directions = {constant_direction(g, cfg.d, 1.0)};
        L.f = [](std::span<const double> x) { return 2.0 * x[0]; };
        L.partials = {[](std::span<const double>) { return 2.0; }};
        L.growth = Growth::polynomial;
        PathFunctional pf = [&L](const PathSet& ps) { return eval(L, ps); };
        const ConvergenceReport r = convergence_test(
            pf, gradient_pairing(L, h, base), base, h, schedule, cfg.q);
        double worst = 0.0;
        for (double v : r.errors) worst = std::max(worst, v);
        rep.checks.push_back({"linear-exactly-zero", worst <= 1e-10, worst, 1e-10});
    }
    // corrupting the target must flip the verdict
    {
        const auto& F = fs[0];
        PathFunctional pf = [&F](const PathSet& ps) { return eval(F, ps); };
        std::vector<double> bad = gradient_pairing(F, h, base);
        for (double& v : bad) v *= 2.0;
        const ConvergenceReport r =
            convergence_test(pf, bad, base, h, schedule, cfg.q);
        rep.checks.push_back({"corrupted-target-fails", !r.passed,
                              r.errors.back(), r.tolerance});
    }
}

void run_skorohod_duality(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, cfg.d, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const auto fs = cylindrical_matrix(g, cfg.d);
    const auto hs = shift_directions(g, cfg.d);
    const auto& G = fs[2];  // bounded multiplier
    std::string csv = "functional,direction,residual,stderr\n";
    for (size_t fi = 0; fi < fs.size(); ++fi)
        for (size_t hi = 0; hi < hs.size(); ++hi) {
            const DualityResult r = duality_residual(fs[fi], G, hs[hi], base);
            rep.checks.push_back({"duality-F" + std::to_string(fi + 1) + "-h" +
                                      std::to_string(hi + 1),
                                  r.residual <= 3.0 * r.stderr_, r.residual,
                                  3.0 * r.stderr_});
            csv += std::to_string(fi + 1) + "," + std::to_string(hi + 1) + "," +
                   fmt_num(r.residual) + "," + fmt_num(r.stderr_) + "\n";
        }
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".pairs.csv", csv);
}

void run_forward_tangent(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, 1, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const Direction h = config_direction(cfg, g);
    const auto schedule = harness_schedule(cfg);

    SdeSpec geometric;
    geometric.X0 = 1.0;
    geometric.b = [](double, double x) { return 0.1 * x; };
    geometric.b_x = [](double, double) { return 0.1; };
    geometric.sigma = [](double, double x) { return 0.2 * x; };
    geometric.sigma_x = [](double, double) { return 0.2; };
    ConvergenceReport rg = shift_remainder(geometric, base, h, schedule);
    apply_decay_budget(rg);
    rep.checks.push_back(
        {"geometric-remainder", rg.passed, rg.errors.back(), rg.tolerance});
    rep.checks.push_back({"geometric-slope", rg.slope > 0.8 && rg.slope < 1.2,
                          rg.slope, 1.2});
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".geometric.csv", rg.to_csv());

    SdeSpec ou;  // linear drift, additive noise: remainder vanishes on the grid
    ou.X0 = 0.5;
    ou.b = [](double, double x) { return -x; };
    ou.b_x = [](double, double) { return -1.0; };
    ou.sigma = [](double, double) { return 0.3; };
    ou.sigma_x = [](double, double) { return 0.0; };
    const ConvergenceReport ra = shift_remainder(ou, base, h, schedule);
    double worst = 0.0;
    for (double v : ra.errors) worst = std::max(worst, v);
    rep.checks.push_back({"additive-exactly-zero", worst <= 1e-10, worst, 1e-10});
}

void run_affine(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, 1, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const RegressionBasis basis = brownian_state_basis(cfg.basis_degree);
    const double beta = 0.5;
    const BsdeSpec spec = spec_affine(0.0, beta, 0.0);
    const BackwardSolution sol = solve_backward(spec, base, basis);
    const OracleResult oracle = affine_oracle(
        0.0, beta, 0.0, terminal_g_of_WT([](double w) { return w; }), base);
    const double err = rel_l2_vs_oracle(sol, oracle);
    rep.checks.push_back({"oracle-agreement", err <= 0.03, err, 0.03});
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".y_quantiles.csv",
                   sol.y_summary_csv());
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".z_quantiles.csv",
                   sol.z_summary_csv(g));
}

void run_lipschitz_malliavin(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, 1, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const Direction h = malliavin_direction(cfg, g);
    const RegressionBasis basis = brownian_state_basis(cfg.basis_degree);
    const auto schedule = harness_schedule(cfg, 8);

    const std::pair<const char*, BsdeSpec> specs[] = {
        {"square-terminal", spec_square(g)},
        {"affine-driver", spec_affine(0.2, 0.3, 0.1)},
        {"sin-terminal", spec_sin(0.5)}};
    for (const auto& [name, spec] : specs) {
        const ConvergenceReport r =
            verify_malliavin(spec, base, h, schedule, cfg.p, basis);
        rep.checks.push_back(
            {std::string("quotient-limit-") + name, r.passed, r.errors.back(),
             r.tolerance});
        write_artifact(rep, cfg.out_dir,
                       cfg.scenario + "." + name + ".csv", r.to_csv());
    }
}

void run_quadratic_malliavin(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, 1, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const Direction h = malliavin_direction(cfg, g);
    const RegressionBasis basis = brownian_state_basis(cfg.basis_degree);
    const double c = 1.0, a = 0.5;
    const BsdeSpec spec = spec_quadratic(c, a);

    const BackwardSolution sol = solve_backward(spec, base, basis);
    const OracleResult oracle = quadratic_oracle(
        c, terminal_g_of_WT([a](double w) { return a * w; }), base);
    const double err = rel_l2_vs_oracle(sol, oracle);
    rep.checks.push_back({"oracle-agreement", err <= 0.05, err, 0.05});

    double znum = 0.0, zden = 0.0;
    for (int p = 0; p < sol.n_paths; ++p)
        for (int i = 0; i < sol.n_nodes - 1; ++i) {
            const double r = sol.z(p, i, 0) - a;
            znum += r * r;
            zden += a * a;
        }
    const double zerr = std::sqrt(znum / zden);
    rep.checks.push_back({"control-constant", zerr <= 0.03, zerr, 0.03});

    const auto schedule = harness_schedule(cfg, 8);
    for (double p : {1.5, 3.0}) {
        const ConvergenceReport r =
            verify_malliavin(spec, base, h, schedule, p, basis);
        rep.checks.push_back({"quotient-limit-p" + fmt_num(p), r.passed,
                              r.errors.back(), r.tolerance});
        write_artifact(rep, cfg.out_dir,
                       cfg.scenario + ".p" + fmt_num(p) + ".csv", r.to_csv());
    }
}

void run_markovian_identity(const ScenarioConfig& cfg, RunReport& rep) {
    const Grid g = make_grid(cfg.T, cfg.n_steps);
    const WienerEnsemble e = sample_ensemble(g, 1, cfg.n_paths, cfg.seed);
    const PathSet base(e);
    const RegressionBasis basis = brownian_state_basis(cfg.basis_degree);

    std::vector<int> nodes;
    const int lo = std::max(cfg.bump_width,
                            static_cast<int>(std::ceil(0.2 * cfg.n_steps)));
    const int hi = static_cast<int>(std::floor(0.8 * cfg.n_steps));
    const int stride = std::max(1, cfg.n_steps / 10);
    for (int i = lo; i <= hi; i += stride) nodes.push_back(i);

    const std::pair<const char*, BsdeSpec> specs[] = {
        {"martingale", spec_affine(0.0, 0.0, 0.0)},
        {"sin-terminal", spec_sin(0.5)},
        {"quadratic", spec_quadratic(1.0, 0.5)}};
    std::string csv = "scenario,node,rel_residual\n";
    for (const auto& [name, spec] : specs) {
        const BackwardSolution sol = solve_backward(spec, base, basis);
        const IdentityCheckReport r = markovian_identity_check(
            spec, sol, base, basis, nodes, cfg.bump_width);
        rep.checks.push_back(
            {std::string("diagonal-") + name, r.worst <= 0.05, r.worst, 0.05});
        for (size_t i = 0; i < r.nodes.size(); ++i)
            csv += std::string(name) + "," + std::to_string(r.nodes[i]) + "," +
                   fmt_num(r.rel_residual[i]) + "\n";
    }
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".residuals.csv", csv);
}

}  // namespace

bool RunReport::passed() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["scenario"] = scenario;
    j["anchor"] = anchor;
    j["config_hash"] = config_hash;
    j["passed"] = passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"value", c.value},
                               {"tolerance", c.tolerance}});
    // artifact basenames: the summary must not depend on where the run landed
    j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& a : artifacts)
        j["artifacts"].push_back(std::filesystem::path(a).filename().string());
    return j.dump(2);
}

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog = {
        {"shift-identities",
         "exact algebra of Cameron-Martin shifts and stochastic integrals",
         "shift composition and the shifted-integral identity"},
        {"cameron-martin",
         "change-of-measure formula E[F o tau_h] = E[F exp(W(h) - |h|^2/2)]",
         "Cameron-Martin formula"},
        {"theorem-4.1-cylindrical",
         "Gateaux quotients of cylindrical functionals converge to the "
         "gradient pairing in L^q",
         "theorem 4.1"},
        {"skorohod-duality",
         "duality E[F delta(Gh)] = E[G <grad F, h>] on product elements",
         "Skorohod duality"},
        {"forward-tangent",
         "first-variation process of the forward SDE as shift derivative",
         "forward tangent equation"},
        {"affine",
         "regression solver against the explicit affine-driver kernel",
         "affine-driver representation"},
        {"theorem-5.1-lipschitz",
         "L^p convergence of BSDE difference quotients to the linear "
         "derivative equation (Lipschitz drivers)",
         "theorem 5.1"},
        {"theorem-7.2-quadratic",
         "same convergence for the quadratic driver via the exponential "
         "transform oracle",
         "theorem 7.2"},
        {"markovian-identity",
         "diagonal identity between the Malliavin derivative and the control "
         "process",
         "diagonal identity D_t Y_t = Z_t"},
    };
    return catalog;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const ScenarioInfo* info = nullptr;
    for (const auto& s : scenario_catalog())
        if (s.name == cfg.scenario) info = &s;
    if (!info)
        throw InvalidArgument("unknown scenario '" + cfg.scenario + "'");
    set_max_threads(cfg.threads);
    std::filesystem::create_directories(cfg.out_dir);

    RunReport rep;
    rep.scenario = cfg.scenario;
    rep.anchor = info->anchor;
    rep.config_hash = cfg.hash();
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.scenario == "shift-identities") run_shift_identities(cfg, rep);
    else if (cfg.scenario == "cameron-martin") run_cameron_martin(cfg, rep);
    else if (cfg.scenario == "theorem-4.1-cylindrical")
        run_cylindrical_convergence(cfg, rep);
    else if (cfg.scenario == "skorohod-duality") run_skorohod_duality(cfg, rep);
    else if (cfg.scenario == "forward-tangent") run_forward_tangent(cfg, rep);
    else if (cfg.scenario == "affine") run_affine(cfg, rep);
    else if (cfg.scenario == "theorem-5.1-lipschitz")
        run_lipschitz_malliavin(cfg, rep);
    else if (cfg.scenario == "theorem-7.2-quadratic")
        run_quadratic_malliavin(cfg, rep);
    else if (cfg.scenario == "markovian-identity")
        run_markovian_identity(cfg, rep);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_artifact(rep, cfg.out_dir, cfg.scenario + ".summary.json",
                   rep.to_json() + "\n");
    return rep;
}

}  // namespace wienerlab
