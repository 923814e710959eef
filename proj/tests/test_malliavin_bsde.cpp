#include <doctest.h>

#include <cmath>

#include "wienerlab/malliavin.hpp"
#include "wienerlab/stats.hpp"

using namespace wienerlab;

namespace {

BsdeSpec martingale_spec() {
    // f = 0, xi = W_T, <D xi, h> = h(T)
    BsdeSpec s;
    s.terminal = [](const PathSet& ps) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p) out[p] = ps.node(p, ps.n_steps(), 0);
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
    s.dxi_pairing = [](const PathSet& ps, const Direction& h) {
        return std::vector<double>(ps.n_paths(), h.h(ps.n_steps(), 0));
    };
    return s;
}

BsdeSpec square_spec() {
    // f = 0, xi = W_T^2, <D xi, h> = 2 W_T h(T)
    BsdeSpec s = martingale_spec();
    s.terminal = [](const PathSet& ps) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p) {
            const double w = ps.node(p, ps.n_steps(), 0);
            out[p] = w * w;
        }
        return out;
    };
    s.dxi_pairing = [](const PathSet& ps, const Direction& h) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = 2.0 * ps.node(p, ps.n_steps(), 0) * h.h(ps.n_steps(), 0);
        return out;
    };
    return s;
}

}  // namespace

TEST_CASE("linear solver requires the pairings") {
    Grid g = make_grid(1.0, 10);
    WienerEnsemble e = sample_ensemble(g, 1, 200, 201);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(2);
    BsdeSpec s = martingale_spec();
    BackwardSolution sol = solve_backward(s, base, basis);
    BsdeSpec missing = s;
    missing.dxi_pairing = nullptr;
    CHECK_THROWS_AS(solve_linear_malliavin(missing, sol, constant_direction(g, 1, 1.0),
                                           base, basis),
                    ContractViolation);
}

TEST_CASE("linear equation with constant pairing: Yhat constant, Zhat zero") {
    Grid g = make_grid(1.0, 20);
    WienerEnsemble e = sample_ensemble(g, 1, 3000, 203);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(3);
    BsdeSpec s = martingale_spec();
    BackwardSolution sol = solve_backward(s, base, basis);
    Direction h = constant_direction(g, 1, 1.5, 0.5);
    LinearMalliavinSolution lin = solve_linear_malliavin(s, sol, h, base, basis);
    const double target = h.h(20, 0);  // 0.75
    for (int p = 0; p < 100; ++p) {
        CHECK(lin.yhat(p, 20) == target);  // terminal is the pairing itself
        for (int i = 0; i <= 20; ++i)
            CHECK(lin.yhat(p, i) == doctest::Approx(target).epsilon(1e-6));
        for (int i = 0; i < 20; ++i) CHECK(std::abs(lin.zhat(p, i, 0)) < 1e-6);
    }
}

TEST_CASE("linear solution is additive in the direction") {
    Grid g = make_grid(1.0, 16);
    WienerEnsemble e = sample_ensemble(g, 1, 2000, 207);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(3);
    BsdeSpec s = square_spec();
    BackwardSolution sol = solve_backward(s, base, basis);
    Direction h1 = constant_direction(g, 1, 1.0, 0.5);
    Direction h2 = make_direction(g, 1, [](double t, int) { return t; });
    Direction hs = make_direction(g, 1, [](double t, int) {
        return (t < 0.5 ? 1.0 : 0.0) + t;
    });
    LinearMalliavinSolution a = solve_linear_malliavin(s, sol, h1, base, basis);
    LinearMalliavinSolution b = solve_linear_malliavin(s, sol, h2, base, basis);
    LinearMalliavinSolution c = solve_linear_malliavin(s, sol, hs, base, basis);
    for (int p = 0; p < 50; ++p)
        for (int i = 0; i <= 16; ++i)
            CHECK(c.yhat(p, i) ==
                  doctest::Approx(a.yhat(p, i) + b.yhat(p, i)).epsilon(1e-9));
}

TEST_CASE("difference quotient of the martingale case is the pairing") {
    Grid g = make_grid(1.0, 16);
    WienerEnsemble e = sample_ensemble(g, 1, 2000, 211);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(3);
    BsdeSpec s = martingale_spec();
    BackwardSolution sol = solve_backward(s, base, basis);
    Direction h = constant_direction(g, 1, 1.0, 0.5);
    CHECK_THROWS_AS(bsde_quotient(s, sol, base, h, 0.0, basis), InvalidArgument);
    // base-state regressors: the fits are linear in the terminal, so the
    // quotient of a linearly shifted terminal is exact
    QuotientSolution q = bsde_quotient(s, sol, base, h, 0.25, basis, true);
    const double target = h.h(16, 0);
    for (int p = 0; p < 50; ++p)
        for (int i = 0; i <= 16; ++i)
            CHECK(q.yq(p, i) == doctest::Approx(target).epsilon(1e-6));
}

TEST_CASE("verify_malliavin: argument screening") {
    Grid g = make_grid(1.0, 16);
    WienerEnsemble e = sample_ensemble(g, 1, 500, 213);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(3);
    BsdeSpec s = square_spec();
    Direction h = constant_direction(g, 1, 1.0, 0.5);
    Direction full = constant_direction(g, 1, 1.0);
    std::vector<double> sched = {0.25, 0.125, 0.0625, 0.03125};
    CHECK_THROWS_AS(verify_malliavin(s, base, h, {}, 1.5, basis), InvalidArgument);
    CHECK_THROWS_AS(verify_malliavin(s, base, h, sched, 2.5, basis), InvalidArgument);
    CHECK_THROWS_AS(verify_malliavin(s, base, h, sched, 1.0, basis), InvalidArgument);
    // direction must stop before the horizon
    CHECK_THROWS_AS(verify_malliavin(s, base, full, sched, 1.5, basis), InvalidArgument);
    // quadratic regime admits p >= 2
    BsdeSpec quad = square_spec();
    quad.regime = Regime::quadratic;
    CHECK_THROWS_AS(verify_malliavin(quad, base, h, sched, 1.0, basis), InvalidArgument);
}

TEST_CASE("verify_malliavin passes on the square terminal and rejects a corrupted pairing") {
    Grid g = make_grid(1.0, 32);
    WienerEnsemble e = sample_ensemble(g, 1, 20000, 217);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(3);
    Direction h = constant_direction(g, 1, 1.0, 0.5);
    std::vector<double> sched;
    for (int k = 3; k <= 8; ++k) sched.push_back(std::ldexp(1.0, -k));
    BsdeSpec s = square_spec();
    ConvergenceReport good = verify_malliavin(s, base, h, sched, 1.5, basis);
    CHECK(good.passed);
    CHECK(good.errors.back() < good.errors.front());
    BsdeSpec bad = square_spec();
    bad.dxi_pairing = [](const PathSet& ps, const Direction& hh) {
        std::vector<double> out(ps.n_paths());
        for (int p = 0; p < ps.n_paths(); ++p)
            out[p] = 4.0 * ps.node(p, ps.n_steps(), 0) * hh.h(ps.n_steps(), 0);
        return out;
    };
    ConvergenceReport wrong = verify_malliavin(bad, base, h, sched, 1.5, basis);
    CHECK_FALSE(wrong.passed);
}

TEST_CASE("markovian identity: argument screening and the martingale case") {
    Grid g = make_grid(1.0, 20);
    WienerEnsemble e = sample_ensemble(g, 1, 30000, 219);
    PathSet base(e);
    RegressionBasis basis = brownian_state_basis(3);
    BsdeSpec s = martingale_spec();
    BackwardSolution sol = solve_backward(s, base, basis);
    CHECK_THROWS_AS(markovian_identity_check(s, sol, base, basis, {}, 4),
                    InvalidArgument);
    CHECK_THROWS_AS(markovian_identity_check(s, sol, base, basis, {10}, 0),
                    InvalidArgument);
    CHECK_THROWS_AS(markovian_identity_check(s, sol, base, basis, {2}, 4),
                    InvalidArgument);
    // Y = W, Z = 1: the bump pairing of Y(t) against Z(t) closes to ~1
    IdentityCheckReport rep =
        markovian_identity_check(s, sol, base, basis, {5, 10, 15}, 4);
    CHECK(rep.nodes.size() == 3);
    CHECK(rep.worst < 0.05);
}
