#include <doctest.h>

#include <cmath>

#include "wienerlab/sde.hpp"
#include "wienerlab/stats.hpp"

using namespace wienerlab;

namespace {

SdeSpec brownian_spec() {
    SdeSpec s;
    s.X0 = 0.0;
    s.b = [](double, double) { return 0.0; };
    s.sigma = [](double, double) { return 1.0; };
    s.b_x = [](double, double) { return 0.0; };
    s.sigma_x = [](double, double) { return 0.0; };
    return s;
}

SdeSpec geometric_spec(double mu, double nu) {
    SdeSpec s;
    s.X0 = 1.0;
    s.b = [mu](double, double x) { return mu * x; };
    s.sigma = [nu](double, double x) { return nu * x; };
    s.b_x = [mu](double, double) { return mu; };
    s.sigma_x = [nu](double, double) { return nu; };
    return s;
}

}  // namespace

TEST_CASE("sde validate rejects inconsistent partials") {
    SdeSpec s = geometric_spec(0.1, 0.2);
    s.validate();
    s.b_x = [](double, double) { return 0.7; };
    CHECK_THROWS_AS(s.validate(), ContractViolation);
}

TEST_CASE("degenerate coefficients reproduce closed forms exactly") {
    Grid g = make_grid(1.0, 40);
    WienerEnsemble e = sample_ensemble(g, 1, 100, 2);
    PathSet base(e);
    // b = 0, sigma = 1: X == W
    SdePath X = solve_sde(brownian_spec(), base);
    for (int p = 0; p < 100; ++p)
        for (int n = 0; n <= 40; ++n)
            CHECK(X.at(p, n) == doctest::Approx(e.node(p, n, 0)).epsilon(1e-14));
    // b = sigma = 0: constant path
    SdeSpec frozen = brownian_spec();
    frozen.X0 = 3.5;
    frozen.sigma = [](double, double) { return 0.0; };
    SdePath C = solve_sde(frozen, base);
    for (int n = 0; n <= 40; ++n) CHECK(C.at(0, n) == 3.5);
    // deterministic linear drift: b = 1, sigma = 0 gives X_t = t
    SdeSpec drift = brownian_spec();
    drift.b = [](double, double) { return 1.0; };
    drift.sigma = [](double, double) { return 0.0; };
    SdePath D = solve_sde(drift, base);
    for (int n = 0; n <= 40; ++n)
        CHECK(D.at(0, n) == doctest::Approx(g.times[n]).epsilon(1e-14));
}

TEST_CASE("geometric mean matches exp(mu T) within noise and Euler bias") {
    Grid g = make_grid(1.0, 256);
    WienerEnsemble e = sample_ensemble(g, 1, 20000, 9);
    SdePath X = solve_sde(geometric_spec(0.1, 0.2), PathSet(e));
    std::vector<double> xT(X.n_paths);
    for (int p = 0; p < X.n_paths; ++p) xT[p] = X.at(p, 256);
    const double target = std::exp(0.1);
    CHECK(std::abs(mean(xT) - target) <
          4.0 * stderr_of_mean(xT) + 5.0 * g.dt(0));
}

TEST_CASE("euler scheme is adapted: tail increments do not affect the prefix") {
    Grid g = make_grid(1.0, 16);
    WienerEnsemble e = sample_ensemble(g, 1, 30, 13);
    WienerEnsemble e2 = e;
    const int cut = 10;
    for (int p = 0; p < e2.n_paths; ++p)
        for (int i = cut; i < 16; ++i)
            e2.increments[(static_cast<size_t>(p) * 16 + i)] *= -1.0;
    for (int p = 0; p < e2.n_paths; ++p) {
        double s = 0.0;
        for (int i = 0; i < 16; ++i) {
            s += e2.increments[static_cast<size_t>(p) * 16 + i];
            e2.nodes[static_cast<size_t>(p) * 17 + i + 1] = s;
        }
    }
    SdePath A = solve_sde(geometric_spec(0.1, 0.3), PathSet(e));
    SdePath B = solve_sde(geometric_spec(0.1, 0.3), PathSet(e2));
    for (int p = 0; p < 30; ++p)
        for (int n = 0; n <= cut; ++n) CHECK(A.at(p, n) == B.at(p, n));
}

TEST_CASE("tangent process closed forms") {
    Grid g = make_grid(1.0, 32);
    WienerEnsemble e = sample_ensemble(g, 1, 50, 21);
    PathSet base(e);
    Direction h = make_direction(g, 1, [](double t, int) { return 1.0 - 0.5 * t; });
    // additive noise: N(t) = h(t) exactly
    SdeSpec add = brownian_spec();
    SdePath X = solve_sde(add, base);
    SdePath N = tangent_pairing(add, X, h, base);
    for (int p = 0; p < 50; ++p)
        for (int n = 0; n <= 32; ++n)
            CHECK(N.at(p, n) == doctest::Approx(h.h(n, 0)).epsilon(1e-13));
    // zero direction: identically zero tangent
    Direction z = constant_direction(g, 1, 0.0);
    SdePath N0 = tangent_pairing(add, X, z, base);
    for (int p = 0; p < 50; ++p) CHECK(N0.at(p, 32) == 0.0);
}

TEST_CASE("tangent process is linear in the direction") {
    Grid g = make_grid(1.0, 24);
    WienerEnsemble e = sample_ensemble(g, 1, 40, 27);
    PathSet base(e);
    SdeSpec s = geometric_spec(0.1, 0.2);
    SdePath X = solve_sde(s, base);
    Direction h1 = constant_direction(g, 1, 1.0, 0.5);
    Direction h2 = make_direction(g, 1, [](double t, int) { return t; });
    Direction hsum = make_direction(g, 1, [&](double t, int) {
        return (t < 0.5 ? 1.0 : 0.0) + t;
    });
    SdePath N1 = tangent_pairing(s, X, h1, base);
    SdePath N2 = tangent_pairing(s, X, h2, base);
    SdePath NS = tangent_pairing(s, X, hsum, base);
    for (int p = 0; p < 40; ++p)
        for (int n = 0; n <= 24; ++n)
            CHECK(NS.at(p, n) ==
                  doctest::Approx(N1.at(p, n) + N2.at(p, n)).epsilon(1e-11));
}

TEST_CASE("shift remainder: additive case is exact, geometric decays linearly") {
    Grid g = make_grid(1.0, 64);
    WienerEnsemble e = sample_ensemble(g, 1, 4000, 33);
    PathSet base(e);
    Direction h = constant_direction(g, 1, 1.0);
    ConvergenceReport add =
        shift_remainder(brownian_spec(), base, h, default_eps_schedule(), 1e-12);
    CHECK(add.passed);
    for (double err : add.errors) CHECK(err < 1e-12);
    ConvergenceReport geo =
        shift_remainder(geometric_spec(0.1, 0.2), base, h, default_eps_schedule(), 0.1);
    CHECK(geo.passed);
    CHECK(geo.slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("blow-up raises a numerical error with a step index") {
    Grid g = make_grid(1.0, 10);
    WienerEnsemble e = sample_ensemble(g, 1, 10, 37);
    SdeSpec s;
    s.X0 = 10.0;
    s.b = [](double, double x) { return x * x * x; };
    s.b_x = [](double, double x) { return 3.0 * x * x; };
    s.sigma = [](double, double) { return 0.0; };
    s.sigma_x = [](double, double) { return 0.0; };
    bool threw = false;
    try {
        solve_sde(s, PathSet(e));
    } catch (const NumericalError& err) {
        threw = true;
        CHECK(err.step_index >= 0);
    }
    CHECK(threw);
}
