#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "wienerlab/convergence.hpp"
#include "wienerlab/pathspace.hpp"
#include "wienerlab/stats.hpp"

using namespace wienerlab;

TEST_CASE("grid construction and validation") {
    Grid g = make_grid(2.0, 8);
    CHECK(g.times.size() == 9);
    CHECK(g.times.front() == 0.0);
    CHECK(g.times.back() == 2.0);
    CHECK(g.dt(3) == doctest::Approx(0.25));
    CHECK_THROWS_AS(make_grid(-1.0, 8), InvalidArgument);
    CHECK_THROWS_AS(make_grid(0.0, 8), InvalidArgument);
    CHECK_THROWS_AS(make_grid(1.0, 0), InvalidArgument);
}

TEST_CASE("constant direction cumulative telescopes exactly") {
    Grid g = make_grid(1.0, 10);
    Direction h = constant_direction(g, 1, 2.0);
    CHECK(h.h(10, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(h.norm_sq_H() == doctest::Approx(4.0).epsilon(1e-15));
    Direction half = constant_direction(g, 1, 1.0, 0.5);
    CHECK(half.support_end.has_value());
    CHECK(*half.support_end == doctest::Approx(0.5));
    CHECK(half.h(10, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.norm_sq_H() == doctest::Approx(0.5).epsilon(1e-14));
    // density is zero on the dead cells
    for (int i = 5; i < 10; ++i) CHECK(half.hdot(i, 0) == 0.0);
}

TEST_CASE("bump direction has unit mass ending at the node") {
    Grid g = make_grid(1.0, 20);
    Direction b = bump_direction(g, 1, 8, 4);
    CHECK(b.h(8, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.h(20, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.h(4, 0) == 0.0);
    CHECK(*b.support_end == doctest::Approx(g.times[8]));
    CHECK_THROWS_AS(bump_direction(g, 1, 8, 0), InvalidArgument);
    CHECK_THROWS_AS(bump_direction(g, 1, 2, 4), InvalidArgument);
    CHECK_THROWS_AS(bump_direction(g, 1, 21, 4), InvalidArgument);
}

TEST_CASE("inner product and truncation") {
    Grid g = make_grid(1.0, 16);
    Direction a = constant_direction(g, 1, 1.0, 0.25);
    Direction b = bump_direction(g, 1, 16, 4);  // supported on [0.75, 1]
    CHECK(inner_H(a, b) == 0.0);  // disjoint supports, exact
    Direction t = truncate(b, 0.75);
    CHECK(t.h(16, 0) == 0.0);
    CHECK(*t.support_end == doctest::Approx(0.75));
    Grid g2 = make_grid(1.0, 8);
    Direction c = constant_direction(g2, 1, 1.0);
    CHECK_THROWS_AS(inner_H(a, c), InvalidArgument);
}

TEST_CASE("ensemble sampling: shape, telescoping, determinism") {
    Grid g = make_grid(1.0, 32);
    WienerEnsemble e = sample_ensemble(g, 2, 500, 123);
    CHECK(e.increments.size() == 500u * 32 * 2);
    CHECK(e.nodes.size() == 500u * 33 * 2);
    for (int p = 0; p < 500; ++p)
        for (int c = 0; c < 2; ++c) {
            CHECK(e.node(p, 0, c) == 0.0);
            double s = 0.0;
            for (int i = 0; i < 32; ++i) {
                s += e.incr(p, i, c);
                CHECK(e.node(p, i + 1, c) == doctest::Approx(s).epsilon(1e-14));
            }
        }
    WienerEnsemble e2 = sample_ensemble(g, 2, 500, 123);
    CHECK(e.increments == e2.increments);
    WienerEnsemble e3 = sample_ensemble(g, 2, 500, 124);
    CHECK(e.increments != e3.increments);
}

TEST_CASE("ensemble moments match the Brownian law") {
    Grid g = make_grid(2.0, 16);
    WienerEnsemble e = sample_ensemble(g, 1, 40000, 7);
    std::vector<double> wT(e.n_paths), wT2(e.n_paths);
    for (int p = 0; p < e.n_paths; ++p) {
        wT[p] = e.node(p, 16, 0);
        wT2[p] = wT[p] * wT[p];
    }
    CHECK(std::abs(mean(wT)) < 4.0 * stderr_of_mean(wT));
    CHECK(std::abs(mean(wT2) - 2.0) < 4.0 * stderr_of_mean(wT2));
}

TEST_CASE("ensemble binary cache round-trips bit-for-bit") {
    Grid g = make_grid(1.5, 12);
    WienerEnsemble e = sample_ensemble(g, 2, 64, 99);
    const std::string path = "test_cache.wpaths";
    save_ensemble(e, path);
    WienerEnsemble r = load_ensemble(path);
    CHECK(r.grid.same(e.grid));
    CHECK(r.dim == e.dim);
    CHECK(r.n_paths == e.n_paths);
    CHECK(r.seed == e.seed);
    CHECK(r.increments == e.increments);
    CHECK(r.nodes == e.nodes);
    // corrupt the magic and expect a refusal
    {
        FILE* f = std::fopen(path.c_str(), "r+b");
        REQUIRE(f);
        std::fputc('X', f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_ensemble(path), NumericalError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_ensemble("no_such_file.wpaths"), InvalidArgument);
}

TEST_CASE("shift view adds eps*h exactly and composes") {
    Grid g = make_grid(1.0, 16);
    WienerEnsemble e = sample_ensemble(g, 1, 50, 5);
    Direction h = constant_direction(g, 1, 1.0, 0.5);
    PathSet base(e);
    PathSet s = shift(base, h, 0.25);
    for (int p = 0; p < 50; ++p)
        for (int n = 0; n <= 16; ++n)
            CHECK(s.node(p, n, 0) ==
                  doctest::Approx(e.node(p, n, 0) + 0.25 * h.h(n, 0)).epsilon(1e-15));
    // same-direction shifts merge into one entry with the summed eps
    PathSet s2 = shift(s, h, 0.5);
    CHECK(s2.shifts().size() == 1);
    CHECK(s2.shifts()[0].eps == doctest::Approx(0.75));
    // opposite shift cancels to the base pathwise
    PathSet back = shift(s, h, -0.25);
    for (int p = 0; p < 50; ++p)
        CHECK(back.node(p, 16, 0) == doctest::Approx(e.node(p, 16, 0)).epsilon(1e-15));
    // distinct directions stack
    Direction k = bump_direction(g, 1, 8, 2);
    PathSet mixed = shift(s, k, 0.1);
    CHECK(mixed.shifts().size() == 2);
    CHECK(mixed.node(0, 16, 0) ==
          doctest::Approx(e.node(0, 16, 0) + 0.25 * h.h(16, 0) + 0.1 * k.h(16, 0)));
}

TEST_CASE("wiener integral shifts by eps * |h|^2 exactly") {
    Grid g = make_grid(1.0, 32);
    WienerEnsemble e = sample_ensemble(g, 1, 200, 17);
    Direction h = make_direction(g, 1, [](double t, int) { return 1.0 - t; });
    PathSet base(e);
    const std::vector<double> w0 = wiener_integral(h, base);
    const double eps = 0.3;
    const std::vector<double> w1 = wiener_integral(h, shift(base, h, eps));
    const double n2 = h.norm_sq_H();
    for (int p = 0; p < 200; ++p)
        CHECK(w1[p] - w0[p] == doctest::Approx(eps * n2).epsilon(1e-12));
    Grid g2 = make_grid(1.0, 16);
    Direction bad = constant_direction(g2, 1, 1.0);
    CHECK_THROWS_AS(wiener_integral(bad, base), InvalidArgument);
}

TEST_CASE("cameron-martin weight has unit mean") {
    Grid g = make_grid(1.0, 25);
    WienerEnsemble e = sample_ensemble(g, 1, 60000, 31);
    Direction h = constant_direction(g, 1, 0.7);
    PathSet base(e);
    std::vector<double> w = cm_weight(h, base);
    CHECK(std::abs(mean(w) - 1.0) < 4.0 * stderr_of_mean(w));
}

TEST_CASE("shifted integral identity is exact for adapted step processes") {
    Grid g = make_grid(1.0, 24);
    WienerEnsemble e = sample_ensemble(g, 1, 300, 41);
    Direction h = make_direction(g, 1, [](double t, int) { return std::sin(3.0 * t); });
    StepProcess Z;
    Z.eval = [](const PathSet& ps, int p, int i, int c) {
        return std::cos(ps.node(p, i, c)) + ps.grid().times[i];
    };
    for (double r : shifted_integral_residual(Z, h, e)) CHECK(std::abs(r) < 1e-12);
    StepProcess bad;
    bad.eval = Z.eval;
    bad.adapted = false;
    CHECK_THROWS_AS(shifted_integral_residual(bad, h, e), ContractViolation);
}

TEST_CASE("gateaux quotient is exact for linear functionals") {
    Grid g = make_grid(1.0, 20);
    WienerEnsemble e = sample_ensemble(g, 1, 100, 53);
    Direction h = constant_direction(g, 1, 1.0);
    Direction k = make_direction(g, 1, [](double t, int) { return t; });
    PathFunctional F = [&](const PathSet& ps) { return wiener_integral(k, ps); };
    PathSet base(e);
    const double ip = inner_H(k, h);
    for (double eps : {0.5, 1e-3, 1e-7}) {
        std::vector<double> q = gateaux_quotient(F, base, h, eps);
        for (double v : q) CHECK(v == doctest::Approx(ip).epsilon(1e-6));
    }
}
