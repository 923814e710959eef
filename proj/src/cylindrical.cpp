#include "wienerlab/cylindrical.hpp"

#include <cmath>
#include <random>

#include "wienerlab/errors.hpp"

namespace wienerlab {

void CylindricalFunctional::validate(std::uint64_t probe_seed) const {
    const size_t n = directions.size();
    if (n == 0) throw ContractViolation("cylindrical: needs at least one direction");
    if (partials.size() != n)
        throw ContractViolation("cylindrical: one partial per direction required");
    std::mt19937_64 rng(probe_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double step = 1e-5;
    for (int probe = 0; probe < 8; ++probe) {
        std::vector<double> x(n);
        for (double& v : x) v = gauss(rng);
        for (size_t i = 0; i < n; ++i) {
            std::vector<double> xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            const double fd = (f(xp) - f(xm)) / (2.0 * step);
            const double an = partials[i](x);
            const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
            if (std::abs(fd - an) > 1e-6 * scale)
                throw ContractViolation(
                    "cylindrical: partial inconsistent with f at probe");
        }
    }
}

namespace {
std::vector<std::vector<double>> integrals(const CylindricalFunctional& F,
                                           const PathSet& paths) {
    std::vector<std::vector<double>> w;
    w.reserve(F.directions.size());
    for (const auto& h : F.directions) w.push_back(wiener_integral(h, paths));
    return w;
}
}  // namespace

std::vector<double> eval(const CylindricalFunctional& F, const PathSet& paths) {
    const auto w = integrals(F, paths);
    const size_t n = w.size();
    std::vector<double> args(n), out(paths.n_paths());
    for (int p = 0; p < paths.n_paths(); ++p) {
        for (size_t i = 0; i < n; ++i) args[i] = w[i][p];
        out[p] = F.f(args);
    }
    return out;
}

std::vector<double> gradient_pairing(const CylindricalFunctional& F,
                                     const Direction& k, const PathSet& paths) {
    const auto w = integrals(F, paths);
    const size_t n = w.size();
    std::vector<double> hk(n);
    for (size_t i = 0; i < n; ++i) hk[i] = inner_H(F.directions[i], k);
    std::vector<double> args(n), out(paths.n_paths(), 0.0);
    for (int p = 0; p < paths.n_paths(); ++p) {
        for (size_t i = 0; i < n; ++i) args[i] = w[i][p];
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += F.partials[i](args) * hk[i];
        out[p] = s;
    }
    return out;
}

std::vector<double> skorohod_product(const CylindricalFunctional& G,
                                     const Direction& h, const PathSet& paths) {
    std::vector<double> g = eval(G, paths);
    const std::vector<double> wh = wiener_integral(h, paths);
    const std::vector<double> grad = gradient_pairing(G, h, paths);
    for (int p = 0; p < paths.n_paths(); ++p) g[p] = g[p] * wh[p] - grad[p];
    return g;
}

}  // namespace wienerlab
