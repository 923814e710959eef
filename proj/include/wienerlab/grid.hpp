#pragma once

#include <cmath>
#include <vector>

#include "wienerlab/errors.hpp"

namespace wienerlab {

// Uniform time grid t_0 = 0 < ... < t_N = T.
struct Grid {
    double horizon = 0.0;
    int n_steps = 0;
    std::vector<double> times;  // n_steps + 1 nodes

    double dt(int i) const { return times[i + 1] - times[i]; }

    bool same(const Grid& other) const {
        return n_steps == other.n_steps && horizon == other.horizon &&
               times == other.times;
    }
};

inline Grid make_grid(double T, int n_steps) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw InvalidArgument("make_grid: horizon must be positive and finite");
    if (n_steps < 1) throw InvalidArgument("make_grid: n_steps must be >= 1");
    Grid g;
    g.horizon = T;
    g.n_steps = n_steps;
    g.times.resize(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) g.times[i] = T * i / n_steps;
    g.times.front() = 0.0;
    g.times.back() = T;
    return g;
}

}  // namespace wienerlab
