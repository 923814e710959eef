#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wienerlab/grid.hpp"

namespace wienerlab {

// Cameron-Martin direction h, given by its piecewise-constant density hdot on
// the grid cells. The cumulative h(t_i) is the exact telescoping sum of
// density * dt, so every discrete shift/integral identity involving h is
// exact in floating point, not merely O(dt).
struct Direction {
    Grid grid;
    int dim = 1;
    std::vector<double> density;     // n_steps * dim, component fastest
    std::vector<double> cumulative;  // (n_steps+1) * dim
    std::optional<double> support_end;  // hdot == 0 strictly after this time

    double hdot(int step, int comp) const { return density[step * dim + comp]; }
    double h(int node, int comp) const { return cumulative[node * dim + comp]; }

    double norm_sq_H() const;
    void rebuild_cumulative();
};

// Builds a direction from a density callable hdot(t, component), sampled at
// the left endpoint of each cell.
Direction make_direction(const Grid& grid, int dim,
                         const std::function<double(double, int)>& hdot);

// hdot == value on [0, until] (whole horizon when until is absent), 0 after.
Direction constant_direction(const Grid& grid, int dim, double value,
                             std::optional<double> until = std::nullopt);

// Mass-normalized bump: hdot = 1 / (width_cells * dt) on the cells
// [node - width_cells, node), 0 elsewhere. Approximates a Dirac at t_node
// from the left; used for diagonal Malliavin pairings.
Direction bump_direction(const Grid& grid, int dim, int node, int width_cells);

double inner_H(const Direction& h1, const Direction& h2);

// Truncation at time t per the measurability lemma: hdot zeroed on (t, T].
Direction truncate(const Direction& h, double t);

}  // namespace wienerlab
