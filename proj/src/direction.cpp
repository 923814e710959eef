#include "wienerlab/direction.hpp"

#include <cmath>

namespace wienerlab {

void Direction::rebuild_cumulative() {
    const int N = grid.n_steps;
    cumulative.assign(static_cast<size_t>(N + 1) * dim, 0.0);
    for (int i = 0; i < N; ++i)
        for (int c = 0; c < dim; ++c)
            cumulative[(i + 1) * dim + c] =
                cumulative[i * dim + c] + density[i * dim + c] * grid.dt(i);
}

double Direction::norm_sq_H() const { return inner_H(*this, *this); }

Direction make_direction(const Grid& grid, int dim,
                         const std::function<double(double, int)>& hdot) {
    if (dim < 1) throw InvalidArgument("make_direction: dim must be >= 1");
    Direction h;
    h.grid = grid;
    h.dim = dim;
    h.density.resize(static_cast<size_t>(grid.n_steps) * dim);
    for (int i = 0; i < grid.n_steps; ++i)
        for (int c = 0; c < dim; ++c)
            h.density[i * dim + c] = hdot(grid.times[i], c);
    h.rebuild_cumulative();
    return h;
}

Direction constant_direction(const Grid& grid, int dim, double value,
                             std::optional<double> until) {
    const double cut = until.value_or(grid.horizon);
    Direction h = make_direction(grid, dim, [&](double t, int) {
        return t < cut ? value : 0.0;
    });
    if (until) h.support_end = cut;
    return h;
}

Direction bump_direction(const Grid& grid, int dim, int node, int width_cells) {
    if (width_cells < 1)
        throw InvalidArgument("bump_direction: width must be >= 1 cell");
    if (node < width_cells || node > grid.n_steps)
        throw InvalidArgument("bump_direction: bump does not fit before node");
    Direction h;
    h.grid = grid;
    h.dim = dim;
    h.density.assign(static_cast<size_t>(grid.n_steps) * dim, 0.0);
    for (int i = node - width_cells; i < node; ++i) {
        const double v = 1.0 / (width_cells * grid.dt(i));
        for (int c = 0; c < dim; ++c) h.density[i * dim + c] = v;
    }
    h.rebuild_cumulative();
    h.support_end = grid.times[node];
    return h;
}

double inner_H(const Direction& h1, const Direction& h2) {
    if (!h1.grid.same(h2.grid) || h1.dim != h2.dim)
        throw InvalidArgument("inner_H: grid or dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < h1.grid.n_steps; ++i) {
        double dot = 0.0;
        for (int c = 0; c < h1.dim; ++c)
            dot += h1.density[i * h1.dim + c] * h2.density[i * h1.dim + c];
        s += dot * h1.grid.dt(i);
    }
    return s;
}

Direction truncate(const Direction& h, double t) {
    Direction out = h;
    for (int i = 0; i < h.grid.n_steps; ++i)
        if (h.grid.times[i] >= t)
            for (int c = 0; c < h.dim; ++c) out.density[i * h.dim + c] = 0.0;
    out.rebuild_cumulative();
    out.support_end = t;
    return out;
}

}  // namespace wienerlab
