#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wienerlab/direction.hpp"
#include "wienerlab/grid.hpp"

namespace wienerlab {

// A seeded set of discretized d-dimensional Brownian paths. Immutable after
// sampling; safe to share across threads. Sampling is splittable: each path
// owns an independent counter-based stream derived from (seed, path), so the
// ensemble is reproducible bit-for-bit regardless of scheduling.
struct WienerEnsemble {
    Grid grid;
    int dim = 1;
    int n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> increments;  // [path][step][comp]
    std::vector<double> nodes;       // [path][node][comp], node 0 == 0

    double incr(int path, int step, int comp) const {
        return increments[(static_cast<size_t>(path) * grid.n_steps + step) * dim + comp];
    }
    double node(int path, int n, int comp) const {
        return nodes[(static_cast<size_t>(path) * (grid.n_steps + 1) + n) * dim + comp];
    }
};

WienerEnsemble sample_ensemble(const Grid& grid, int dim, int n_paths,
                               std::uint64_t seed);

// Flat binary cache: header (T, N, d, n_paths, seed), then row-major
// increments as little-endian 64-bit floats.
void save_ensemble(const WienerEnsemble& e, const std::string& path);
WienerEnsemble load_ensemble(const std::string& path);

// Lazy view of an ensemble under a stack of Cameron-Martin shifts. Node and
// increment values are base + sum eps * h, recomputed on access; the base
// increment array is never copied (common random numbers at every eps).
class PathSet {
  public:
    struct ShiftEntry {
        const Direction* dir;
        double eps;
    };

    explicit PathSet(const WienerEnsemble& base) : base_(&base) {}

    const WienerEnsemble& base() const { return *base_; }
    const Grid& grid() const { return base_->grid; }
    int dim() const { return base_->dim; }
    int n_paths() const { return base_->n_paths; }
    int n_steps() const { return base_->grid.n_steps; }
    const std::vector<ShiftEntry>& shifts() const { return shifts_; }
    bool shifted() const { return !shifts_.empty(); }

    double incr(int path, int step, int comp) const {
        double v = base_->incr(path, step, comp);
        for (const auto& s : shifts_)
            v += s.eps * s.dir->hdot(step, comp) * base_->grid.dt(step);
        return v;
    }
    double node(int path, int n, int comp) const {
        double v = base_->node(path, n, comp);
        for (const auto& s : shifts_) v += s.eps * s.dir->h(n, comp);
        return v;
    }

    friend PathSet shift(const PathSet& paths, const Direction& h, double eps);

  private:
    const WienerEnsemble* base_;
    std::vector<ShiftEntry> shifts_;
};

// Shifting twice along the same direction composes exactly:
// shift(shift(E,h,e1),h,e2) accumulates eps = e1 + e2 in a single entry.
PathSet shift(const PathSet& paths, const Direction& h, double eps);
inline PathSet shift(const WienerEnsemble& e, const Direction& h, double eps) {
    return shift(PathSet(e), h, eps);
}

}  // namespace wienerlab
