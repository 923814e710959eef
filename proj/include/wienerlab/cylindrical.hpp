#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wienerlab/pathspace.hpp"

namespace wienerlab {

enum class Growth { bounded, polynomial };

// F = f(W(h_1), ..., W(h_n)) with analytic partial derivatives. The dense
// test class for everything in the differentiability harnesses.
struct CylindricalFunctional {
    std::vector<Direction> directions;
    std::function<double(std::span<const double>)> f;
    std::vector<std::function<double(std::span<const double>)>> partials;
    Growth growth = Growth::bounded;

    // Central finite differences at random probe points; throws
    // ContractViolation when a partial disagrees with f.
    void validate(std::uint64_t probe_seed = 7) const;
};

std::vector<double> eval(const CylindricalFunctional& F, const PathSet& paths);

// <grad F, k>_H per path: sum_i f_{x_i}(...) <h_i, k>_H.
std::vector<double> gradient_pairing(const CylindricalFunctional& F,
                                     const Direction& k, const PathSet& paths);

// Skorohod operator on the product element G h:
// delta(G h) = G W(h) - <grad G, h>_H, per path.
std::vector<double> skorohod_product(const CylindricalFunctional& G,
                                     const Direction& h, const PathSet& paths);

}  // namespace wienerlab
