#pragma once

#include <functional>
#include <vector>

#include "wienerlab/ensemble.hpp"

namespace wienerlab {

// W(h) = sum_i hdot(t_i) . dW_i per path (left-point Ito evaluation).
std::vector<double> wiener_integral(const Direction& h, const PathSet& paths);

// Cameron-Martin weight exp(W(h) - |h|_H^2 / 2) per path.
std::vector<double> cm_weight(const Direction& h, const PathSet& paths);

// An adapted step process: eval(paths, path, step, comp) must read the path
// only through history up to t_step. The flag is the caller's declaration;
// shift identities require it.
struct StepProcess {
    std::function<double(const PathSet&, int path, int step, int comp)> eval;
    bool adapted = true;
};

// Per-path residual of the discrete shifted-integral identity
//   [int Z.dW] o tau_h  -  int (Z o tau_h).dW  -  int (Z o tau_h).hdot ds.
// For adapted step processes this is algebraically zero on the grid.
std::vector<double> shifted_integral_residual(const StepProcess& Z,
                                              const Direction& h,
                                              const WienerEnsemble& ensemble);

}  // namespace wienerlab
