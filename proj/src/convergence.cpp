#include "wienerlab/convergence.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "wienerlab/errors.hpp"
#include "wienerlab/stats.hpp"

namespace wienerlab {

namespace {
std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

std::vector<double> gateaux_quotient(const PathFunctional& F,
                                     const PathSet& paths, const Direction& h,
                                     double eps) {
    if (eps == 0.0) throw InvalidArgument("gateaux_quotient: eps must be nonzero");
    const std::vector<double> base = F(paths);
    const std::vector<double> shifted = F(shift(paths, h, eps));
    std::vector<double> out(base.size());
    for (size_t p = 0; p < base.size(); ++p)
        out[p] = (shifted[p] - base[p]) / eps;
    return out;
}

std::vector<double> default_eps_schedule() {
    std::vector<double> s;
    for (int k = 3; k <= 10; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

bool convergence_verdict(const std::vector<double>& errors, double smallest_tol) {
    for (size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > errors[i - 1] * 1.05 + 1e-15) return false;
    return errors.back() <= smallest_tol;
}

ConvergenceReport convergence_test(const PathFunctional& F,
                                   const std::vector<double>& target,
                                   const PathSet& paths, const Direction& h,
                                   const std::vector<double>& eps_schedule,
                                   double q, std::optional<double> tolerance) {
    if (q < 1.0) throw InvalidArgument("convergence_test: q must be >= 1");
    if (eps_schedule.size() < 4)
        throw InvalidArgument("convergence_test: schedule needs >= 4 points");
    for (size_t i = 1; i < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] < eps_schedule[i - 1]) || !(eps_schedule[i] > 0))
            throw InvalidArgument(
                "convergence_test: schedule must be strictly decreasing and positive");

    ConvergenceReport rep;
    rep.eps_schedule = eps_schedule;
    rep.q = q;
    rep.n_paths = paths.n_paths();
    rep.seed = paths.base().seed;
    const std::vector<double> base = F(paths);
    for (double eps : eps_schedule) {
        const std::vector<double> shifted = F(shift(paths, h, eps));
        std::vector<double> diff(base.size());
        for (size_t p = 0; p < base.size(); ++p)
            diff[p] = (shifted[p] - base[p]) / eps - target[p];
        const LqEstimate e = lq_norm(diff, q);
        rep.errors.push_back(e.value);
        rep.stderrs.push_back(e.stderr_);
    }
    rep.slope = loglog_slope(rep.eps_schedule, rep.errors);
    rep.tolerance = tolerance.value_or(10.0 * rep.stderrs.back());
    rep.passed = convergence_verdict(rep.errors, rep.tolerance);
    return rep;
}

std::string ConvergenceReport::to_csv() const {
    std::string out = "eps,lq_error,stderr\n";
    for (size_t i = 0; i < eps_schedule.size(); ++i)
        out += fmt_num(eps_schedule[i]) + "," + fmt_num(errors[i]) + "," +
               fmt_num(stderrs[i]) + "\n";
    return out;
}

std::string ConvergenceReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["q"] = q;
    j["slope"] = slope;
    j["tolerance"] = tolerance;
    j["passed"] = passed;
    j["seed"] = seed;
    j["n_paths"] = n_paths;
    j["eps"] = eps_schedule;
    j["errors"] = errors;
    j["stderrs"] = stderrs;
    return j.dump(2);
}

DualityResult duality_residual(const CylindricalFunctional& F,
                               const CylindricalFunctional& G,
                               const Direction& h, const PathSet& paths) {
    const std::vector<double> f = eval(F, paths);
    const std::vector<double> dGh = skorohod_product(G, h, paths);
    const std::vector<double> g = eval(G, paths);
    const std::vector<double> gradF = gradient_pairing(F, h, paths);
    std::vector<double> diff(f.size());
    for (size_t p = 0; p < f.size(); ++p)
        diff[p] = f[p] * dGh[p] - g[p] * gradF[p];
    return {std::abs(mean(diff)), stderr_of_mean(diff)};
}

}  // namespace wienerlab
