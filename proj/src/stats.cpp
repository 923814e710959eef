#include "wienerlab/stats.hpp"

namespace wienerlab {

double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double stderr_of_mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

LqEstimate lq_norm(std::span<const double> x, double q) {
    std::vector<double> pow_abs(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        pow_abs[i] = std::pow(std::abs(x[i]), q);
    const double m = mean(pow_abs);
    const double se_m = stderr_of_mean(pow_abs);
    if (m <= 0.0) return {0.0, 0.0};
    const double value = std::pow(m, 1.0 / q);
    return {value, se_m * value / (q * m)};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double det = n * sxx - sx * sx;
    return det == 0.0 ? 0.0 : (n * sxy - sx * sy) / det;
}

}  // namespace wienerlab
