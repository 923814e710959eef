#include "wienerlab/regression.hpp"

#include <cmath>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {
int binom(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}
}  // namespace

int RegressionBasis::n_features() const {
    // monomials of total degree <= degree in n_state variables
    return binom(n_state + degree, degree);
}

void RegressionBasis::features(std::span<const double> s,
                               std::span<double> out) const {
    if (n_state == 1) {
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            out[k] = p;
            p *= s[0];
        }
        return;
    }
    if (n_state == 2) {
        size_t idx = 0;
        double pa = 1.0;
        for (int a = 0; a <= degree; ++a) {
            double pb = 1.0;
            for (int b = 0; b + a <= degree; ++b) {
                out[idx++] = pa * pb;
                pb *= s[1];
            }
            pa *= s[0];
        }
        return;
    }
    // general case: depth-first over exponent vectors
    size_t idx = 0;
    std::vector<int> expo(n_state, 0);
    std::function<void(int, int, double)> rec = [&](int var, int left, double acc) {
        if (var == n_state - 1) {
            double p = acc;
            for (int e = 0; e <= left; ++e) {
                out[idx++] = p;
                p *= s[var];
            }
            return;
        }
        double p = acc;
        for (int e = 0; e <= left; ++e) {
            rec(var + 1, left - e, p);
            p *= s[var];
        }
    };
    rec(0, degree, 1.0);
}

RegressionBasis brownian_state_basis(int degree, double ridge) {
    RegressionBasis b;
    b.degree = degree;
    b.ridge = ridge;
    b.n_state = 1;
    b.state = [](const PathSet& paths, int path, int node, std::span<double> out) {
        out[0] = paths.node(path, node, 0);
    };
    return b;
}

FitResult fit_least_squares(std::span<const double> phi, int n_rows, int k,
                            std::span<const double> y, double ridge,
                            double cond_threshold) {
    // normal equations, scaled by 1/n_rows
    std::vector<double> A(static_cast<size_t>(k) * k, 0.0), b(k, 0.0);
    for (int r = 0; r < n_rows; ++r) {
        const double* row = phi.data() + static_cast<size_t>(r) * k;
        for (int i = 0; i < k; ++i) {
            b[i] += row[i] * y[r];
            for (int j = i; j < k; ++j) A[i * k + j] += row[i] * row[j];
        }
    }
    const double inv_n = 1.0 / n_rows;
    for (int i = 0; i < k; ++i) {
        b[i] *= inv_n;
        for (int j = i; j < k; ++j) A[i * k + j] *= inv_n;
        A[i * k + i] += ridge;
    }
    // Cholesky A = L L^T (upper triangle of A holds the data)
    std::vector<double> L(static_cast<size_t>(k) * k, 0.0);
    double max_d = 0.0, min_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = (j <= i) ? A[j * k + i] : A[i * k + j];
            for (int m = 0; m < j; ++m) s -= L[i * k + m] * L[j * k + m];
            if (i == j) {
                if (s <= 0.0)
                    throw NumericalError("regression: singular normal matrix");
                L[i * k + i] = std::sqrt(s);
                max_d = std::max(max_d, s);
                min_d = std::min(min_d, s);
            } else {
                L[i * k + j] = s / L[j * k + j];
            }
        }
    }
    const double cond = max_d / min_d;
    if (cond > cond_threshold)
        throw NumericalError("regression: condition estimate above threshold");
    // solve L z = b, L^T c = z
    std::vector<double> z(k), c(k);
    for (int i = 0; i < k; ++i) {
        double s = b[i];
        for (int m = 0; m < i; ++m) s -= L[i * k + m] * z[m];
        z[i] = s / L[i * k + i];
    }
    for (int i = k - 1; i >= 0; --i) {
        double s = z[i];
        for (int m = i + 1; m < k; ++m) s -= L[m * k + i] * c[m];
        c[i] = s / L[i * k + i];
    }
    return {std::move(c), cond};
}

double eval_fit(std::span<const double> coef, std::span<const double> feat) {
    double s = 0.0;
    for (size_t i = 0; i < coef.size(); ++i) s += coef[i] * feat[i];
    return s;
}

}  // namespace wienerlab
