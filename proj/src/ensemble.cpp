#include "wienerlab/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "wienerlab/errors.hpp"
#include "wienerlab/parallel.hpp"

namespace wienerlab {

namespace {

// splitmix64: counter-based stream, one independent chain per path.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t bits) {
    // 53-bit mantissa, open interval (0,1)
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

WienerEnsemble sample_ensemble(const Grid& grid, int dim, int n_paths,
                               std::uint64_t seed) {
    if (dim < 1) throw InvalidArgument("sample_ensemble: dim must be >= 1");
    if (n_paths < 1) throw InvalidArgument("sample_ensemble: n_paths must be >= 1");
    WienerEnsemble e;
    e.grid = grid;
    e.dim = dim;
    e.n_paths = n_paths;
    e.seed = seed;
    const int N = grid.n_steps;
    e.increments.resize(static_cast<size_t>(n_paths) * N * dim);
    e.nodes.resize(static_cast<size_t>(n_paths) * (N + 1) * dim);

    parallel_for(n_paths, [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
        // Per-path stream key; mixed once so nearby seeds decorrelate.
        std::uint64_t st = seed ^ 0x2545f4914f6cdd1dULL;
        splitmix64(st);
        st ^= static_cast<std::uint64_t>(p) * 0x9e3779b97f4a7c15ULL;
        splitmix64(st);
        double spare = 0.0;
        bool has_spare = false;
        for (int i = 0; i < N; ++i) {
            const double sd = std::sqrt(grid.dt(i));
            for (int c = 0; c < dim; ++c) {
                double g;
                if (has_spare) {
                    g = spare;
                    has_spare = false;
                } else {
                    // Box-Muller on explicit uniform bits: deterministic
                    // across platforms, unlike std::normal_distribution.
                    const double u1 = uniform01(splitmix64(st));
                    const double u2 = uniform01(splitmix64(st));
                    const double r = std::sqrt(-2.0 * std::log(u1));
                    const double a = 2.0 * std::numbers::pi * u2;
                    g = r * std::cos(a);
                    spare = r * std::sin(a);
                    has_spare = true;
                }
                e.increments[(static_cast<size_t>(p) * N + i) * dim + c] = g * sd;
            }
        }
        for (int c = 0; c < dim; ++c)
            e.nodes[(static_cast<size_t>(p) * (N + 1)) * dim + c] = 0.0;
        for (int i = 0; i < N; ++i)
            for (int c = 0; c < dim; ++c)
                e.nodes[(static_cast<size_t>(p) * (N + 1) + i + 1) * dim + c] =
                    e.nodes[(static_cast<size_t>(p) * (N + 1) + i) * dim + c] +
                    e.increments[(static_cast<size_t>(p) * N + i) * dim + c];
    }
    });
    return e;
}

PathSet shift(const PathSet& paths, const Direction& h, double eps) {
    if (!paths.grid().same(h.grid) || paths.dim() != h.dim)
        throw InvalidArgument("shift: grid or dimension mismatch");
    PathSet out = paths;
    for (auto& s : out.shifts_) {
        if (s.dir == &h) {
            s.eps += eps;
            return out;
        }
    }
    out.shifts_.push_back({&h, eps});
    return out;
}

namespace {
constexpr std::uint64_t kMagic = 0x574e4c414231ULL;  // "WNLAB1"

void put_u64(std::FILE* f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    std::fwrite(b, 1, 8, f);
}
std::uint64_t get_u64(std::FILE* f) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8)
        throw NumericalError("ensemble cache: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
std::uint64_t to_bits(double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    return v;
}
double from_bits(std::uint64_t v) {
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}
}  // namespace

void save_ensemble(const WienerEnsemble& e, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw InvalidArgument("save_ensemble: cannot open " + path);
    put_u64(f, kMagic);
    put_u64(f, to_bits(e.grid.horizon));
    put_u64(f, static_cast<std::uint64_t>(e.grid.n_steps));
    put_u64(f, static_cast<std::uint64_t>(e.dim));
    put_u64(f, static_cast<std::uint64_t>(e.n_paths));
    put_u64(f, e.seed);
    for (double v : e.increments) put_u64(f, to_bits(v));
    std::fclose(f);
}

WienerEnsemble load_ensemble(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw InvalidArgument("load_ensemble: cannot open " + path);
    WienerEnsemble e;
    try {
        if (get_u64(f) != kMagic)
            throw NumericalError("ensemble cache: bad magic");
        const double T = from_bits(get_u64(f));
        const int N = static_cast<int>(get_u64(f));
        e.grid = make_grid(T, N);
        e.dim = static_cast<int>(get_u64(f));
        e.n_paths = static_cast<int>(get_u64(f));
        e.seed = get_u64(f);
        const size_t n = static_cast<size_t>(e.n_paths) * N * e.dim;
        e.increments.resize(n);
        for (size_t i = 0; i < n; ++i) e.increments[i] = from_bits(get_u64(f));
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
    const int N = e.grid.n_steps;
    e.nodes.assign(static_cast<size_t>(e.n_paths) * (N + 1) * e.dim, 0.0);
    for (int p = 0; p < e.n_paths; ++p)
        for (int i = 0; i < N; ++i)
            for (int c = 0; c < e.dim; ++c)
                e.nodes[(static_cast<size_t>(p) * (N + 1) + i + 1) * e.dim + c] =
                    e.nodes[(static_cast<size_t>(p) * (N + 1) + i) * e.dim + c] +
                    e.increments[(static_cast<size_t>(p) * N + i) * e.dim + c];
    return e;
}

}  // namespace wienerlab
