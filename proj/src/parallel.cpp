#include "wienerlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) {
    if (n < 0) throw InvalidArgument("set_max_threads: cap must be >= 0");
    g_max_threads.store(n);
}

int max_threads() {
    const int cap = g_max_threads.load();
    if (cap > 0) return cap;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int, int)>& body) {
    if (n <= 0) return;
    const int workers = std::min(max_threads(), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk, end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace wienerlab
