#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace gpcurve {

using Vec = std::vector<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

inline double sq(double x) { return x * x; }
inline double cube(double x) { return x * x * x; }

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline Vec linspace(double lo, double hi, std::size_t n) {
    Vec v(n);
    const double h = (n > 1) ? (hi - lo) / double(n - 1) : 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + double(i) * h;
    if (n > 1) v[n - 1] = hi;
    return v;
}

// Shortest exact decimal form of a double; used by every emitter so that
// repeated runs produce byte-identical artifacts.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Worker cap. GPCURVE_THREADS overrides hardware concurrency; parallel loops
// write to disjoint slots only, so the count never changes any output bit.
inline unsigned worker_count() {
    if (const char* env = std::getenv("GPCURVE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n ? n : 1);
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Deterministic RNG wrapper for the seeded property tests.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        // 53-bit mantissa draw; independent of library distribution internals.
        const std::uint64_t r = gen() >> 11;
        return lo + (hi - lo) * (double(r) / 9007199254740992.0);
    }
    long integer(long lo, long hi) {  // inclusive ends
        return lo + long(gen() % std::uint64_t(hi - lo + 1));
    }
};

}  // namespace gpcurve
