#pragma once

#include <cmath>
#include <cstddef>

#include "gpcurve/errors.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

// Uniform 1D grid. The symmetric factory produces the node layout required by
// the profile solver: odd count, node at 0, mirror-image nodes.
struct Grid1D {
    double xmin = 0.0;
    double xmax = 0.0;
    double h = 0.0;
    Vec x;

    std::size_t n() const { return x.size(); }

    static Grid1D uniform(double lo, double hi, std::size_t count) {
        if (count < 3 || !(hi > lo)) throw ConfigError("grid: need count >= 3 and xmax > xmin");
        Grid1D g;
        g.xmin = lo;
        g.xmax = hi;
        g.h = (hi - lo) / double(count - 1);
        g.x = linspace(lo, hi, count);
        return g;
    }

    static Grid1D symmetric(double half_width, std::size_t count) {
        if (count % 2 == 0) throw ConfigError("grid: symmetric grid needs an odd node count");
        Grid1D g = uniform(-half_width, half_width, count);
        // exact mirror symmetry, not just up to rounding
        const std::size_t m = count / 2;
        g.x[m] = 0.0;
        for (std::size_t i = 0; i < m; ++i) g.x[count - 1 - i] = -g.x[i];
        return g;
    }

    bool symmetric_layout() const {
        const std::size_t cnt = n();
        if (cnt % 2 == 0) return false;
        for (std::size_t i = 0; i < cnt; ++i)
            if (std::abs(x[i] + x[cnt - 1 - i]) > 1e-12) return false;
        return true;
    }
};

// Composite Simpson weights; n must be odd.
inline Vec simpson_weights(std::size_t n, double h) {
    if (n < 3 || n % 2 == 0) throw ConfigError("simpson: need odd n >= 3");
    Vec w(n, 2.0 * h / 3.0);
    for (std::size_t i = 1; i < n; i += 2) w[i] = 4.0 * h / 3.0;
    w[0] = w[n - 1] = h / 3.0;
    return w;
}

inline double integrate(const Vec& w, const Vec& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
    return s;
}

inline double integrate3(const Vec& w, const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

// Second-order first derivative: central interior, one-sided ends.
inline Vec fd1(const Vec& v, double h) {
    const std::size_t n = v.size();
    Vec d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    return d;
}

// Fourth-order first derivative on a uniform grid (five-point stencils,
// skewed near the ends).
inline Vec fd1_o4(const Vec& v, double h) {
    const std::size_t n = v.size();
    if (n < 5) return fd1(v, h);
    Vec d(n);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
    d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / (12.0 * h);
    d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / (12.0 * h);
    return d;
}

// Fourth-order second derivative.
inline Vec fd2_o4(const Vec& v, double h) {
    const std::size_t n = v.size();
    const double h2 = h * h;
    Vec d(n);
    if (n < 6) {
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
        d[0] = d[1];
        d[n - 1] = d[n - 2];
        return d;
    }
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h2);
    d[0] = (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] - 10.0 * v[5]) / (12.0 * h2);
    d[1] = (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]) / (12.0 * h2);
    d[n - 2] = (10.0 * v[n - 1] - 15.0 * v[n - 2] - 4.0 * v[n - 3] + 14.0 * v[n - 4] - 6.0 * v[n - 5] + v[n - 6]) / (12.0 * h2);
    d[n - 1] = (45.0 * v[n - 1] - 154.0 * v[n - 2] + 214.0 * v[n - 3] - 156.0 * v[n - 4] + 61.0 * v[n - 5] - 10.0 * v[n - 6]) / (12.0 * h2);
    return d;
}

// Natural cubic spline through uniform samples; used for resampling between
// grids and for evaluating imported fields at arbitrary points.
struct CubicSpline {
    Vec xs, ys, y2;

    CubicSpline() = default;
    CubicSpline(Vec x_, Vec y_) : xs(std::move(x_)), ys(std::move(y_)) {
        const std::size_t n = xs.size();
        y2.assign(n, 0.0);
        if (n < 3) return;
        Vec u(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            const double p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            u[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * u[i] / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        for (std::size_t k = n - 1; k-- > 0;) y2[k] = y2[k] * y2[k + 1] + u[k];
    }

    double operator()(double x) const {
        const std::size_t n = xs.size();
        std::size_t lo = 0, hi = n - 1;
        if (x <= xs.front()) hi = 1;
        else if (x >= xs.back()) lo = n - 2;
        else {
            while (hi - lo > 1) {
                const std::size_t mid = (hi + lo) / 2;
                (xs[mid] > x ? hi : lo) = mid;
            }
        }
        const double hstep = xs[hi] - xs[lo];
        const double a = (xs[hi] - x) / hstep, b = (x - xs[lo]) / hstep;
        return a * ys[lo] + b * ys[hi] +
               ((a * a * a - a) * y2[lo] + (b * b * b - b) * y2[hi]) * (hstep * hstep) / 6.0;
    }
};

}  // namespace gpcurve
