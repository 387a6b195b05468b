#pragma once

#include <complex>
#include <vector>

#include "gpcurve/errors.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

// In-place iterative radix-2 FFT (sign = -1 forward, +1 inverse without the
// 1/n factor). Sized for the modest transforms used here, n <= a few thousand.
inline void fft_pow2(CVec& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / double(len);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Discrete Fourier coefficients c_k = (1/n) sum_j v_j e^{-2 pi i j k / n},
// k = 0..n-1, for power-of-two n via FFT and general n by direct sum.
inline CVec fourier_coefficients(const Vec& v) {
    const std::size_t n = v.size();
    CVec c(n);
    if (n > 0 && (n & (n - 1)) == 0) {
        for (std::size_t j = 0; j < n; ++j) c[j] = cd(v[j], 0.0);
        fft_pow2(c, -1);
        for (auto& z : c) z /= double(n);
        return c;
    }
    for (std::size_t k = 0; k < n; ++k) {
        cd s(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * pi * double(j) * double(k) / double(n);
            s += v[j] * cd(std::cos(ang), std::sin(ang));
        }
        c[k] = s / double(n);
    }
    return c;
}

inline Vec inverse_fourier(const CVec& c) {
    const std::size_t n = c.size();
    Vec v(n, 0.0);
    if (n > 0 && (n & (n - 1)) == 0) {
        CVec a = c;
        fft_pow2(a, +1);
        for (std::size_t j = 0; j < n; ++j) v[j] = a[j].real();
        return v;
    }
    for (std::size_t j = 0; j < n; ++j) {
        cd s(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = 2.0 * pi * double(j) * double(k) / double(n);
            s += c[k] * cd(std::cos(ang), std::sin(ang));
        }
        v[j] = s.real();
    }
    return v;
}

inline int signed_mode(std::size_t k, std::size_t n) {
    return (k <= n / 2) ? int(k) : int(k) - int(n);
}

// Spectral derivative of a periodic sample over period L. The Nyquist mode of
// an even-length transform is real and its derivative contribution is dropped,
// the standard symmetric choice.
inline Vec spectral_derivative(const Vec& v, double period, int order = 1) {
    const std::size_t n = v.size();
    CVec c = fourier_coefficients(v);
    const double w = 2.0 * pi / period;
    for (std::size_t k = 0; k < n; ++k) {
        int m = signed_mode(k, n);
        if (n % 2 == 0 && k == n / 2 && order % 2 == 1) {
            c[k] = cd(0.0, 0.0);
            continue;
        }
        cd f(0.0, w * double(m));
        cd mult(1.0, 0.0);
        for (int p = 0; p < order; ++p) mult *= f;
        c[k] *= mult;
    }
    return inverse_fourier(c);
}

// Truncated trigonometric interpolant of a periodic sample. Supports exact
// evaluation anywhere and the antiderivative from 0, which is what the
// Liouville stretch map needs (endpoint values come out exact).
struct TrigSeries {
    double period = 2.0 * pi;
    CVec c;  // c[k] for k = 0..n-1 with signed-mode convention

    static TrigSeries from_samples(const Vec& v, double period_) {
        TrigSeries t;
        t.period = period_;
        t.c = fourier_coefficients(v);
        return t;
    }

    double operator()(double s) const {
        const std::size_t n = c.size();
        const double w = 2.0 * pi / period;
        cd acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const int m = signed_mode(k, n);
            const double ang = w * double(m) * s;
            acc += c[k] * cd(std::cos(ang), std::sin(ang));
        }
        return acc.real();
    }

    double derivative(double s, int order = 1) const {
        const std::size_t n = c.size();
        const double w = 2.0 * pi / period;
        cd acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const int m = signed_mode(k, n);
            if (n % 2 == 0 && k == n / 2 && order % 2 == 1) continue;
            cd f(0.0, w * double(m));
            cd mult(1.0, 0.0);
            for (int p = 0; p < order; ++p) mult *= f;
            const double ang = w * double(m) * s;
            acc += c[k] * mult * cd(std::cos(ang), std::sin(ang));
        }
        return acc.real();
    }

    // int_0^s of the series: the mean contributes c0*s, every other mode an
    // explicit primitive vanishing at 0.
    double antiderivative(double s) const {
        const std::size_t n = c.size();
        const double w = 2.0 * pi / period;
        cd acc = c.empty() ? cd(0.0, 0.0) : c[0] * s;
        for (std::size_t k = 1; k < n; ++k) {
            const int m = signed_mode(k, n);
            if (m == 0) continue;
            const double ang = w * double(m) * s;
            const cd e(std::cos(ang), std::sin(ang));
            acc += c[k] * (e - cd(1.0, 0.0)) / cd(0.0, w * double(m));
        }
        return acc.real();
    }
};

}  // namespace gpcurve
