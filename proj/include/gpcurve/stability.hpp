#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpcurve/errors.hpp"
#include "gpcurve/fourier.hpp"
#include "gpcurve/geometry.hpp"
#include "gpcurve/linalg.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

// Residual of the stationarity condition kappa (1 + eps2W) + (3/2) eps2W_t,
// sampled on the geometry grid.
inline Vec stationarity_residual(const TubeGeometry& G) {
    Vec r(G.n_theta);
    for (std::size_t i = 0; i < G.n_theta; ++i)
        r[i] = G.kappa[i] * (1.0 + G.W0[i]) + 1.5 * G.Wt[i];
    return r;
}

struct JacobiSpectrum {
    Vec Lambda;                // descending
    std::vector<CVec> modes;   // samples on the theta grid, beta-weighted orthonormal
    double d_epsilon = 0.0;    // min |Lambda|
    double residual_max = 0.0;
};

// Weighted periodic eigenproblem (beta^3 h')' - (q - 2 beta^3 kappa^2) h = Lambda beta h
// by a trigonometric Galerkin method; the pencil matrices are Toeplitz in the
// Fourier coefficients of the coefficient fields.
inline JacobiSpectrum jacobi_spectrum(const TubeGeometry& G, std::size_t j_max,
                                      double degeneracy_tol = 1e-12) {
    const std::size_t n = G.n_theta;
    const std::size_t K = std::min(n / 4, std::max<std::size_t>(48, j_max + 16));
    if (2 * j_max + 1 > 2 * K + 1) throw ConfigError("jacobi_spectrum: j_max too large for the grid");
    Vec b3(n), V(n), bw(n);
    for (std::size_t i = 0; i < n; ++i) {
        b3[i] = cube(G.beta[i]);
        const double q = 1.5 * G.beta[i] * G.Wtt[i] + 0.75 * sq(G.Wt[i]) / G.beta[i];
        V[i] = q - 2.0 * b3[i] * sq(G.kappa[i]);
        bw[i] = G.beta[i];
    }
    const CVec cb3 = fourier_coefficients(b3);
    const CVec cV = fourier_coefficients(V);
    const CVec cb = fourier_coefficients(bw);
    auto coef = [&](const CVec& c, long m) -> cd {
        long mm = m % long(n);
        if (mm < 0) mm += long(n);
        return c[std::size_t(mm)];
    };
    const long k = long(K);
    const long dim = 2 * k + 1;
    const double omega = 2.0 * pi / G.ell;
    Eigen::MatrixXcd A(dim, dim), B(dim, dim);
    for (long row = -k; row <= k; ++row) {
        for (long col = -k; col <= k; ++col) {
            const long m = row - col;
            A(row + k, col + k) = omega * omega * double(row) * double(col) * coef(cb3, m) + coef(cV, m);
            B(row + k, col + k) = coef(cb, m);
        }
    }
    Vec mu;
    Eigen::MatrixXcd W;
    hermitian_gep(A, B, mu, W);  // ascending mu; Lambda = -mu descending

    JacobiSpectrum out;
    const std::size_t want = 2 * j_max + 1;
    out.Lambda.resize(want);
    out.modes.resize(want);
    const double norm = 1.0 / std::sqrt(G.ell);
    for (std::size_t m = 0; m < want; ++m) {
        out.Lambda[m] = -mu[m];
        // synthesize on the sample grid: mode j lands in DFT slot j mod n
        CVec h(n, cd(0.0, 0.0));
        for (long j = -k; j <= k; ++j) {
            long slot = j % long(n);
            if (slot < 0) slot += long(n);
            h[std::size_t(slot)] = W(j + k, long(m)) * norm;
        }
        fft_pow2(h, +1);
        out.modes[m] = std::move(h);
    }

    out.d_epsilon = 1e300;
    for (double L : out.Lambda) out.d_epsilon = std::min(out.d_epsilon, std::abs(L));

    // strong-form residual of each returned pair on the sample grid
    for (std::size_t m = 0; m < want; ++m) {
        Vec hr(n), hi(n);
        for (std::size_t i = 0; i < n; ++i) {
            hr[i] = out.modes[m][i].real();
            hi[i] = out.modes[m][i].imag();
        }
        auto residual_part = [&](const Vec& h) {
            const Vec h1 = spectral_derivative(h, G.ell, 1);
            Vec flux(n);
            for (std::size_t i = 0; i < n; ++i) flux[i] = b3[i] * h1[i];
            const Vec flux1 = spectral_derivative(flux, G.ell, 1);
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(flux1[i] - V[i] * h[i] - bw[i] * out.Lambda[m] * h[i]));
            return worst;
        };
        out.residual_max = std::max(out.residual_max, std::max(residual_part(hr), residual_part(hi)));
    }
    if (out.d_epsilon < degeneracy_tol) throw Degenerate("jacobi_spectrum: eigenvalue at zero");
    return out;
}

struct GapCheck {
    bool pass = false;
    long nearest_j = 0;
    double margin = 0.0;
};

// Nondegeneracy of the wave numbers: min over j >= 1 of |j^2 r^2 - lambda*| / r
// with r = eps / ell_tilde, scanned both around the resonant index and
// exhaustively up to j = 10^4.
inline GapCheck check_gap_epsilon(double epsilon, double ell_tilde, double lambda0, double c) {
    if (!(epsilon > 0.0) || !(ell_tilde > 0.0) || !(lambda0 > 0.0) || !(c > 0.0))
        throw ConfigError("check_gap_epsilon: positive inputs required");
    const double r = epsilon / ell_tilde;
    const double lam = lambda0 / (4.0 * pi * pi);
    GapCheck out;
    out.margin = 1e300;
    const long jn = std::lround(std::sqrt(lam) / r);
    auto visit = [&](long j) {
        if (j < 1) return;
        const double m = std::abs(double(j) * double(j) * r * r - lam) / r;
        if (m < out.margin) {
            out.margin = m;
            out.nearest_j = j;
        }
    };
    for (long j = std::max(1L, jn - 3); j <= jn + 3; ++j) visit(j);
    for (long j = 1; j <= 10000; ++j) visit(j);
    out.pass = out.margin >= c;
    return out;
}

// Mass-parameter counterpart: rho0 / a must avoid the windows
// [sqrt(lambda*)/j - 2c/j^2, sqrt(lambda*)/j + 2c/j^2].
inline GapCheck check_gap_a(double a, double c, double rho0, double lambda_star) {
    if (!(a > 0.0) || !(c > 0.0) || !(rho0 > 0.0) || !(lambda_star > 0.0))
        throw ConfigError("check_gap_a: positive inputs required");
    const double x = rho0 / a;
    const double s = std::sqrt(lambda_star);
    GapCheck out;
    out.margin = 1e300;
    for (long j = 1; j <= 10000; ++j) {
        const double m = 0.5 * double(j) * double(j) * std::abs(x - s / double(j));
        if (m < out.margin) {
            out.margin = m;
            out.nearest_j = j;
        }
    }
    out.pass = out.margin >= c;
    return out;
}

}  // namespace gpcurve
