#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gpcurve/errors.hpp"
#include "gpcurve/grid.hpp"
#include "gpcurve/linalg.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

// Scalar integrals of the profile and its associated functions, all obtained
// by composite Simpson quadrature on the stored samples.
struct ConstantsTable {
    double rho0 = 0, rho1 = 0, rho2 = 0, rho3 = 0, rho4 = 0, rho_p = 0;
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0, b7 = 0;
    double d1 = 0, d2 = 0, d3 = 0, d4 = 0, d5 = 0, d6 = 0, d7 = 0, d8 = 0, d9 = 0;
    double int_xUUp = 0;       // = -rho0/2
    double int_Up3 = 0;        // recorded for the identity audit, 0 by parity
    double int_x2UUpp = 0;     // = rho0 - rho2
    double w1_c = 0;           // coefficient of U' in the closed-form varpi1
    double int_w1cubed_Up = 0;
    double int_w1w2UUp = 0;
};

struct SolitonProfile {
    Grid1D grid;
    Vec U, Up, Upp;
    double lambda0 = 0;
    double lambda1 = 0;
    Vec Z, Zp, Zpp;
    ConstantsTable constants;
    Vec simpson;  // quadrature weights on grid

    // per-resolution Newton solutions kept for Richardson-extrapolated
    // eigenvalue queries (the coarse one lives on `grid`, the fine one on the
    // half-step refinement)
    Vec U_raw, U_raw_fine;
};

namespace detail {

// Newton solve of u'' - u + u^3 = 0 with Dirichlet zero ends on a symmetric
// grid. The linear steps act on the even half (ghost fold at the center node):
// the full-line Jacobian is numerically singular along the translation mode,
// while the folded system is uniformly well conditioned.
inline Vec newton_soliton(const Grid1D& g, double tol, const Vec* seed_full) {
    const std::size_t n = g.n();
    const std::size_t m = n / 2;  // center index
    const double h = g.h, h2 = h * h;
    // unknowns u_j = U(x_{m+j}), j = 0..m-1
    Vec u(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = g.x[m + j];
        u[j] = seed_full ? (*seed_full)[m + j] : 1.5 * std::exp(-0.5 * x * x);
    }
    Vec F(m), du(m), lower(m), diag(m), upper(m);
    auto residual = [&](const Vec& v, Vec& out) {
        out[0] = (2.0 * v[1] - 2.0 * v[0]) / h2 - v[0] + cube(v[0]);
        for (std::size_t j = 1; j + 1 < m; ++j)
            out[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / h2 - v[j] + cube(v[j]);
        out[m - 1] = (-2.0 * v[m - 1] + v[m - 2]) / h2 - v[m - 1] + cube(v[m - 1]);
    };
    auto norm_inf = [](const Vec& v) { return max_abs(v); };
    residual(u, F);
    double fn = norm_inf(F);
    // rounding floor of the discrete residual, dominated by the 1/h^2 terms
    const double floor_res = 16.0 * 2.220446049250313e-16 * (2.0 / h2 + 2.0);
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
        for (std::size_t j = 0; j < m; ++j) {
            diag[j] = -2.0 / h2 - 1.0 + 3.0 * u[j] * u[j];
            lower[j] = 1.0 / h2;
            upper[j] = 1.0 / h2;
        }
        upper[0] = 2.0 / h2;  // ghost fold u_{-1} = u_{+1}
        // Thomas elimination (diagonally dominant for this operator)
        Vec cp(m), dp(m);
        cp[0] = upper[0] / diag[0];
        dp[0] = -F[0] / diag[0];
        for (std::size_t j = 1; j < m; ++j) {
            const double den = diag[j] - lower[j] * cp[j - 1];
            cp[j] = (j + 1 < m) ? upper[j] / den : 0.0;
            dp[j] = (-F[j] - lower[j] * dp[j - 1]) / den;
        }
        du[m - 1] = dp[m - 1];
        for (std::size_t j = m - 1; j-- > 0;) du[j] = dp[j] - cp[j] * du[j + 1];
        // damped update
        double step = 1.0;
        Vec trial(m), Ft(m);
        for (int back = 0; back < 25; ++back) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = u[j] + step * du[j];
            residual(trial, Ft);
            if (norm_inf(Ft) < fn || fn < tol) break;
            step *= 0.5;
        }
        u = trial;
        F = Ft;
        fn = norm_inf(F);
        if (fn < std::max(tol, floor_res) && step * norm_inf(du) < std::max(tol, 1e-14)) {
            ok = true;
            break;
        }
    }
    if (!ok) throw NonConvergence("soliton Newton: no convergence in 100 iterations");
    if (u[0] < 0.5) throw NonConvergence("soliton Newton: collapsed to the trivial solution");
    Vec full(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        full[m + j] = u[j];
        full[m - j] = u[j];
    }
    return full;
}

inline SymTridiag linearized_matrix(const Vec& U, double h) {
    const std::size_t n = U.size();
    SymTridiag T;
    T.diag.resize(n);
    T.off.assign(n - 1, 1.0 / (h * h));
    for (std::size_t i = 0; i < n; ++i) T.diag[i] = -2.0 / (h * h) - 1.0 + 3.0 * U[i] * U[i];
    return T;
}

// top-k eigenvalues (descending) of h'' - h + 3U^2 h with Dirichlet ends
inline Vec top_eigenvalues(const Vec& U, double h, int k) {
    SymTridiag T = linearized_matrix(U, h);
    for (auto& v : T.diag) v = -v;
    for (auto& v : T.off) v = -v;
    Vec low = lowest_eigenvalues(T, k);
    for (auto& v : low) v = -v;
    return low;
}

inline Vec eigenvector_for(const Vec& U, double h, double lam) {
    SymTridiag T = linearized_matrix(U, h);
    return inverse_iteration(T, lam);
}

inline Vec richardson(const Vec& coarse, const Vec& fine) {
    Vec out(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) out[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
    return out;
}

inline void symmetrize_even(Vec& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double m = 0.5 * (v[i] + v[n - 1 - i]);
        v[i] = v[n - 1 - i] = m;
    }
}

}  // namespace detail

// Closed-form correction members assembled from profile samples. varpi2 solves
// L(w) = -U exactly; varpi1 solves L(w) = -(U' + (2/3)xU) with the U' weight
// fixed by the orthogonality to U'.
inline Vec varpi2_closed(const Grid1D& g, const Vec& U, const Vec& Up) {
    Vec w(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) w[i] = -0.5 * (U[i] + g.x[i] * Up[i]);
    return w;
}

inline Vec varpi2p_closed(const Grid1D& g, const Vec& Up, const Vec& Upp) {
    Vec w(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) w[i] = -0.5 * (2.0 * Up[i] + g.x[i] * Upp[i]);
    return w;
}

inline Vec varpi1_closed(const Grid1D& g, const Vec& U, const Vec& Up, double c) {
    Vec w(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double x = g.x[i];
        w[i] = -x * U[i] / 3.0 - x * x * Up[i] / 6.0 + c * Up[i];
    }
    return w;
}

inline Vec varpi1p_closed(const Grid1D& g, const Vec& U, const Vec& Up, const Vec& Upp, double c) {
    Vec w(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double x = g.x[i];
        w[i] = -U[i] / 3.0 - 2.0 * x * Up[i] / 3.0 + (c - x * x / 6.0) * Upp[i];
    }
    return w;
}

inline ConstantsTable profile_constants(const SolitonProfile& p) {
    const Grid1D& g = p.grid;
    const Vec& W = p.simpson;
    const std::size_t n = g.n();
    auto I = [&](auto&& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += W[i] * f(i);
        return s;
    };
    ConstantsTable c;
    c.rho0 = I([&](std::size_t i) { return sq(p.U[i]); });
    c.rho1 = I([&](std::size_t i) { return sq(p.Up[i]); });
    c.rho2 = I([&](std::size_t i) { return sq(g.x[i] * p.Up[i]); });
    c.rho3 = I([&](std::size_t i) { return sq(g.x[i] * p.Upp[i]); });
    c.rho4 = I([&](std::size_t i) { return sq(g.x[i] * g.x[i] * p.Upp[i]); });
    c.rho_p = I([&](std::size_t i) { return sq(sq(p.U[i])); });
    c.int_xUUp = I([&](std::size_t i) { return g.x[i] * p.U[i] * p.Up[i]; });
    c.int_Up3 = I([&](std::size_t i) { return cube(p.Up[i]); });
    c.int_x2UUpp = I([&](std::size_t i) { return g.x[i] * g.x[i] * p.U[i] * p.Upp[i]; });
    c.w1_c = c.rho2 / 8.0 - 0.5;

    const Vec w1 = varpi1_closed(g, p.U, p.Up, c.w1_c);
    const Vec w1p = varpi1p_closed(g, p.U, p.Up, p.Upp, c.w1_c);
    const Vec w2 = varpi2_closed(g, p.U, p.Up);
    const Vec w2p = varpi2p_closed(g, p.Up, p.Upp);

    c.b0 = I([&](std::size_t i) { return sq(p.Z[i]); });
    c.b1 = I([&](std::size_t i) { return p.U[i] * cube(p.Z[i]); });
    c.b2 = I([&](std::size_t i) { return sq(sq(p.Z[i])); });
    c.b3 = I([&](std::size_t i) { return w2[i] * p.Z[i]; });
    c.b4 = I([&](std::size_t i) { return g.x[i] * p.Up[i] * p.Z[i]; });
    c.b5 = I([&](std::size_t i) { return p.U[i] * p.Z[i]; });
    c.b6 = I([&](std::size_t i) { return p.Upp[i] * p.Z[i]; });
    c.b7 = I([&](std::size_t i) { return w1p[i] * p.Z[i]; });

    c.d1 = I([&](std::size_t i) { return (p.Zp[i] + (2.0 / 3.0) * g.x[i] * p.Z[i]) * p.Up[i]; });
    c.d2 = 6.0 * I([&](std::size_t i) { return p.U[i] * p.Z[i] * w1[i] * p.Up[i]; });
    c.d3 = I([&](std::size_t i) { return cube(g.x[i]) * p.U[i] * p.Up[i]; });
    c.d4 = c.rho2;
    c.d5 = I([&](std::size_t i) { return cube(g.x[i]) * p.Upp[i] * p.Up[i]; });
    c.d8 = I([&](std::size_t i) { return p.Zp[i] * p.Up[i]; });
    c.d6 = -8.0 * sq(pi) * c.b4;
    c.d7 = -8.0 * sq(pi) * c.d8;
    c.d9 = (2.0 / 3.0) * I([&](std::size_t i) { return w2p[i] * p.Up[i]; });

    c.int_w1cubed_Up = I([&](std::size_t i) { return cube(w1[i]) * p.Up[i]; });
    c.int_w1w2UUp = I([&](std::size_t i) { return w1[i] * w2[i] * p.U[i] * p.Up[i]; });
    return c;
}

inline void validate_profile(const SolitonProfile& p) {
    const std::size_t n = p.grid.n();
    double asym = 0.0, res = 0.0, zn = 0.0, decay = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p.U[i] > 0.0) && i != 0 && i != n - 1)
            throw NonConvergence("profile: positivity violated");
        asym = std::max(asym, std::abs(p.U[i] - p.U[n - 1 - i]));
        res = std::max(res, std::abs(p.Upp[i] - p.U[i] + cube(p.U[i])));
        zn += p.simpson[i] * sq(p.Z[i]);
        if (std::abs(p.grid.x[i]) > 10.0)
            decay = std::max(decay, p.U[i] * std::exp(std::abs(p.grid.x[i])));
    }
    if (asym > 1e-10) throw NonConvergence("profile: evenness violated");
    // fourth-order envelope: the fixed floor applies at production resolution
    const double h4 = sq(sq(p.grid.h));
    if (res > std::max(1e-9, 10.0 * h4)) throw NonConvergence("profile: defining-equation residual too large");
    if (std::abs(zn - 1.0) > 1e-8) throw NonConvergence("profile: Z normalization off");
    if (decay > 4.0) throw NonConvergence("profile: decay envelope violated");
}

inline SolitonProfile compute_profile(const Grid1D& grid, double newton_tol) {
    if (!(newton_tol > 0.0) || newton_tol > 1e-6) throw ConfigError("compute_profile: newton_tol must lie in (0, 1e-6]");
    if (grid.n() < 3 || grid.n() % 2 == 0 || !grid.symmetric_layout())
        throw ConfigError("compute_profile: grid must be symmetric with odd node count");
    if (grid.xmax < 15.0) throw ConfigError("compute_profile: need x_max >= 15");

    SolitonProfile p;
    p.grid = grid;
    p.simpson = simpson_weights(grid.n(), grid.h);

    const Grid1D fine = Grid1D::symmetric(grid.xmax, 2 * grid.n() - 1);
    p.U_raw = detail::newton_soliton(grid, newton_tol, nullptr);
    Vec seed_fine(fine.n());
    for (std::size_t i = 0; i < fine.n(); ++i)
        seed_fine[i] = (i % 2 == 0) ? p.U_raw[i / 2] : 0.5 * (p.U_raw[i / 2] + p.U_raw[i / 2 + 1]);
    p.U_raw_fine = detail::newton_soliton(fine, newton_tol, &seed_fine);

    p.U = detail::richardson(p.U_raw, p.U_raw_fine);
    Vec upp_c(grid.n()), upp_f(fine.n());
    for (std::size_t i = 0; i < grid.n(); ++i) upp_c[i] = p.U_raw[i] - cube(p.U_raw[i]);
    for (std::size_t i = 0; i < fine.n(); ++i) upp_f[i] = p.U_raw_fine[i] - cube(p.U_raw_fine[i]);
    p.Upp = detail::richardson(upp_c, upp_f);
    p.Up = detail::richardson(fd1(p.U_raw, grid.h), fd1(p.U_raw_fine, fine.h));

    // linearization eigenpairs, per resolution then extrapolated
    const Vec ev_c = detail::top_eigenvalues(p.U_raw, grid.h, 2);
    const Vec ev_f = detail::top_eigenvalues(p.U_raw_fine, fine.h, 2);
    p.lambda0 = (4.0 * ev_f[0] - ev_c[0]) / 3.0;
    p.lambda1 = (4.0 * ev_f[1] - ev_c[1]) / 3.0;

    auto ground = [&](const Grid1D& g, const Vec& Uv, double lam) {
        Vec z = detail::eigenvector_for(Uv, g.h, lam);
        if (z[g.n() / 2] < 0.0)
            for (auto& v : z) v = -v;
        detail::symmetrize_even(z);
        const Vec w = simpson_weights(g.n(), g.h);
        double nrm = std::sqrt(integrate3(w, z, z));
        for (auto& v : z) v /= nrm;
        return z;
    };
    const Vec z_c = ground(grid, p.U_raw, ev_c[0]);
    const Vec z_f = ground(fine, p.U_raw_fine, ev_f[0]);
    p.Z = detail::richardson(z_c, z_f);
    {
        const double nrm = std::sqrt(integrate3(p.simpson, p.Z, p.Z));
        for (auto& v : p.Z) v /= nrm;
    }
    Vec zpp_c(grid.n()), zpp_f(fine.n());
    for (std::size_t i = 0; i < grid.n(); ++i) zpp_c[i] = (ev_c[0] + 1.0 - 3.0 * sq(p.U_raw[i])) * z_c[i];
    for (std::size_t i = 0; i < fine.n(); ++i) zpp_f[i] = (ev_f[0] + 1.0 - 3.0 * sq(p.U_raw_fine[i])) * z_f[i];
    p.Zpp = detail::richardson(zpp_c, zpp_f);
    p.Zp = detail::richardson(fd1(z_c, grid.h), fd1(z_f, fine.h));

    p.constants = profile_constants(p);
    validate_profile(p);
    return p;
}

// Eigenpairs of the linearized operator, sorted descending. Eigenvalues are
// Richardson-extrapolated across the two stored resolutions; eigenvectors are
// normalized in L2 with positive value at the origin where nonzero.
inline std::vector<std::pair<double, Vec>> linearization_spectrum(const SolitonProfile& p, int k_eigs) {
    if (k_eigs < 2) throw ConfigError("linearization_spectrum: k_eigs >= 2");
    const Grid1D& g = p.grid;
    const Grid1D fine = Grid1D::symmetric(g.xmax, 2 * g.n() - 1);
    const Vec ev_c = detail::top_eigenvalues(p.U_raw, g.h, k_eigs);
    const Vec ev_f = detail::top_eigenvalues(p.U_raw_fine, fine.h, k_eigs);
    std::vector<std::pair<double, Vec>> out;
    const Vec wq = p.simpson;
    for (int j = 0; j < k_eigs; ++j) {
        const double lam = (4.0 * ev_f[j] - ev_c[j]) / 3.0;
        Vec v_c = detail::eigenvector_for(p.U_raw, g.h, ev_c[j]);
        Vec v_f = detail::eigenvector_for(p.U_raw_fine, fine.h, ev_f[j]);
        auto fix = [&](Vec& v, const Grid1D& gg) {
            const Vec w = simpson_weights(gg.n(), gg.h);
            double nrm = std::sqrt(integrate3(w, v, v));
            for (auto& t : v) t /= nrm;
            // orient: positive at x=0, else positive slope at x=0
            const std::size_t m = gg.n() / 2;
            double ref = std::abs(v[m]) > 1e-8 ? v[m] : v[m + 1] - v[m - 1];
            if (ref < 0.0)
                for (auto& t : v) t = -t;
        };
        fix(v_c, g);
        fix(v_f, fine);
        Vec v = detail::richardson(v_c, v_f);
        double nrm = std::sqrt(integrate3(wq, v, v));
        for (auto& t : v) t /= nrm;
        out.emplace_back(lam, std::move(v));
    }
    return out;
}

// Bordered solve of phi'' - phi + 3U^2 phi = -rhs with the U'-orthogonality
// always enforced and the Z-orthogonality optional.
struct ProjectedSolve {
    Vec phi, phi_p, phi_pp;
    double mu_Up = 0.0;  // multiplier on U' (zero when the data is compatible)
    double mu_Z = 0.0;   // multiplier on Z when projected, else 0
};

struct LineRhs {
    Vec coarse;  // samples on the profile grid
    Vec fine;    // samples on the half-step refinement
};

namespace detail {

inline ProjectedSolve projected_line_one(const Grid1D& g, const Vec& Uv, const Vec& rhs,
                                         bool project_Z, const Vec& Zv) {
    const std::size_t n = g.n();
    // interior unknowns 1..n-2, Dirichlet zero ends
    const std::size_t ni = n - 2;
    SymTridiag L;
    L.diag.resize(ni);
    L.off.assign(ni - 1, 1.0 / (g.h * g.h));
    Vec b(ni), upv(ni), zv(ni), w(ni);
    const Vec wq = simpson_weights(n, g.h);
    const Vec up = fd1(Uv, g.h);
    for (std::size_t i = 0; i < ni; ++i) {
        L.diag[i] = -2.0 / (g.h * g.h) - 1.0 + 3.0 * sq(Uv[i + 1]);
        b[i] = -rhs[i + 1];
        upv[i] = up[i + 1];
        zv[i] = Zv[i + 1];
        w[i] = wq[i + 1];
    }
    std::vector<const Vec*> chi;
    chi.push_back(&upv);
    if (project_Z) chi.push_back(&zv);
    BorderedResult r = solve_bordered_tridiag(L, b, chi, w);
    ProjectedSolve out;
    out.phi.assign(n, 0.0);
    for (std::size_t i = 0; i < ni; ++i) out.phi[i + 1] = r.phi[i];
    out.mu_Up = r.mu[0];
    if (project_Z) out.mu_Z = r.mu[1];
    return out;
}

}  // namespace detail

// rhs given on the profile grid (and optionally pre-sampled on the fine grid;
// otherwise it is interpolated by cubic spline, adequate for smooth data).
inline ProjectedSolve solve_projected_line(const SolitonProfile& p, const LineRhs& rhs,
                                           const std::set<std::string>& project_out) {
    for (const auto& s : project_out)
        if (s != "Up" && s != "Z") throw ConfigError("solve_projected_line: project_out may contain only Up, Z");
    const Grid1D& g = p.grid;
    const std::size_t n = g.n();
    if (rhs.coarse.size() != n) throw ConfigError("solve_projected_line: rhs size mismatch");
    if (std::abs(rhs.coarse.front()) > 1e-8 || std::abs(rhs.coarse.back()) > 1e-8)
        throw ConfigError("solve_projected_line: rhs must decay at the ends");

    const bool want_Z = project_out.count("Z") > 0;
    const bool allow_Up = project_out.count("Up") > 0;
    if (!allow_Up) {
        const double num = integrate3(p.simpson, rhs.coarse, p.Up);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += p.simpson[i] * std::abs(rhs.coarse[i] * p.Up[i]);
        if (std::abs(num) > 1e-6 * std::max(scale, 1e-300))
            throw Unsolvable("solve_projected_line: rhs has a U' component");
    }

    const Grid1D fine = Grid1D::symmetric(g.xmax, 2 * n - 1);
    Vec rhs_f;
    if (rhs.fine.size() == fine.n()) {
        rhs_f = rhs.fine;
    } else {
        CubicSpline sp(g.x, rhs.coarse);
        rhs_f.resize(fine.n());
        for (std::size_t i = 0; i < fine.n(); ++i)
            rhs_f[i] = (i % 2 == 0) ? rhs.coarse[i / 2] : sp(fine.x[i]);
    }

    // fine-grid Z for the border: spline of the stored (already extrapolated) Z
    Vec z_f(fine.n());
    {
        CubicSpline sp(g.x, p.Z);
        for (std::size_t i = 0; i < fine.n(); ++i) z_f[i] = (i % 2 == 0) ? p.Z[i / 2] : sp(fine.x[i]);
    }
    ProjectedSolve a = detail::projected_line_one(g, p.U_raw, rhs.coarse, want_Z, p.Z);
    ProjectedSolve b = detail::projected_line_one(fine, p.U_raw_fine, rhs_f, want_Z, z_f);

    ProjectedSolve out;
    out.phi = detail::richardson(a.phi, b.phi);
    out.mu_Up = (4.0 * b.mu_Up - a.mu_Up) / 3.0;
    out.mu_Z = (4.0 * b.mu_Z - a.mu_Z) / 3.0;

    // The solution inherits the parity of the data; projecting onto that class
    // strips solver rounding that would otherwise break the parity invariant.
    double even_err = 0.0, odd_err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        even_err = std::max(even_err, std::abs(rhs.coarse[i] - rhs.coarse[n - 1 - i]));
        odd_err = std::max(odd_err, std::abs(rhs.coarse[i] + rhs.coarse[n - 1 - i]));
        scale = std::max(scale, std::abs(rhs.coarse[i]));
    }
    const double par_tol = 1e-9 * std::max(scale, 1e-300);
    if (even_err < par_tol || odd_err < par_tol) {
        const double sgn = (even_err < par_tol) ? 1.0 : -1.0;
        auto project = [](Vec& v, double s) {
            const std::size_t nn = v.size();
            for (std::size_t i = 0; i < nn / 2; ++i) {
                const double mval = 0.5 * (v[i] + s * v[nn - 1 - i]);
                v[i] = mval;
                v[nn - 1 - i] = s * mval;
            }
            if (s < 0.0) v[nn / 2] = 0.0;
        };
        project(a.phi, sgn);
        project(b.phi, sgn);
        project(out.phi, sgn);
    }
    out.phi_p = detail::richardson(fd1(a.phi, g.h), fd1(b.phi, fine.h));
    // second derivative from the solved equation, per resolution
    Vec spp_c(n), spp_f(fine.n());
    for (std::size_t i = 0; i < n; ++i)
        spp_c[i] = (1.0 - 3.0 * sq(p.U_raw[i])) * a.phi[i] - rhs.coarse[i] - a.mu_Up * p.Up[i] - a.mu_Z * p.Z[i];
    const Vec up_f = fd1(p.U_raw_fine, fine.h);
    for (std::size_t i = 0; i < fine.n(); ++i)
        spp_f[i] = (1.0 - 3.0 * sq(p.U_raw_fine[i])) * b.phi[i] - rhs_f[i] - b.mu_Up * up_f[i] - b.mu_Z * z_f[i];
    out.phi_pp = detail::richardson(spp_c, spp_f);
    return out;
}

// The eight-member correction basis. Solved on its own wider grid so that the
// polynomially weighted members still clear the decay threshold at the ends.
struct CorrectionBasis {
    Grid1D grid;
    SolitonProfile prof;  // profile re-solved on `grid`
    std::array<Vec, 8> w, wp, wpp;

    const Vec& varpi(int k) const { return w[std::size_t(k - 1)]; }
    const Vec& varpi_p(int k) const { return wp[std::size_t(k - 1)]; }
    const Vec& varpi_pp(int k) const { return wpp[std::size_t(k - 1)]; }
};

inline CorrectionBasis correction_basis(const SolitonProfile& p, double x_max_basis = 40.0) {
    CorrectionBasis B;
    const double h = p.grid.h;
    const std::size_t n_wide = 2 * std::size_t(std::llround(x_max_basis / h)) + 1;
    B.grid = Grid1D::symmetric(x_max_basis, n_wide);
    if (std::abs(B.grid.h - h) > 1e-13) throw ConfigError("correction_basis: incompatible spacing");
    B.prof = compute_profile(B.grid, 1e-12);
    const SolitonProfile& q = B.prof;
    const Grid1D& g = B.grid;
    const std::size_t n = g.n();

    auto solve_member = [&](const Vec& rhs_samples) {
        LineRhs r;
        r.coarse = rhs_samples;
        return solve_projected_line(q, r, {"Up"});
    };

    // member right-hand sides, in terms of stored samples
    std::array<Vec, 8> rhs;
    for (auto& v : rhs) v.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x[i];
        rhs[0][i] = q.Up[i] + (2.0 / 3.0) * x * q.U[i];
        rhs[1][i] = q.U[i];
        rhs[2][i] = x * x * q.U[i];
        rhs[3][i] = x * q.Up[i];
        rhs[4][i] = x * x * q.Upp[i];
    }
    for (int k = 0; k < 5; ++k) {
        ProjectedSolve s = solve_member(rhs[std::size_t(k)]);
        B.w[std::size_t(k)] = std::move(s.phi);
        B.wp[std::size_t(k)] = std::move(s.phi_p);
        B.wpp[std::size_t(k)] = std::move(s.phi_pp);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x[i];
        rhs[5][i] = B.wp[0][i];
        rhs[6][i] = x * B.w[0][i];
        rhs[7][i] = q.U[i] * sq(B.w[0][i]);
    }
    for (int k = 5; k < 8; ++k) {
        ProjectedSolve s = solve_member(rhs[std::size_t(k)]);
        B.w[std::size_t(k)] = std::move(s.phi);
        B.wp[std::size_t(k)] = std::move(s.phi_p);
        B.wpp[std::size_t(k)] = std::move(s.phi_pp);
    }
    return B;
}

}  // namespace gpcurve
