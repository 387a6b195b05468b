#pragma once

// Concentrating ansatz along a closed curve and its error field on the
// rescaled strip. The ansatz is separable,
//
//     w2(x, tau) = sum_m c_m(tau) psi_m(x),
//
// built from the line soliton, its bound state and the eight correction
// members, so x-derivatives come from the stored member arrays (exact to
// solver precision) and tau-derivatives are spectral. The error operator is
// assembled in the exact curved form: curvature transport, metric bending
// terms with resummed rational tails, the potential jet remainder, and the
// stationarity defect. No order is truncated, which lets downstream checks
// compare against an independent evaluation of the ambient equation.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "gpcurve/errors.hpp"
#include "gpcurve/fourier.hpp"
#include "gpcurve/geometry.hpp"
#include "gpcurve/grid.hpp"
#include "gpcurve/profile.hpp"

namespace gpcurve {

// Graph and amplitude modulation sampled on the uniform tau grid, together
// with the weighted norms used by the solvability theory.
struct ModulationPair {
    Vec f;
    Vec e;
    double norm_star = 0.0;
    double norm_starstar = 0.0;
};

namespace detail {

inline void check_tau_samples(const Vec& v, const char* who) {
    const std::size_t n = v.size();
    if (n < 8 || (n & (n - 1)) != 0)
        throw ConfigError(std::string(who) + ": tau sample count must be a power of two >= 8");
}

inline Vec beta_on_tau_grid(const TubeGeometry& G, std::size_t n) {
    Vec b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = G.liouville_inverse(2.0 * pi * double(i) / double(n));
        b[i] = G.beta_s(th);
    }
    return b;
}

}  // namespace detail

// || beta f || + || beta f_tau || / lt + || beta f_tautau || / lt^2, L2 in tau.
inline double modulation_f_norm(const TubeGeometry& G, const Vec& f) {
    detail::check_tau_samples(f, "modulation_f_norm");
    const std::size_t n = f.size();
    const double dt = 2.0 * pi / double(n);
    const Vec b = detail::beta_on_tau_grid(G, n);
    const Vec f1 = spectral_derivative(f, 2.0 * pi, 1);
    const Vec f2 = spectral_derivative(f, 2.0 * pi, 2);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s0 += b[i] * b[i] * f[i] * f[i] * dt;
        s1 += b[i] * b[i] * f1[i] * f1[i] * dt;
        s2 += b[i] * b[i] * f2[i] * f2[i] * dt;
    }
    const double lt = G.ell_tilde;
    return std::sqrt(s0) + std::sqrt(s1) / lt + std::sqrt(s2) / (lt * lt);
}

// || e ||_inf + eps || e' || / lt + eps^2 || e'' || / lt^2.
inline double modulation_e_norm(const TubeGeometry& G, const Vec& e) {
    detail::check_tau_samples(e, "modulation_e_norm");
    const std::size_t n = e.size();
    const double dt = 2.0 * pi / double(n);
    const Vec e1 = spectral_derivative(e, 2.0 * pi, 1);
    const Vec e2 = spectral_derivative(e, 2.0 * pi, 2);
    double m0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m0 = std::max(m0, std::abs(e[i]));
        s1 += e1[i] * e1[i] * dt;
        s2 += e2[i] * e2[i] * dt;
    }
    const double r = G.epsilon / G.ell_tilde;
    return m0 + r * std::sqrt(s1) + r * r * std::sqrt(s2);
}

inline ModulationPair make_modulation(const TubeGeometry& G, Vec f, Vec e) {
    detail::check_tau_samples(f, "make_modulation");
    if (e.size() != f.size()) throw ConfigError("make_modulation: f and e need matching sample counts");
    ModulationPair m;
    m.f = std::move(f);
    m.e = std::move(e);
    m.norm_star = modulation_f_norm(G, m.f);
    m.norm_starstar = modulation_e_norm(G, m.e);
    return m;
}

inline ModulationPair zero_modulation(const TubeGeometry& G, std::size_t n_tau = 256) {
    return make_modulation(G, Vec(n_tau, 0.0), Vec(n_tau, 0.0));
}

// Field derivatives at one strip point, in strip coordinates.
struct PointDerivs {
    double w = 0.0, wx = 0.0, wxx = 0.0;
    double wt = 0.0, wtt = 0.0, wxt = 0.0;
};

// Frozen geometry, modulation and ambient-position data along one tau node.
struct StripRow {
    double tau = 0.0, theta = 0.0;
    double beta = 0.0, beta1 = 0.0, beta2 = 0.0;
    double kappa = 0.0, kappap = 0.0;
    double W0 = 0.0, Wt = 0.0, Wtt = 0.0, Wttt = 0.0;
    double f = 0.0, fp = 0.0, fpp = 0.0;
    double e = 0.0, ep = 0.0, epp = 0.0;
    double E = 0.0, Ep = 0.0, Epp = 0.0;  // e/beta and tau-derivatives
    double gx = 0.0, gy = 0.0;            // curve point
    double nux = 0.0, nuy = 0.0;          // outward normal
};

struct AnsatzField {
    static constexpr std::size_t n_members = 10;  // U, Z, and the eight corrections

    const TubeGeometry* geom = nullptr;
    const CorrectionBasis* basis = nullptr;
    double epsilon = 0.0;
    double lambda0 = 0.0;
    int level = 2;

    std::size_t n_tau = 0;
    Vec tau;
    std::vector<StripRow> row;
    ModulationPair mod;

    std::size_t jlo = 0;  // strip window start inside the basis grid
    Vec x, xw;            // strip nodes and Simpson weights
    Vec U_s, Up_s, Z_s;   // profile slices on the window

    std::array<Vec, n_members> c_core, c_first, c_second;  // layer coefficients
    std::array<Vec, n_members> c, ct, ctt;                 // assembled + spectral
    std::array<TrigSeries, n_members> c_series;
    std::array<CubicSpline, n_members> psi_spline;
    TrigSeries f_series;

    const SolitonProfile& prof() const { return basis->prof; }

    const double* psi(std::size_t m) const {
        if (m == 0) return prof().U.data();
        if (m == 1) return prof().Z.data();
        return basis->w[m - 2].data();
    }
    const double* psi_p(std::size_t m) const {
        if (m == 0) return prof().Up.data();
        if (m == 1) return prof().Zp.data();
        return basis->wp[m - 2].data();
    }
    const double* psi_pp(std::size_t m) const {
        if (m == 0) return prof().Upp.data();
        if (m == 1) return prof().Zpp.data();
        return basis->wpp[m - 2].data();
    }

    Vec slice(const Vec& wide) const {
        Vec out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = wide[jlo + j];
        return out;
    }

    // All strip derivatives at a grid node: member sums in x, spectral in tau.
    PointDerivs derivs_node(std::size_t i, std::size_t j) const {
        PointDerivs p;
        const std::size_t idx = jlo + j;
        for (std::size_t m = 0; m < n_members; ++m) {
            const double v = psi(m)[idx], v1 = psi_p(m)[idx], v2 = psi_pp(m)[idx];
            p.w += c[m][i] * v;
            p.wx += c[m][i] * v1;
            p.wxx += c[m][i] * v2;
            p.wt += ct[m][i] * v;
            p.wtt += ctt[m][i] * v;
            p.wxt += ct[m][i] * v1;
        }
        return p;
    }

    double w2_node(std::size_t i, std::size_t j) const {
        double s = 0.0;
        const std::size_t idx = jlo + j;
        for (std::size_t m = 0; m < n_members; ++m) s += c[m][i] * psi(m)[idx];
        return s;
    }

    // Single correction layer at a tau node: 0 core, 1 first, 2 second.
    double layer_node(int layer, std::size_t i, double xv) const {
        const std::array<Vec, n_members>* lc = layer == 0 ? &c_core : layer == 1 ? &c_first : &c_second;
        double s = 0.0;
        for (std::size_t m = 0; m < n_members; ++m)
            if (!(*lc)[m].empty() && (*lc)[m][i] != 0.0) s += (*lc)[m][i] * psi_spline[m](xv);
        return s;
    }

    double w2_at(double xv, double tauv) const {
        if (std::abs(xv) >= basis->grid.xmax) return 0.0;
        double s = 0.0;
        for (std::size_t m = 0; m < n_members; ++m) s += c_series[m](tauv) * psi_spline[m](xv);
        return s;
    }

    // Physical solution in tube coordinates: u = beta * w2(beta t/eps - f).
    double u_tube(double t, double theta) const {
        const TubeGeometry& G = *geom;
        if (std::abs(t) >= G.M0) throw OutsideTube("u_tube: normal offset outside the tube");
        const double tv = G.liouville(theta);
        const double b = G.beta_s(theta);
        const double xv = b * t / epsilon - f_series(tv);
        return b * w2_at(xv, tv);
    }
};

// Curved part of the error operator at one strip point: transport, bending,
// resummed metric tails, potential jet remainder and stationarity defect.
// The leading flat terms (A w_tt + w_xx - w + w^3) are added by the caller.
inline double curved_terms(const AnsatzField& F, std::size_t i, double xv, const PointDerivs& p) {
    const StripRow& r = F.row[i];
    const TubeGeometry& G = *F.geom;
    const double eps = F.epsilon;
    const double lt = G.ell_tilde;
    const double A = 4.0 * pi * pi / (lt * lt);
    const double TP = 2.0 * pi / lt;
    const double b = r.beta, b1 = r.beta1, b2 = r.beta2;
    const double k = r.kappa, kp = r.kappap;
    const double bb = b * b, b3 = bb * b, b4 = b3 * b, b5 = b4 * b;
    const double X = xv + r.f;
    const double t = eps * X / b;
    const double m = 1.0 + t * k;
    if (!(m > 0.0)) throw OutsideTube("error operator: degenerate tube metric");
    const double a3 = 1.0 / m;
    const double a2 = (-2.0 - t * k) / (m * m);
    const double a1 = 1.0 / (m * m * m);
    const double fp = r.fp, fpp = r.fpp;
    const double e2 = eps * eps, e3 = e2 * eps;

    double out = eps * (k / b) * (p.wx + (2.0 / 3.0) * X * p.w);

    out += e2 * A * (fp * fp * p.wxx - fpp * p.wx - 2.0 * fp * p.wxt);
    out += e2 * 3.0 * TP * (b1 / bb) * (-fp * p.wx + p.wt);
    out += e2 * 2.0 * TP * (b1 / bb) * X * (-fp * p.wxx + p.wxt);
    out += e2 * (b2 / b3 + 2.0 * b1 * b1 / b4 - k * k / bb) * X * p.wx;
    out += e2 * (b2 / b3) * p.w;
    out += e2 * (b1 * b1 / b4) * X * X * p.wxx;
    out -= 0.5 * e2 * (r.Wtt / b4) * X * X * p.w;

    out -= (e3 / 6.0) * (r.Wttt / b5) * X * X * X * p.w;
    out += e3 * k * k * k * a3 * (X * X / b3) * p.wx;
    {
        double grp = (b2 / b4) * X * p.w;
        grp += 2.0 * (b1 * b1 / b5) * X * X * p.wx;
        grp += 3.0 * TP * (b1 / b3) * X * (-fp * p.wx + p.wt);
        grp += 2.0 * TP * (b1 / b3) * X * X * (-fp * p.wxx + p.wxt);
        grp += (b1 * b1 / b5) * X * X * X * p.wxx;
        grp += (b2 / b4) * X * X * p.wx;
        grp += A * (X / b) * (fp * fp * p.wxx - fpp * p.wx + p.wtt - 2.0 * fp * p.wxt);
        out += e3 * k * a2 * grp;
    }
    {
        // conservative form of the angular part: the transported first
        // derivative enters with a minus sign
        double grp = (b1 / b4) * X * p.w;
        grp += (b1 / b4) * X * X * p.wx;
        grp += TP * (1.0 / bb) * X * (-fp * p.wx + p.wt);
        out -= e3 * kp * a1 * grp;
    }

    const double Wamb = G.pot.value_at(r.gx + t * r.nux, r.gy + t * r.nuy);
    const double jet = r.W0 + r.Wt * t + 0.5 * r.Wtt * t * t + r.Wttt * t * t * t / 6.0;
    out -= (Wamb - jet) * p.w / bb;

    out -= (eps * X / b3) * (r.Wt + (2.0 / 3.0) * k * (1.0 + r.W0)) * p.w;
    return out;
}

inline AnsatzField build_ansatz(const TubeGeometry& G, const SolitonProfile& prof,
                                const CorrectionBasis& basis, const ModulationPair& mod,
                                int level = 2, double x_window = 15.0,
                                std::optional<double> lambda0_override = {}) {
    if (level < 0 || level > 2) throw ConfigError("build_ansatz: level must be 0, 1 or 2");
    detail::check_tau_samples(mod.f, "build_ansatz");
    if (mod.e.size() != mod.f.size()) throw ConfigError("build_ansatz: f and e need matching sample counts");
    if (std::abs(basis.grid.h - prof.grid.h) > 1e-13)
        throw ConfigError("build_ansatz: profile and basis grids must share the spacing");

    AnsatzField F;
    F.geom = &G;
    F.basis = &basis;
    F.epsilon = G.epsilon;
    F.lambda0 = lambda0_override.value_or(prof.lambda0);
    F.level = level;
    F.n_tau = mod.f.size();
    F.mod = mod;

    const std::size_t n = F.n_tau;
    F.tau.resize(n);
    F.row.resize(n);
    const Vec f1 = spectral_derivative(mod.f, 2.0 * pi, 1);
    const Vec f2 = spectral_derivative(mod.f, 2.0 * pi, 2);
    const Vec e1 = spectral_derivative(mod.e, 2.0 * pi, 1);
    const Vec e2d = spectral_derivative(mod.e, 2.0 * pi, 2);

    double beta_min = 1e300, f_max = 0.0;
    Vec Ee(n);
    for (std::size_t i = 0; i < n; ++i) {
        StripRow& r = F.row[i];
        r.tau = 2.0 * pi * double(i) / double(n);
        F.tau[i] = r.tau;
        r.theta = i == 0 ? 0.0 : G.liouville_inverse(r.tau);
        r.beta = G.beta_s(r.theta);
        r.beta1 = G.beta1_s(r.theta);
        r.beta2 = G.beta2_s(r.theta);
        r.kappa = G.kappa_s(r.theta);
        r.kappap = G.kappap_s(r.theta);
        r.W0 = G.W0_s(r.theta);
        r.Wt = G.Wt_s(r.theta);
        r.Wtt = G.Wtt_s(r.theta);
        r.Wttt = G.Wttt_s(r.theta);
        r.f = mod.f[i];
        r.fp = f1[i];
        r.fpp = f2[i];
        r.e = mod.e[i];
        r.ep = e1[i];
        r.epp = e2d[i];
        const Point2 gp = G.curve.point(r.theta);
        const Point2 nu = G.curve.normal(r.theta);
        r.gx = gp.x;
        r.gy = gp.y;
        r.nux = nu.x;
        r.nuy = nu.y;
        Ee[i] = r.e / r.beta;
        beta_min = std::min(beta_min, r.beta);
        f_max = std::max(f_max, std::abs(r.f));
    }
    const Vec Ee1 = spectral_derivative(Ee, 2.0 * pi, 1);
    const Vec Ee2 = spectral_derivative(Ee, 2.0 * pi, 2);
    for (std::size_t i = 0; i < n; ++i) {
        F.row[i].E = Ee[i];
        F.row[i].Ep = Ee1[i];
        F.row[i].Epp = Ee2[i];
    }

    // strip window: stay inside both the basis grid and the tube
    const double budget = 0.9 * G.M0 * beta_min / G.epsilon - f_max;
    const double want = std::min({x_window, budget, basis.grid.xmax});
    if (!(want >= 5.0))
        throw ConfigError("build_ansatz: strip window collapsed; epsilon too large for this tube");
    const std::size_t center = basis.grid.n() / 2;
    const std::size_t j_half = std::min(center, std::size_t(std::floor(want / basis.grid.h + 1e-12)));
    F.jlo = center - j_half;
    const std::size_t nx = 2 * j_half + 1;
    F.x.resize(nx);
    for (std::size_t j = 0; j < nx; ++j) F.x[j] = basis.grid.x[F.jlo + j];
    F.xw = simpson_weights(nx, basis.grid.h);
    F.U_s = F.slice(basis.prof.U);
    F.Up_s = F.slice(basis.prof.Up);
    F.Z_s = F.slice(basis.prof.Z);

    const double eps = G.epsilon;
    for (std::size_t m = 0; m < AnsatzField::n_members; ++m) {
        F.c_core[m].assign(n, 0.0);
        F.c_first[m].assign(n, 0.0);
        F.c_second[m].assign(n, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const StripRow& r = F.row[i];
        const double b = r.beta, k = r.kappa;
        const double b1c = k / b;  // curvature-to-width ratio driving the first layer
        F.c_core[0][i] = 1.0;
        F.c_core[1][i] = eps * r.e / b;
        F.c_first[2][i] = b1c;
        F.c_first[3][i] = (2.0 / 3.0) * b1c * r.f;
        F.c_second[3][i] = r.beta2 / (b * b * b);
        F.c_second[4][i] = -0.5 * r.Wtt / std::pow(b, 4);
        F.c_second[5][i] = 2.0 * r.beta1 * r.beta1 / std::pow(b, 4) + r.beta2 / (b * b * b) - k * k / (b * b);
        F.c_second[6][i] = r.beta1 * r.beta1 / std::pow(b, 4);
        F.c_second[7][i] = b1c * b1c;
        F.c_second[8][i] = (2.0 / 3.0) * b1c * b1c;
        F.c_second[9][i] = 3.0 * b1c * b1c;
    }
    for (std::size_t m = 0; m < AnsatzField::n_members; ++m) {
        F.c[m].assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double v = F.c_core[m][i];
            if (level >= 1) v += eps * F.c_first[m][i];
            if (level >= 2) v += eps * eps * F.c_second[m][i];
            F.c[m][i] = v;
        }
        F.ct[m] = spectral_derivative(F.c[m], 2.0 * pi, 1);
        F.ctt[m] = spectral_derivative(F.c[m], 2.0 * pi, 2);
        F.c_series[m] = TrigSeries::from_samples(F.c[m], 2.0 * pi);
        F.psi_spline[m] = CubicSpline(basis.grid.x, Vec(F.psi(m), F.psi(m) + basis.grid.n()));
    }
    F.f_series = TrigSeries::from_samples(mod.f, 2.0 * pi);

    // the whole window must stay strictly inside the tube
    for (std::size_t i = 0; i < n; ++i) {
        const StripRow& r = F.row[i];
        const double reach = eps * (F.x.back() + std::abs(r.f)) / r.beta;
        if (reach >= G.M0) throw OutsideTube("build_ansatz: strip window leaves the tube");
    }
    return F;
}

struct ErrorField {
    Vec x, xw, tau;
    std::vector<Vec> S, E11, E12;
    Vec c, d;  // filled by project_error
    double sup_S = 0.0;
    double l2_beta_E11 = 0.0;
};

inline ErrorField evaluate_error(const AnsatzField& F) {
    const std::size_t n = F.n_tau, nx = F.x.size();
    ErrorField E;
    E.x = F.x;
    E.xw = F.xw;
    E.tau = F.tau;
    E.S.assign(n, Vec(nx, 0.0));
    E.E11.assign(n, Vec(nx, 0.0));
    E.E12.assign(n, Vec(nx, 0.0));
    const double eps = F.epsilon;
    const double lt = F.geom->ell_tilde;
    const double A = 4.0 * pi * pi / (lt * lt);
    const double dtau = 2.0 * pi / double(n);
    double l2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const StripRow& r = F.row[i];
        const double split = (eps * eps * eps * A * r.epp + eps * F.lambda0 * r.e) / r.beta;
        for (std::size_t j = 0; j < nx; ++j) {
            const PointDerivs p = F.derivs_node(i, j);
            double s = eps * eps * A * p.wtt + p.wxx - p.w + p.w * p.w * p.w;
            s += curved_terms(F, i, F.x[j], p);
            const double s12 = split * F.Z_s[j];
            E.S[i][j] = s;
            E.E12[i][j] = s12;
            E.E11[i][j] = s - s12;
            E.sup_S = std::max(E.sup_S, std::abs(s));
            l2 += F.xw[j] * r.beta * r.beta * E.E11[i][j] * E.E11[i][j];
        }
    }
    E.l2_beta_E11 = std::sqrt(l2 * dtau);
    return E;
}

struct ErrorProjection {
    Vec c, d;              // quadrature projections of S onto U' and Z
    Vec c_model, d_model;  // leading analytic forms for a full-depth field
};

inline ErrorProjection project_error(ErrorField& err, const AnsatzField& F) {
    const std::size_t n = F.n_tau, nx = F.x.size();
    ErrorProjection P;
    P.c.assign(n, 0.0);
    P.d.assign(n, 0.0);
    P.c_model.assign(n, 0.0);
    P.d_model.assign(n, 0.0);
    const ConstantsTable& K = F.prof().constants;
    const double eps = F.epsilon;
    const double lt = F.geom->ell_tilde;
    const double A = 4.0 * pi * pi / (lt * lt);
    const double TP = 2.0 * pi / lt;
    for (std::size_t i = 0; i < n; ++i) {
        double pc = 0.0, pd = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            pc += err.xw[j] * err.S[i][j] * F.Up_s[j];
            pd += err.xw[j] * err.S[i][j] * F.Z_s[j];
        }
        P.c[i] = pc;
        P.d[i] = pd;
        const StripRow& r = F.row[i];
        const double b = r.beta;
        const double lhs_f = -A * r.fpp - 2.0 * TP * (r.beta1 / (b * b)) * r.fp +
                             (r.beta1 * r.beta1 / std::pow(b, 4) + r.beta2 / (b * b * b) -
                              (5.0 / 3.0) * r.kappa * r.kappa / (b * b) +
                              1.5 * r.Wtt / std::pow(b, 4)) *
                                 r.f;
        P.c_model[i] = eps * eps * K.rho1 * lhs_f +
                       eps * eps * (r.kappa / b) * (K.d1 + K.d2) * r.e / b;
        P.d_model[i] = (eps * eps * eps * A * r.epp + eps * F.lambda0 * r.e) / b;
    }
    err.c = P.c;
    err.d = P.d;
    return P;
}

// Leading error catalog on the strip, collected by order and parity. Entry k
// returns the k-th term without its epsilon prefactor; the prefactors are
// eps, eps, eps^2, eps^2, eps^3, eps^3, eps^3, eps^3. Odd entries are odd in
// x, even entries even. Amplitude-linear angular couplings use the exact
// derivative of e/beta.
inline Vec analytic_error_term(const AnsatzField& F, int k, std::size_t i) {
    const std::size_t nx = F.x.size();
    Vec out(nx, 0.0);
    const StripRow& r = F.row[i];
    const TubeGeometry& G = *F.geom;
    const double lt = G.ell_tilde;
    const double A = 4.0 * pi * pi / (lt * lt);
    const double TP = 2.0 * pi / lt;
    const double b = r.beta, b1 = r.beta1, b2 = r.beta2;
    const double kk = r.kappa, kp = r.kappap;
    const double bb = b * b, b3 = bb * b, b4 = b3 * b, b5 = b4 * b;
    const double f = r.f, fp = r.fp, fpp = r.fpp;
    const double E = r.E, Ep = r.Ep;
    const SolitonProfile& pr = F.prof();
    for (std::size_t j = 0; j < nx; ++j) {
        const std::size_t idx = F.jlo + j;
        const double xv = F.x[j];
        const double U = pr.U[idx], Up = pr.Up[idx], Upp = pr.Upp[idx];
        const double Z = pr.Z[idx], Zp = pr.Zp[idx], Zpp = pr.Zpp[idx];
        double v = 0.0;
        switch (k) {
            case 1:
                v = (kk / b) * (Up + (2.0 / 3.0) * xv * U);
                break;
            case 2:
                v = (2.0 / 3.0) * (kk / b) * f * U;
                break;
            case 3:
                v = (kk / bb) * (r.e * Zp + (2.0 / 3.0) * r.e * xv * Z) - (r.Wtt / b4) * f * xv * U +
                    (2.0 * f * b1 * b1 / b4 - 2.0 * TP * (b1 / bb) * fp) * xv * Upp +
                    (-A * fpp - 3.0 * TP * (b1 / bb) * fp +
                     (2.0 * b1 * b1 / b4 + b2 / b3 - kk * kk / bb) * f) *
                        Up;
                break;
            case 4:
                v = (-0.5 * (r.Wtt / b4) * f * f + b2 / b3) * U +
                    (A * fp * fp - 2.0 * TP * (b1 / bb) * f * fp + (b1 * b1 / b4) * f * f) * Upp -
                    0.5 * (r.Wtt / b4) * xv * xv * U +
                    (2.0 * b1 * b1 / b4 + b2 / b3 - kk * kk / bb) * xv * Up +
                    (b1 * b1 / b4) * xv * xv * Upp + (2.0 / 3.0) * (kk / bb) * f * r.e * Z +
                    (3.0 / bb) * r.e * r.e * U * Z * Z;
                break;
            case 5:
                v = -(r.Wttt / (6.0 * b5)) * xv * xv * xv * U +
                    (-0.5 * (r.Wttt / b5) * f * f - 2.0 * kk * b2 / b4 - kp * b1 / b4) * xv * U +
                    (kk * kk * kk / b3 - 4.0 * kk * b1 * b1 / b5 - 2.0 * kk * b2 / b4 -
                     kp * b1 / b4) *
                        xv * xv * Up +
                    (kk * kk * kk * f * f / b3 - 4.0 * kk * b1 * b1 * f * f / b5 -
                     2.0 * kk * b2 * f * f / b4 + 2.0 * A * (kk / b) * fpp * f +
                     6.0 * TP * (kk * b1 / b3) * fp * f - kp * b1 * f * f / b4 +
                     TP * (kp / bb) * fp * f) *
                        Up -
                    2.0 * (kk * b1 * b1 / b5) * xv * xv * xv * Upp +
                    (-6.0 * kk * b1 * b1 * f * f / b5 + 8.0 * TP * (kk * b1 / b3) * fp * f -
                     2.0 * A * (kk / b) * fp * fp) *
                        xv * Upp;
                break;
            case 6:
                v = -0.5 * (r.Wttt / b5) * f * xv * xv * U +
                    (-(r.Wttt / (6.0 * b5)) * f * f * f - 2.0 * kk * b2 * f / b4 -
                     kp * b1 * f / b4) *
                        U +
                    (2.0 * kk * kk * kk * f / b3 - 8.0 * kk * b1 * b1 * f / b5 -
                     4.0 * kk * b2 * f / b4 + 2.0 * A * (kk / b) * fpp +
                     6.0 * TP * (kk * b1 / b3) * fp - 2.0 * kp * b1 * f / b4 +
                     TP * (kp / bb) * fp) *
                        xv * Up +
                    (-6.0 * kk * b1 * b1 * f / b5 + 4.0 * TP * (kk * b1 / b3) * fp) * xv * xv * Upp +
                    (-2.0 * kk * b1 * b1 * f * f * f / b5 +
                     4.0 * TP * (kk * b1 / b3) * fp * f * f -
                     2.0 * A * (kk / b) * fp * fp * f) *
                        Upp;
                break;
            case 7:
                v = ((b2 / b3 + 2.0 * b1 * b1 / b4 - kk * kk / bb) * f - A * fpp -
                     3.0 * TP * (b1 / bb) * fp) *
                        E * Zp +
                    (-2.0 * A * fp + 2.0 * TP * (b1 / bb) * f) * Ep * Zp +
                    (2.0 * (b1 * b1 / b4) * f - 2.0 * TP * (b1 / bb) * fp) * E * xv * Zpp -
                    (r.Wtt / b4) * f * E * xv * Z;
                break;
            case 8:
                v = (b2 / b3) * E * Z + 3.0 * TP * (b1 / bb) * Ep * Z +
                    (b2 / b3 + 2.0 * b1 * b1 / b4 - kk * kk / bb) * E * xv * Zp +
                    2.0 * TP * (b1 / bb) * Ep * xv * Zp + (b1 * b1 / b4) * E * xv * xv * Zpp +
                    (A * fp * fp - 2.0 * TP * (b1 / bb) * f * fp + (b1 * b1 / b4) * f * f) * E *
                        Zpp -
                    0.5 * (r.Wtt / b4) * E * xv * xv * Z - 0.5 * (r.Wtt / b4) * f * f * E * Z +
                    E * E * E * Z * Z * Z;
                break;
            default:
                throw ConfigError("analytic_error_term: k must lie in 1..8");
        }
        out[j] = v;
    }
    return out;
}

}  // namespace gpcurve
