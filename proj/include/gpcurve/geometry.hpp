#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "gpcurve/config.hpp"
#include "gpcurve/errors.hpp"
#include "gpcurve/fourier.hpp"
#include "gpcurve/grid.hpp"
#include "gpcurve/io.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

// Ambient trap field. All families are radial about a center and return the
// composite quantity eps2W = ε²W, so a family is a fixed geometry for every ε.
struct Potential {
    PotentialSpec spec;
    CubicSpline sampled;  // for kind == sampled

    // value and radial derivatives d^k/dr^k (eps2W), k = 0..4
    std::array<double, 5> radial_derivs(double r) const {
        std::array<double, 5> g{0, 0, 0, 0, 0};
        if (spec.kind == "constant") {
            g[0] = spec.value;
        } else if (spec.kind == "gaussian_ring") {
            const double w = spec.width;
            const double u = (r - spec.r0) / w;
            const double e = spec.amplitude * std::exp(-u * u);
            g[0] = e;
            g[1] = -2.0 * u * e / w;
            g[2] = (4.0 * u * u - 2.0) * e / (w * w);
            g[3] = (-8.0 * cube(u) + 12.0 * u) * e / cube(w);
            g[4] = (16.0 * sq(sq(u)) - 48.0 * u * u + 12.0) * e / sq(sq(w));
        } else if (spec.kind == "radial_poly") {
            for (std::size_t k = 0; k < spec.coeffs.size(); ++k) {
                const double c = spec.coeffs[k];
                double fall = 1.0;
                for (int d = 0; d < 5; ++d) {
                    if (int(k) - d >= 0) {
                        g[std::size_t(d)] += c * fall * std::pow(r, double(int(k) - d));
                        fall *= double(int(k) - d);
                    }
                }
            }
        } else if (spec.kind == "sampled") {
            g[0] = sampled(r);
            const double h = 1e-3;
            g[1] = (sampled(r + h) - sampled(r - h)) / (2.0 * h);
            g[2] = (sampled(r + h) - 2.0 * g[0] + sampled(r - h)) / (h * h);
            g[3] = (sampled(r + 2 * h) - 2.0 * sampled(r + h) + 2.0 * sampled(r - h) - sampled(r - 2 * h)) /
                   (2.0 * cube(h));
            g[4] = (sampled(r + 2 * h) - 4.0 * sampled(r + h) + 6.0 * g[0] - 4.0 * sampled(r - h) +
                    sampled(r - 2 * h)) /
                   sq(sq(h));
        }
        return g;
    }

    double value_at(double x, double y) const {
        return radial_derivs(std::hypot(x - spec.cx, y - spec.cy))[0];
    }
};

inline Potential make_potential(const PotentialSpec& spec) {
    Potential p;
    p.spec = spec;
    if (spec.kind == "sampled") {
        const Json j = read_json_file(spec.file);
        if (!j.contains("r") || !j.contains("w")) throw ConfigError("sampled potential: file needs r and w arrays");
        Vec r, w;
        for (const auto& v : j.at("r")) r.push_back(v.get<double>());
        for (const auto& v : j.at("w")) w.push_back(v.get<double>());
        if (r.size() != w.size() || r.size() < 4) throw ConfigError("sampled potential: bad table");
        p.sampled = CubicSpline(std::move(r), std::move(w));
    }
    return p;
}

struct Point2 {
    double x = 0, y = 0;
};

// Closed planar curve in arclength parameterization, positively oriented,
// with the outer unit normal.
struct ClosedCurve {
    enum class Kind { Circle, Ellipse } kind = Kind::Circle;
    double R = 1.0, a = 1.0, b = 1.0, cx = 0.0, cy = 0.0;
    double length = 2.0 * pi;
    Vec phi_nodes, arc_nodes;  // ellipse: arclength accumulated over the angle table

    static ClosedCurve circle(double radius, double cx = 0.0, double cy = 0.0) {
        if (!(radius > 0.0)) throw ConfigError("circle: radius must be positive");
        ClosedCurve c;
        c.kind = Kind::Circle;
        c.R = radius;
        c.cx = cx;
        c.cy = cy;
        c.length = 2.0 * pi * radius;
        return c;
    }

    static ClosedCurve ellipse(double a, double b, double cx = 0.0, double cy = 0.0) {
        if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("ellipse: semi-axes must be positive");
        ClosedCurve c;
        c.kind = Kind::Ellipse;
        c.a = a;
        c.b = b;
        c.cx = cx;
        c.cy = cy;
        const std::size_t n = 32769;
        c.phi_nodes = linspace(0.0, 2.0 * pi, n);
        c.arc_nodes.assign(n, 0.0);
        const double h = c.phi_nodes[1] - c.phi_nodes[0];
        auto speed = [&](double phi) {
            return std::sqrt(sq(a * std::sin(phi)) + sq(b * std::cos(phi)));
        };
        for (std::size_t i = 1; i < n; ++i) {
            const double p0 = c.phi_nodes[i - 1];
            c.arc_nodes[i] = c.arc_nodes[i - 1] +
                             (h / 6.0) * (speed(p0) + 4.0 * speed(p0 + 0.5 * h) + speed(p0 + h));
        }
        c.length = c.arc_nodes[n - 1];
        return c;
    }

    double speed_phi(double phi) const { return std::sqrt(sq(a * std::sin(phi)) + sq(b * std::cos(phi))); }

    double phi_of_theta(double theta) const {
        theta = std::fmod(theta, length);
        if (theta < 0.0) theta += length;
        const std::size_t n = phi_nodes.size();
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (arc_nodes[mid] > theta ? hi : lo) = mid;
        }
        double phi = phi_nodes[lo] +
                     (phi_nodes[hi] - phi_nodes[lo]) * (theta - arc_nodes[lo]) /
                         std::max(arc_nodes[hi] - arc_nodes[lo], 1e-300);
        for (int it = 0; it < 4; ++it) {
            // arclength from the bracket node by a short Simpson rule
            const double p0 = phi_nodes[lo];
            const double d = phi - p0;
            double arc = arc_nodes[lo];
            const int sub = 8;
            const double hh = d / sub;
            for (int s = 0; s < sub; ++s)
                arc += (hh / 6.0) * (speed_phi(p0 + s * hh) + 4.0 * speed_phi(p0 + (s + 0.5) * hh) +
                                     speed_phi(p0 + (s + 1) * hh));
            phi -= (arc - theta) / speed_phi(phi);
        }
        return phi;
    }

    Point2 point(double theta) const {
        if (kind == Kind::Circle) {
            const double u = theta / R;
            return {cx + R * std::cos(u), cy + R * std::sin(u)};
        }
        const double phi = phi_of_theta(theta);
        return {cx + a * std::cos(phi), cy + b * std::sin(phi)};
    }

    Point2 tangent(double theta) const {
        if (kind == Kind::Circle) {
            const double u = theta / R;
            return {-std::sin(u), std::cos(u)};
        }
        const double phi = phi_of_theta(theta);
        const double s = speed_phi(phi);
        return {-a * std::sin(phi) / s, b * std::cos(phi) / s};
    }

    Point2 normal(double theta) const {
        const Point2 t = tangent(theta);
        return {t.y, -t.x};  // outward for positive orientation
    }

    double kappa(double theta) const {
        if (kind == Kind::Circle) return 1.0 / R;
        const double phi = phi_of_theta(theta);
        return a * b / cube(speed_phi(phi));
    }

    double kappa_prime(double theta) const {
        if (kind == Kind::Circle) return 0.0;
        const double phi = phi_of_theta(theta);
        const double s = speed_phi(phi);
        const double dkdphi = -3.0 * a * b * (a * a - b * b) * std::sin(phi) * std::cos(phi) / (s * s * sq(s) * s);
        return dkdphi / s;
    }
};

// Tube geometry: the curve, the potential traces along the normal, the weight
// beta with its angular derivatives, the weighted length, and the Liouville
// reparameterization. Immutable once built.
struct TubeGeometry {
    ClosedCurve curve;
    Potential pot;
    double epsilon = 0.05;
    double ell = 0.0, ell_tilde = 0.0;
    std::size_t n_theta = 512;
    Vec theta;                             // uniform arclength samples
    Vec px, py;                            // curve points at the samples
    Vec W0, Wt, Wtt, Wttt, Wtttt;          // composite eps2W traces at t = 0
    Vec beta, beta1, beta2, beta3;         // beta and theta-derivatives
    Vec kappa, kappap;
    TrigSeries beta_s, beta1_s, beta2_s, beta3_s, kappa_s, kappap_s;
    TrigSeries W0_s, Wt_s, Wtt_s, Wttt_s, Wtttt_s;
    double C0 = 0.0, M0 = 0.0;

    // derivatives of eps2W along the normal line through theta, orders 0..4,
    // evaluated at offset t
    std::array<double, 5> normal_derivs(double th, double t) const {
        const Point2 g = curve.point(th), nu = curve.normal(th);
        const double dx = g.x + t * nu.x - pot.spec.cx;
        const double dy = g.y + t * nu.y - pot.spec.cy;
        const double r = std::hypot(dx, dy);
        if (r < 1e-12) throw ConfigError("normal_derivs: normal line passes through the potential center");
        const double rp = (dx * nu.x + dy * nu.y) / r;
        const double rpp = (1.0 - rp * rp) / r;
        const double rppp = -3.0 * rp * rpp / r;
        const double rpppp = (-3.0 * rpp * rpp - 4.0 * rp * rppp) / r;
        const auto gd = pot.radial_derivs(r);
        std::array<double, 5> out;
        out[0] = gd[0];
        out[1] = gd[1] * rp;
        out[2] = gd[2] * rp * rp + gd[1] * rpp;
        out[3] = gd[3] * cube(rp) + 3.0 * gd[2] * rp * rpp + gd[1] * rppp;
        out[4] = gd[4] * sq(sq(rp)) + 6.0 * gd[3] * rp * rp * rpp + gd[2] * (3.0 * rpp * rpp + 4.0 * rp * rppp) +
                 gd[1] * rpppp;
        return out;
    }

    double eps2W_tube(double th, double t) const {
        const Point2 g = curve.point(th), nu = curve.normal(th);
        return pot.value_at(g.x + t * nu.x, g.y + t * nu.y);
    }

    double liouville(double th) const { return (2.0 * pi / ell_tilde) * beta_s.antiderivative(th); }

    double liouville_inverse(double tau) const {
        tau = std::fmod(tau, 2.0 * pi);
        if (tau < 0.0) tau += 2.0 * pi;
        double lo = 0.0, hi = ell;
        double th = tau * ell / (2.0 * pi);
        for (int it = 0; it < 100; ++it) {
            const double f = liouville(th) - tau;
            if (std::abs(f) < 1e-13) break;
            (f > 0.0 ? hi : lo) = th;
            const double step = f / ((2.0 * pi / ell_tilde) * beta_s(th));
            double next = th - step;
            if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
            th = next;
        }
        return th;
    }

    Point2 fermi_map(double t, double th) const {
        if (std::abs(t) >= M0) throw OutsideTube("fermi_map: |t| >= M0");
        const Point2 g = curve.point(th), nu = curve.normal(th);
        return {g.x + t * nu.x, g.y + t * nu.y};
    }

    std::pair<double, double> fermi_unmap(const Point2& p) const {
        // coarse scan for the nearest sample, then Newton on the projection
        double best = 1e300, th = 0.0;
        for (std::size_t i = 0; i < n_theta; ++i) {
            const double d2 = sq(p.x - px[i]) + sq(p.y - py[i]);
            if (d2 < best) {
                best = d2;
                th = theta[i];
            }
        }
        for (int it = 0; it < 60; ++it) {
            const Point2 g = curve.point(th), tg = curve.tangent(th), nu = curve.normal(th);
            const double rx = p.x - g.x, ry = p.y - g.y;
            const double f = rx * tg.x + ry * tg.y;
            const double tloc = rx * nu.x + ry * nu.y;
            const double fp = -(1.0 + curve.kappa(th) * tloc);
            const double step = f / fp;
            th -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(th))) break;
        }
        th = std::fmod(th, ell);
        if (th < 0.0) th += ell;
        const Point2 g = curve.point(th), nu = curve.normal(th);
        const double t = (p.x - g.x) * nu.x + (p.y - g.y) * nu.y;
        if (std::abs(t) >= M0) throw OutsideTube("fermi_unmap: point outside the tube");
        return {t, th};
    }
};

inline TubeGeometry make_tube_geometry(const ClosedCurve& curve, const Potential& pot, double epsilon,
                                       std::size_t n_theta = 512, std::optional<double> M0_user = {}) {
    if (!(epsilon > 0.0)) throw ConfigError("geometry: epsilon must be positive");
    if (n_theta < 16 || (n_theta & (n_theta - 1)) != 0) throw ConfigError("geometry: n_theta must be a power of two");
    TubeGeometry G;
    G.curve = curve;
    G.pot = pot;
    G.epsilon = epsilon;
    G.ell = curve.length;
    G.n_theta = n_theta;
    G.theta.resize(n_theta);
    G.px.resize(n_theta);
    G.py.resize(n_theta);
    G.W0.resize(n_theta);
    G.Wt.resize(n_theta);
    G.Wtt.resize(n_theta);
    G.Wttt.resize(n_theta);
    G.Wtttt.resize(n_theta);
    G.beta.resize(n_theta);
    G.kappa.resize(n_theta);
    G.kappap.resize(n_theta);
    double tangent_err = 0.0;
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double th = double(i) * G.ell / double(n_theta);
        G.theta[i] = th;
        const Point2 gp = curve.point(th);
        G.px[i] = gp.x;
        G.py[i] = gp.y;
        const auto d = G.normal_derivs(th, 0.0);
        G.W0[i] = d[0];
        G.Wt[i] = d[1];
        G.Wtt[i] = d[2];
        G.Wttt[i] = d[3];
        G.Wtttt[i] = d[4];
        if (G.W0[i] < -1e-12) throw ConfigError("geometry: potential negative on the curve");
        G.beta[i] = std::sqrt(std::max(1.0 + G.W0[i], 0.0));
        G.kappa[i] = curve.kappa(th);
        G.kappap[i] = curve.kappa_prime(th);
        const Point2 tg = curve.tangent(th);
        tangent_err = std::max(tangent_err, std::abs(std::hypot(tg.x, tg.y) - 1.0));
    }
    if (tangent_err > 1e-8) throw ConfigError("geometry: parameterization is not arclength");

    // angular derivatives of beta from the spectral derivatives of the trace
    const Vec g1 = spectral_derivative(G.W0, G.ell, 1);
    const Vec g2 = spectral_derivative(G.W0, G.ell, 2);
    const Vec g3 = spectral_derivative(G.W0, G.ell, 3);
    G.beta1.resize(n_theta);
    G.beta2.resize(n_theta);
    G.beta3.resize(n_theta);
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double b = G.beta[i];
        G.beta1[i] = g1[i] / (2.0 * b);
        G.beta2[i] = g2[i] / (2.0 * b) - sq(g1[i]) / (4.0 * cube(b));
        G.beta3[i] = g3[i] / (2.0 * b) - 0.75 * g1[i] * g2[i] / cube(b) + 0.375 * cube(g1[i]) / (sq(b) * cube(b));
    }

    auto mk = [&](const Vec& v) { return TrigSeries::from_samples(v, G.ell); };
    G.beta_s = mk(G.beta);
    G.beta1_s = mk(G.beta1);
    G.beta2_s = mk(G.beta2);
    G.beta3_s = mk(G.beta3);
    G.kappa_s = mk(G.kappa);
    G.kappap_s = mk(G.kappap);
    G.W0_s = mk(G.W0);
    G.Wt_s = mk(G.Wt);
    G.Wtt_s = mk(G.Wtt);
    G.Wttt_s = mk(G.Wttt);
    G.Wtttt_s = mk(G.Wtttt);

    G.ell_tilde = G.beta_s.c.empty() ? 0.0 : G.beta_s.c[0].real() * G.ell;

    double ksum = 0.0;
    for (std::size_t i = 0; i < n_theta; ++i) ksum += G.kappa[i];
    ksum *= G.ell / double(n_theta);
    if (std::abs(ksum - 2.0 * pi) > 1e-6) throw ConfigError("geometry: turning number is not one");

    G.C0 = 0.0;
    for (std::size_t i = 0; i < n_theta; ++i)
        G.C0 = std::max({G.C0, std::abs(G.kappa[i]), std::abs(G.kappap[i])});
    G.M0 = M0_user.value_or(0.5 / G.C0);
    if (!(G.C0 * G.M0 < 1.0)) throw ConfigError("geometry: C0 * M0 must be below one");
    return G;
}

inline TubeGeometry make_circle(double radius, const Potential& pot, double epsilon,
                                std::size_t n_theta = 512) {
    return make_tube_geometry(ClosedCurve::circle(radius), pot, epsilon, n_theta);
}

// Radius at which a circle about the potential center is stationary:
// root of (1 + g(r))/r + (3/2) g'(r) on the given bracket.
inline double stationary_circle_radius(const Potential& pot, double r_lo, double r_hi) {
    auto f = [&](double r) {
        const auto g = pot.radial_derivs(r);
        return (1.0 + g[0]) / r + 1.5 * g[1];
    };
    double flo = f(r_lo), fhi = f(r_hi);
    if (flo * fhi > 0.0) throw ConfigError("stationary_circle: bracket does not straddle a root");
    double lo = r_lo, hi = r_hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

inline TubeGeometry geometry_from_scenario(const Scenario& s) {
    const Potential pot = make_potential(s.potential);
    ClosedCurve curve;
    if (s.curve.kind == "circle") {
        curve = ClosedCurve::circle(s.curve.radius, s.curve.cx, s.curve.cy);
    } else if (s.curve.kind == "ellipse") {
        curve = ClosedCurve::ellipse(s.curve.a, s.curve.b, s.curve.cx, s.curve.cy);
    } else if (s.curve.kind == "stationary_circle") {
        const double R = stationary_circle_radius(pot, s.curve.r_lo, s.curve.r_hi);
        curve = ClosedCurve::circle(R, s.potential.cx, s.potential.cy);
    } else {
        throw ConfigError("unknown curve kind: " + s.curve.kind);
    }
    return make_tube_geometry(curve, pot, s.epsilon, s.n_theta, s.M0);
}

}  // namespace gpcurve
