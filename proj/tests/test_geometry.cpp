#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gpcurve/geometry.hpp"
#include "oracle_data.hpp"

using namespace gpcurve;

namespace {

PotentialSpec ring_spec() {
    PotentialSpec s;
    s.kind = "gaussian_ring";
    s.amplitude = 0.2;
    s.r0 = 6.0;
    s.width = 1.0;
    return s;
}

PotentialSpec zero_spec() {
    PotentialSpec s;
    s.kind = "constant";
    s.value = 0.0;
    return s;
}

}  // namespace

TEST_CASE("potential families and radial derivatives") {
    const Potential ring = make_potential(ring_spec());
    PotentialSpec ps;
    ps.kind = "radial_poly";
    ps.coeffs = {0.3, 0.0, 0.01, -0.002, 0.0001};
    const Potential poly = make_potential(ps);

    for (const Potential& p : {ring, poly}) {
        for (double r : {2.5, 4.0, 6.3, 7.1}) {
            const auto g = p.radial_derivs(r);
            auto at = [&](double rr) { return p.radial_derivs(rr)[0]; };
            const double h = 1e-4, h3 = 5e-3, h4 = 1e-2;
            const double fd1 = (at(r + h) - at(r - h)) / (2.0 * h);
            const double fd2 = (at(r + h) - 2.0 * g[0] + at(r - h)) / (h * h);
            const double fd3 =
                (at(r + 2 * h3) - 2.0 * at(r + h3) + 2.0 * at(r - h3) - at(r - 2 * h3)) / (2.0 * cube(h3));
            const double fd4 = (at(r + 2 * h4) - 4.0 * at(r + h4) + 6.0 * g[0] - 4.0 * at(r - h4) +
                                at(r - 2 * h4)) /
                               sq(sq(h4));
            CHECK(std::abs(g[1] - fd1) < 1e-6);
            CHECK(std::abs(g[2] - fd2) < 1e-5);
            CHECK(std::abs(g[3] - fd3) < 1e-3);
            CHECK(std::abs(g[4] - fd4) < 1e-2);
        }
    }
    const auto gz = make_potential(zero_spec()).radial_derivs(3.0);
    for (double v : gz) CHECK(v == 0.0);
}

TEST_CASE("closed curves carry an arclength frame") {
    const ClosedCurve circ = ClosedCurve::circle(2.5, 0.4, -0.3);
    const ClosedCurve ell = ClosedCurve::ellipse(3.0, 2.0);
    CHECK(std::abs(circ.length - 5.0 * pi) < 1e-12);

    for (const ClosedCurve& c : {circ, ell}) {
        const std::size_t n = 700;
        double kint = 0.0, tangent_err = 0.0, frame_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double th = double(i) * c.length / double(n);
            kint += c.kappa(th);
            const Point2 t = c.tangent(th), nu = c.normal(th);
            tangent_err = std::max(tangent_err, std::abs(std::hypot(t.x, t.y) - 1.0));
            frame_err = std::max(frame_err, std::abs(t.x * nu.x + t.y * nu.y));
            // tangent is the arclength derivative of the position
            const double h = 1e-6 * c.length;
            const Point2 pp = c.point(th + h), pm = c.point(th - h);
            tangent_err = std::max(tangent_err, std::abs((pp.x - pm.x) / (2 * h) - t.x));
            tangent_err = std::max(tangent_err, std::abs((pp.y - pm.y) / (2 * h) - t.y));
        }
        kint *= c.length / double(n);
        CHECK(std::abs(kint - 2.0 * pi) < 1e-6);
        CHECK(tangent_err < 1e-6);
        CHECK(frame_err < 1e-12);
    }

    // ellipse curvature against the closed form at the axes endpoints
    CHECK(std::abs(ell.kappa(0.0) - 3.0 / 4.0) < 1e-9);
    // kappa' consistency with finite differences
    for (double th : {0.7, 2.2, 4.9}) {
        const double h = 1e-5;
        const double fd = (ell.kappa(th + h) - ell.kappa(th - h)) / (2 * h);
        CHECK(std::abs(ell.kappa_prime(th) - fd) < 1e-6);
    }
    CHECK((ClosedCurve::circle(1.0).normal(0.0).x) == Catch::Approx(1.0));
}

TEST_CASE("tube geometry fields and the weighted length") {
    const Potential pot = make_potential(ring_spec());
    const TubeGeometry G = make_circle(oracle::ring_Rstar, pot, 0.05);

    CHECK(G.ell == Catch::Approx(2.0 * pi * oracle::ring_Rstar).epsilon(1e-14));
    CHECK(std::abs(G.beta[0] - oracle::ring_beta) < 1e-12);
    CHECK(std::abs(G.ell_tilde - oracle::ring_ell_tilde) < 1e-10);
    for (std::size_t i = 0; i < G.n_theta; ++i) {
        CHECK(G.beta[i] >= 1.0);
        CHECK(std::abs(G.beta[i] - G.beta[0]) < 1e-13);
        CHECK(std::abs(G.Wt[i] - G.Wt[0]) < 1e-13);
    }

    // normal-line trace derivatives against finite differences of the ambient field
    for (double th : {0.0, 1.3, 20.0}) {
        for (double t : {0.0, 0.11, -0.2}) {
            const auto d = G.normal_derivs(th, t);
            auto f = [&](double tt) { return G.eps2W_tube(th, tt); };
            const double h = 1e-4, h3 = 5e-3, h4 = 1e-2;
            CHECK(std::abs(d[0] - f(t)) < 1e-14);
            CHECK(std::abs(d[1] - (f(t + h) - f(t - h)) / (2 * h)) < 1e-6);
            CHECK(std::abs(d[2] - (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)) < 1e-5);
            CHECK(std::abs(d[3] - (f(t + 2 * h3) - 2 * f(t + h3) + 2 * f(t - h3) - f(t - 2 * h3)) /
                                      (2 * cube(h3))) < 1e-3);
            CHECK(std::abs(d[4] - (f(t + 2 * h4) - 4 * f(t + h4) + 6 * f(t) - 4 * f(t - h4) + f(t - 2 * h4)) /
                                      sq(sq(h4))) < 1e-2);
        }
    }
}

TEST_CASE("beta derivatives match finite differences on a varying tube") {
    // off-center circle in the ring potential, so the trace varies with theta
    const Potential pot = make_potential(ring_spec());
    const TubeGeometry G =
        make_tube_geometry(ClosedCurve::circle(6.0, 0.8, -0.5), pot, 0.05);
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, etau = 0.0;
    const double h = 1e-4, h3 = 2e-3;
    for (std::size_t i = 0; i < G.n_theta; i += 7) {
        const double th = G.theta[i];
        const double bp = (G.beta_s(th + h) - G.beta_s(th - h)) / (2 * h);
        const double bpp = (G.beta_s(th + h) - 2.0 * G.beta[i] + G.beta_s(th - h)) / (h * h);
        const double bppp =
            (G.beta_s(th + 2 * h3) - 2.0 * G.beta_s(th + h3) + 2.0 * G.beta_s(th - h3) - G.beta_s(th - 2 * h3)) /
            (2.0 * cube(h3));
        e1 = std::max(e1, std::abs(G.beta1[i] - bp));
        e2 = std::max(e2, std::abs(G.beta2[i] - bpp));
        e3 = std::max(e3, std::abs(G.beta3[i] - bppp));
        const double taup = (G.liouville(th + h) - G.liouville(th - h)) / (2 * h);
        etau = std::max(etau, std::abs(taup - 2.0 * pi * G.beta[i] / G.ell_tilde));
    }
    CHECK(e1 < 1e-6);
    CHECK(e2 < 1e-5);
    CHECK(e3 < 1e-4);
    CHECK(etau < 1e-6);
}

TEST_CASE("liouville map and its inverse") {
    const Potential zero = make_potential(zero_spec());
    const TubeGeometry flat = make_circle(3.0, zero, 0.05);
    CHECK(flat.liouville(0.0) == 0.0);
    CHECK(std::abs(flat.liouville(flat.ell) - 2.0 * pi) < 1e-13);
    for (double th : {0.1, 1.0, 2.7, 9.4}) {
        CHECK(std::abs(flat.liouville(th) - th / 3.0) < 1e-12);
    }

    const Potential pot = make_potential(ring_spec());
    const TubeGeometry G =
        make_tube_geometry(ClosedCurve::ellipse(7.0, 6.2), pot, 0.05);
    CHECK(G.liouville(0.0) == 0.0);
    CHECK(std::abs(G.liouville(G.ell) - 2.0 * pi) < 1e-12);
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double tau = G.liouville(double(i) * G.ell / 200.0);
        CHECK(tau > prev);
        prev = tau;
    }
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double tau = 2.0 * pi * double(i) / 100.0;
        worst = std::max(worst, std::abs(G.liouville(G.liouville_inverse(tau)) - tau));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("fermi coordinates round trip") {
    const Potential pot = make_potential(ring_spec());
    const TubeGeometry circ = make_circle(6.0, pot, 0.05);
    const TubeGeometry ell =
        make_tube_geometry(ClosedCurve::ellipse(6.5, 5.8), pot, 0.05);

    Rng rng(20260823u);
    for (const TubeGeometry* Gp : {&circ, &ell}) {
        const TubeGeometry& G = *Gp;
        double terr = 0.0, therr = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const double t = (2.0 * rng.uniform(0.0, 1.0) - 1.0) * 0.9 * G.M0;
            const double th = rng.uniform(0.0, 1.0) * G.ell;
            const Point2 p = G.fermi_map(t, th);
            const auto [t2, th2] = G.fermi_unmap(p);
            terr = std::max(terr, std::abs(t2 - t));
            double dth = std::fmod(std::abs(th2 - th), G.ell);
            dth = std::min(dth, G.ell - dth);
            therr = std::max(therr, dth);
        }
        CHECK(terr < 1e-10);
        CHECK(therr < 1e-10);
    }

    // on the circle the normal offset is the radial distance
    for (int trial = 0; trial < 100; ++trial) {
        const double t = (2.0 * rng.uniform(0.0, 1.0) - 1.0) * 0.9 * circ.M0;
        const double th = rng.uniform(0.0, 1.0) * circ.ell;
        const Point2 p = circ.fermi_map(t, th);
        CHECK(std::abs((std::hypot(p.x, p.y) - 6.0) - t) < 1e-10);
    }

    CHECK_THROWS_AS(circ.fermi_map(circ.M0 * 1.01, 1.0), OutsideTube);
    CHECK_THROWS_AS(circ.fermi_unmap({6.0 + circ.M0 * 1.5, 0.0}), OutsideTube);
    CHECK(circ.M0 == Catch::Approx(3.0));  // C0 = 1/R, default M0 = R/2
}

TEST_CASE("fermi laplacian agrees with the ambient laplacian on a circle") {
    const Potential zero = make_potential(zero_spec());
    const TubeGeometry G = make_circle(2.0, zero, 0.05);
    auto F = [](double x, double y) { return std::sin(0.7 * x) * std::cos(0.9 * y); };
    auto lapF = [&](double x, double y) { return -(0.49 + 0.81) * F(x, y); };
    auto Ft = [&](double t, double th) {
        const Point2 p = G.fermi_map(t, th);
        return F(p.x, p.y);
    };
    auto fermi_lap = [&](double t, double th, double h) {
        const double kap = G.curve.kappa(th);
        const double m = 1.0 + kap * t;
        const double ftt = (Ft(t + h, th) - 2.0 * Ft(t, th) + Ft(t - h, th)) / (h * h);
        const double ft = (Ft(t + h, th) - Ft(t - h, th)) / (2 * h);
        const double fthth = (Ft(t, th + h) - 2.0 * Ft(t, th) + Ft(t, th - h)) / (h * h);
        return ftt + kap / m * ft + fthth / (m * m);
    };
    for (double t : {0.2, -0.35}) {
        for (double th : {0.3, 2.0, 7.0}) {
            const Point2 p = G.fermi_map(t, th);
            const double exact = lapF(p.x, p.y);
            const double e1 = std::abs(fermi_lap(t, th, 2e-3) - exact);
            const double e2 = std::abs(fermi_lap(t, th, 1e-3) - exact);
            CHECK(e1 < 1e-4);
            CHECK(e2 < 0.3 * e1 + 1e-10);  // second order in h
        }
    }
}

TEST_CASE("stationary circle radius in the ring trap") {
    const Potential pot = make_potential(ring_spec());
    const double R = stationary_circle_radius(pot, 6.5, 9.0);
    CHECK(std::abs(R - oracle::ring_Rstar) < 1e-10);
    const auto g = pot.radial_derivs(R);
    CHECK(std::abs((1.0 + g[0]) / R + 1.5 * g[1]) < 1e-12);
    CHECK_THROWS_AS(stationary_circle_radius(pot, 8.5, 9.0), ConfigError);
}

TEST_CASE("geometry rejects bad input") {
    const Potential pot = make_potential(ring_spec());
    CHECK_THROWS_AS(make_circle(-1.0, pot, 0.05), ConfigError);
    CHECK_THROWS_AS(make_circle(6.0, pot, 0.05, 100), ConfigError);  // not a power of two
    PotentialSpec neg;
    neg.kind = "constant";
    neg.value = -0.5;
    CHECK_THROWS_AS(make_circle(6.0, make_potential(neg), 0.05), ConfigError);
}

TEST_CASE("geometry built from a scenario") {
    Scenario s;
    s.curve.kind = "stationary_circle";
    s.curve.r_lo = 6.5;
    s.curve.r_hi = 9.0;
    s.potential = ring_spec();
    s.epsilon = 0.05;
    const TubeGeometry G = geometry_from_scenario(s);
    CHECK(std::abs(G.curve.R - oracle::ring_Rstar) < 1e-10);
    CHECK(std::abs(G.beta[0] - oracle::ring_beta) < 1e-12);
}
