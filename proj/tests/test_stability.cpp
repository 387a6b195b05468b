#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gpcurve/stability.hpp"
#include "oracle_data.hpp"

using namespace gpcurve;

namespace {

Potential ring_pot() {
    PotentialSpec s;
    s.kind = "gaussian_ring";
    s.amplitude = 0.2;
    s.r0 = 6.0;
    s.width = 1.0;
    return make_potential(s);
}

Potential const_pot(double v) {
    PotentialSpec s;
    s.kind = "constant";
    s.value = v;
    return make_potential(s);
}

}  // namespace

TEST_CASE("stationarity residual on reference tubes") {
    // constant field on a circle: residual is (1 + W) / R everywhere
    const TubeGeometry flat = make_circle(2.0, const_pot(0.3), 0.05);
    const Vec r = stationarity_residual(flat);
    for (double v : r) CHECK(std::abs(v - 1.3 / 2.0) < 1e-12);

    // stationary ring: residual vanishes
    const TubeGeometry ring = make_circle(oracle::ring_Rstar, ring_pot(), 0.05);
    for (double v : stationarity_residual(ring)) CHECK(std::abs(v) < 1e-9);

    // residual / beta^2 is the curvature-balance expression
    const TubeGeometry off = make_tube_geometry(ClosedCurve::circle(6.0, 0.7, 0.2), ring_pot(), 0.05);
    const Vec ro = stationarity_residual(off);
    for (std::size_t i = 0; i < off.n_theta; ++i) {
        const double balance = off.kappa[i] + 1.5 * off.Wt[i] / (1.0 + off.W0[i]);
        CHECK(std::abs(ro[i] / sq(off.beta[i]) - balance) < 1e-12);
    }
}

TEST_CASE("jacobi spectrum of the bare circle") {
    const double R = 3.0;
    const TubeGeometry G = make_circle(R, const_pot(0.0), 0.05);
    const JacobiSpectrum sp = jacobi_spectrum(G, 10);
    REQUIRE(sp.Lambda.size() == 21);
    // expected: (2 - j^2) / R^2, each j >= 1 twice
    Vec expect;
    expect.push_back(2.0 / (R * R));
    for (int j = 1; j <= 10; ++j) {
        expect.push_back((2.0 - j * j) / (R * R));
        expect.push_back((2.0 - j * j) / (R * R));
    }
    std::sort(expect.begin(), expect.end(), std::greater<double>());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(sp.Lambda[i] - expect[i]) < 1e-6);
    CHECK(sp.residual_max < 1e-6);
}

TEST_CASE("jacobi spectrum of the stationary ring matches the frozen values") {
    const TubeGeometry G = make_circle(oracle::ring_Rstar, ring_pot(), 0.05);
    const double q = 1.5 * G.beta[0] * G.Wtt[0] + 0.75 * sq(G.Wt[0]) / G.beta[0];
    CHECK(std::abs(q - oracle::ring_q) < 1e-10);

    const JacobiSpectrum sp = jacobi_spectrum(G, 5);
    const double oracle_L[6] = {oracle::ring_Lambda0, oracle::ring_Lambda1, oracle::ring_Lambda2,
                                oracle::ring_Lambda3, oracle::ring_Lambda4, oracle::ring_Lambda5};
    Vec expect;
    expect.push_back(oracle_L[0]);
    for (int j = 1; j <= 5; ++j) {
        expect.push_back(oracle_L[j]);
        expect.push_back(oracle_L[j]);
    }
    std::sort(expect.begin(), expect.end(), std::greater<double>());
    REQUIRE(sp.Lambda.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(sp.Lambda[i] - expect[i]) < 1e-9);
    CHECK(std::abs(sp.d_epsilon - oracle::ring_gap) < 1e-9);
    CHECK(sp.residual_max < 1e-8);
}

TEST_CASE("jacobi eigenfunctions are beta-orthonormal and converged") {
    const TubeGeometry G = make_tube_geometry(ClosedCurve::circle(6.0, 0.6, -0.4), ring_pot(), 0.05);
    const JacobiSpectrum sp = jacobi_spectrum(G, 6);
    const double w = G.ell / double(G.n_theta);
    for (std::size_t m = 0; m < sp.modes.size(); ++m) {
        for (std::size_t l = m; l < sp.modes.size(); ++l) {
            cd acc(0.0, 0.0);
            for (std::size_t i = 0; i < G.n_theta; ++i)
                acc += G.beta[i] * sp.modes[m][i] * std::conj(sp.modes[l][i]) * w;
            if (m == l)
                CHECK(std::abs(acc.real() - 1.0) < 1e-9);
            else
                CHECK(std::abs(acc) < 1e-9);
        }
    }
    CHECK(sp.residual_max < 1e-6);

    const TubeGeometry G2 = make_tube_geometry(ClosedCurve::circle(6.0, 0.6, -0.4), ring_pot(), 0.05, 1024);
    const JacobiSpectrum sp2 = jacobi_spectrum(G2, 6);
    for (std::size_t i = 0; i < 10; ++i) {
        const double denom = std::max(1e-6, std::abs(sp.Lambda[i]));
        CHECK(std::abs(sp.Lambda[i] - sp2.Lambda[i]) / denom < 1e-4);
    }
}

TEST_CASE("degeneracy detection") {
    const TubeGeometry G = make_circle(3.0, const_pot(0.0), 0.05);
    const JacobiSpectrum sp = jacobi_spectrum(G, 4);
    CHECK_THROWS_AS(jacobi_spectrum(G, 4, sp.d_epsilon * 1.01), Degenerate);
}

TEST_CASE("wave number gap check") {
    const double lam = 3.0 / (4.0 * pi * pi);

    // frozen margins on the reference ring with the exact lowest eigenvalue
    struct Row {
        double eps, margin;
    };
    const Row rows[] = {{0.02, oracle::ring_b2margin_0_02},
                        {0.025, oracle::ring_b2margin_0_025},
                        {0.05, oracle::ring_b2margin_0_05},
                        {0.1, oracle::ring_b2margin_0_1}};
    for (const Row& row : rows) {
        const GapCheck g = check_gap_epsilon(row.eps, oracle::ring_ell_tilde, 3.0, 0.01);
        CHECK(std::abs(g.margin - row.margin) < 1e-12);
        CHECK(g.pass);
    }

    // exact resonance at j = 5
    const double r5 = std::sqrt(lam) / 5.0;
    const GapCheck bad = check_gap_epsilon(r5 * 10.0, 10.0, 3.0, 0.01);
    CHECK_FALSE(bad.pass);
    CHECK(bad.nearest_j == 5);
    CHECK(bad.margin < 1e-12);

    // supercritical ratio always passes
    const GapCheck ok = check_gap_epsilon((std::sqrt(lam) + 0.1) * 7.0, 7.0, 3.0, 0.01);
    CHECK(ok.pass);
    CHECK(ok.nearest_j == 1);

    // seeded trials agree with an independent exhaustive scan
    Rng rng(777u);
    for (int trial = 0; trial < 1000; ++trial) {
        const double eps = 0.002 + 0.2 * rng.uniform(0.0, 1.0);
        const double lt = 5.0 + 45.0 * rng.uniform(0.0, 1.0);
        const double c = 0.001 + 0.05 * rng.uniform(0.0, 1.0);
        const GapCheck g = check_gap_epsilon(eps, lt, 3.0, c);
        const double r = eps / lt;
        double margin = 1e300;
        long jbest = 0;
        for (long j = 1; j <= 10000; ++j) {
            const double m = std::abs(double(j) * double(j) * r * r - lam) / r;
            if (m < margin) {
                margin = m;
                jbest = j;
            }
        }
        REQUIRE(g.margin == margin);
        REQUIRE(g.nearest_j == jbest);
        REQUIRE(g.pass == (margin >= c));
    }
}

TEST_CASE("mass parameter gap check") {
    const double lam = 3.0 / (4.0 * pi * pi);
    const double rho0 = 4.0;

    // land exactly on the j = 7 window center
    const double a_bad = rho0 * 7.0 / std::sqrt(lam);
    const GapCheck bad = check_gap_a(a_bad, 0.01, rho0, lam);
    CHECK_FALSE(bad.pass);
    CHECK(bad.nearest_j == 7);

    Rng rng(778u);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = 1.0 + 400.0 * rng.uniform(0.0, 1.0);
        const double c = 0.001 + 0.05 * rng.uniform(0.0, 1.0);
        const GapCheck g = check_gap_a(a, c, rho0, lam);
        const double x = rho0 / a;
        double margin = 1e300;
        long jbest = 0;
        for (long j = 1; j <= 10000; ++j) {
            const double m = 0.5 * double(j) * double(j) * std::abs(x - std::sqrt(lam) / double(j));
            if (m < margin) {
                margin = m;
                jbest = j;
            }
        }
        REQUIRE(g.margin == margin);
        REQUIRE(g.nearest_j == jbest);
        REQUIRE(g.pass == (margin >= c));
    }

    CHECK_THROWS_AS(check_gap_a(-1.0, 0.01, rho0, lam), ConfigError);
    CHECK_THROWS_AS(check_gap_epsilon(0.05, 10.0, 3.0, -0.1), ConfigError);
}
