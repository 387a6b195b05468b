#pragma once

#include <optional>
#include <string>

#include "gpcurve/errors.hpp"
#include "gpcurve/io.hpp"

namespace gpcurve {

// Potential families. All fields describe the composite quantity eps2W = ε²W
// directly, so a scenario's geometry does not move when ε is swept.
struct PotentialSpec {
    std::string kind = "constant";  // constant | gaussian_ring | radial_poly | sampled
    double value = 0.0;             // constant
    double amplitude = 0.0;         // gaussian_ring: eps2W = A exp(-((r-r0)/w)^2)
    double r0 = 0.0;
    double width = 1.0;
    Vec coeffs;                     // radial_poly: eps2W = sum_k coeffs[k] r^k
    std::string file;               // sampled: CSV of (r, eps2W)
    double cx = 0.0, cy = 0.0;      // center of radial symmetry
};

struct CurveSpec {
    std::string kind = "circle";  // circle | ellipse | stationary_circle
    double radius = 1.0;
    double a = 1.0, b = 1.0;  // ellipse semi-axes
    double r_lo = 0.0, r_hi = 0.0;  // bracket for the stationary-radius root
    double cx = 0.0, cy = 0.0;
};

struct ProfileParams {
    double x_max = 20.0;
    std::size_t n = 8001;
    double newton_tol = 1e-12;
};

struct StripParams {
    double x_window = 15.0;
    std::size_t n_tau = 256;
    double picard_tol = 1e-11;
    int max_iter = 60;
};

struct ReducedParams {
    double tol = 1e-11;
    int max_iter = 80;
    bool measured_remainders = true;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1234567;
    double epsilon = 0.05;
    CurveSpec curve;
    PotentialSpec potential;
    double alpha = 0.2;
    double varrho = 0.7;
    double C2_hat = 1.0;
    double gap_c = 0.01;
    std::optional<double> M0;
    std::optional<double> lambda0_override;
    ProfileParams profile;
    StripParams strip;
    ReducedParams reduced;
    std::size_t n_theta = 512;
};

inline PotentialSpec parse_potential(const Json& j) {
    PotentialSpec p;
    if (!j.is_object()) throw ConfigError("potential: must be an object");
    p.kind = j.value("kind", std::string("constant"));
    if (p.kind == "constant") {
        p.value = j.value("value", 0.0);
    } else if (p.kind == "gaussian_ring") {
        if (!j.contains("amplitude") || !j.contains("r0")) throw ConfigError("gaussian_ring: needs amplitude and r0");
        p.amplitude = j.at("amplitude").get<double>();
        p.r0 = j.at("r0").get<double>();
        p.width = j.value("width", 1.0);
        if (!(p.width > 0.0)) throw ConfigError("gaussian_ring: width must be positive");
    } else if (p.kind == "radial_poly") {
        if (!j.contains("coeffs") || !j.at("coeffs").is_array()) throw ConfigError("radial_poly: needs coeffs array");
        for (const auto& c : j.at("coeffs")) p.coeffs.push_back(c.get<double>());
    } else if (p.kind == "sampled") {
        if (!j.contains("file")) throw ConfigError("sampled potential: needs file");
        p.file = j.at("file").get<std::string>();
    } else {
        throw ConfigError("unknown potential kind: " + p.kind);
    }
    if (j.contains("center")) {
        const auto& c = j.at("center");
        if (!c.is_array() || c.size() != 2) throw ConfigError("potential center: need [x, y]");
        p.cx = c[0].get<double>();
        p.cy = c[1].get<double>();
    }
    return p;
}

inline CurveSpec parse_curve(const Json& j) {
    CurveSpec c;
    if (!j.is_object()) throw ConfigError("curve: must be an object");
    c.kind = j.value("kind", std::string("circle"));
    if (c.kind == "circle") {
        if (!j.contains("radius")) throw ConfigError("circle: needs radius");
        c.radius = j.at("radius").get<double>();
        if (!(c.radius > 0.0)) throw ConfigError("circle: radius must be positive");
    } else if (c.kind == "ellipse") {
        c.a = j.value("a", 1.0);
        c.b = j.value("b", 1.0);
        if (!(c.a > 0.0) || !(c.b > 0.0)) throw ConfigError("ellipse: semi-axes must be positive");
    } else if (c.kind == "stationary_circle") {
        if (!j.contains("r_lo") || !j.contains("r_hi")) throw ConfigError("stationary_circle: needs r_lo, r_hi bracket");
        c.r_lo = j.at("r_lo").get<double>();
        c.r_hi = j.at("r_hi").get<double>();
        if (!(c.r_hi > c.r_lo) || !(c.r_lo > 0.0)) throw ConfigError("stationary_circle: need 0 < r_lo < r_hi");
    } else {
        throw ConfigError("unknown curve kind: " + c.kind);
    }
    if (j.contains("center")) {
        const auto& ctr = j.at("center");
        if (!ctr.is_array() || ctr.size() != 2) throw ConfigError("curve center: need [x, y]");
        c.cx = ctr[0].get<double>();
        c.cy = ctr[1].get<double>();
    }
    return c;
}

inline Scenario parse_scenario(const Json& j) {
    if (!j.is_object()) throw ConfigError("scenario: top level must be an object");
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.seed = j.value("seed", std::uint64_t(1234567));
    s.epsilon = j.value("epsilon", 0.05);
    if (!(s.epsilon > 0.0) || !(s.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!j.contains("curve")) throw ConfigError("scenario: missing curve");
    if (!j.contains("potential")) throw ConfigError("scenario: missing potential");
    s.curve = parse_curve(j.at("curve"));
    s.potential = parse_potential(j.at("potential"));
    if (j.contains("params")) {
        const auto& p = j.at("params");
        s.alpha = p.value("alpha", s.alpha);
        s.varrho = p.value("varrho", s.varrho);
        s.C2_hat = p.value("C2_hat", s.C2_hat);
        s.gap_c = p.value("gap_c", s.gap_c);
        if (p.contains("M0")) s.M0 = p.at("M0").get<double>();
        if (p.contains("lambda0_override")) s.lambda0_override = p.at("lambda0_override").get<double>();
        if (!(s.alpha > 0.0) || !(s.alpha < 0.5)) throw ConfigError("alpha must lie in (0, 1/2)");
        if (!(s.varrho > 1.0 / 3.0 + 4.0 * s.alpha / 3.0) || !(s.varrho < 1.0))
            throw ConfigError("varrho must lie in (1/3 + 4 alpha/3, 1)");
        if (!(s.gap_c > 0.0)) throw ConfigError("gap_c must be positive");
    }
    if (j.contains("profile")) {
        const auto& p = j.at("profile");
        s.profile.x_max = p.value("x_max", s.profile.x_max);
        s.profile.n = p.value("n", s.profile.n);
        s.profile.newton_tol = p.value("newton_tol", s.profile.newton_tol);
    }
    if (j.contains("strip")) {
        const auto& p = j.at("strip");
        s.strip.x_window = p.value("x_window", s.strip.x_window);
        s.strip.n_tau = p.value("n_tau", s.strip.n_tau);
        s.strip.picard_tol = p.value("picard_tol", s.strip.picard_tol);
        s.strip.max_iter = p.value("max_iter", s.strip.max_iter);
    }
    if (j.contains("reduced")) {
        const auto& p = j.at("reduced");
        s.reduced.tol = p.value("tol", s.reduced.tol);
        s.reduced.max_iter = p.value("max_iter", s.reduced.max_iter);
        s.reduced.measured_remainders = p.value("measured_remainders", s.reduced.measured_remainders);
    }
    s.n_theta = j.value("n_theta", s.n_theta);
    if (s.n_theta < 16 || (s.n_theta & (s.n_theta - 1)) != 0)
        throw ConfigError("n_theta must be a power of two >= 16");
    return s;
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(read_json_file(path)); }

}  // namespace gpcurve
