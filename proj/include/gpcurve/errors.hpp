#pragma once

#include <stdexcept>
#include <string>

namespace gpcurve {

// Error taxonomy. Every failure mode the library can signal maps onto one of
// these classes; the CLI translates them into its documented exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent user input (scenario file, flags, grid parameters).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

// An iterative method (Newton, Picard, outer absorption loop) failed to reach
// its tolerance within the iteration budget.
class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& msg) : Error("non-convergence: " + msg) {}
};

// A fixed point was reached but the result violates the admissibility budgets.
class BudgetExceeded : public NonConvergence {
public:
    explicit BudgetExceeded(const std::string& msg) : NonConvergence("budget exceeded: " + msg) {}
};

// A linear problem has an incompatible right-hand side (solvability integral
// against the kernel direction does not vanish).
class Unsolvable : public Error {
public:
    explicit Unsolvable(const std::string& msg) : Error("unsolvable: " + msg) {}
};

// A small divisor fell below the configured resonance threshold.
class Resonant : public Error {
public:
    explicit Resonant(const std::string& msg) : Error("resonant: " + msg) {}
};

// A spectral gap closed: an eigenvalue is numerically zero, or a curve fails
// the non-degeneracy / stationarity requirement.
class Degenerate : public Error {
public:
    explicit Degenerate(const std::string& msg) : Error("degenerate: " + msg) {}
};

// A point or a requested window leaves the tubular neighbourhood.
class OutsideTube : public Error {
public:
    explicit OutsideTube(const std::string& msg) : Error("outside tube: " + msg) {}
};

// Two objects that must describe the same scenario do not.
class GeometryMismatch : public Error {
public:
    explicit GeometryMismatch(const std::string& msg) : Error("geometry mismatch: " + msg) {}
};

// The forbidden resonance bands cover the whole search window.
class NoAdmissibleEpsilon : public Error {
public:
    explicit NoAdmissibleEpsilon(const std::string& msg) : Error("no admissible epsilon: " + msg) {}
};

// Filesystem / serialization failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io: " + msg) {}
};

// CLI exit-code contract: 1 config, 2 non-convergence, 3 resonance/degeneracy,
// 4 I/O. BudgetExceeded is a convergence-category failure (2); tube/geometry
// misuse is treated as configuration (1).
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return 4;
    if (dynamic_cast<const Resonant*>(&e)) return 3;
    if (dynamic_cast<const Degenerate*>(&e)) return 3;
    if (dynamic_cast<const NoAdmissibleEpsilon*>(&e)) return 3;
    if (dynamic_cast<const NonConvergence*>(&e)) return 2;
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const OutsideTube*>(&e)) return 1;
    if (dynamic_cast<const GeometryMismatch*>(&e)) return 1;
    if (dynamic_cast<const Unsolvable*>(&e)) return 2;
    return 1;
}

}  // namespace gpcurve
