#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "broucke/integrate.hpp"

namespace broucke {

/// Shooting could not produce a periodic orbit.
class OrbitSolveError : public std::runtime_error {
public:
    enum class Cause { NoBracket, NotConverged, OutOfRange, ShootFailure };
    OrbitSolveError(Cause cause, const std::string& what) : std::runtime_error(what), cause_(cause) {}
    Cause cause() const { return cause_; }

private:
    Cause cause_;
};

const char* to_string(OrbitSolveError::Cause cause);

struct OrbitOptions {
    double tol = 1e-12;            // integrator rtol/atol
    double residual_tol = 1e-10;   // |P1| at the section
    int max_iterations = 100;
    double m1_limit = 1.465;       // upper end of the supported mass range
    double scan_start = 0.05;      // bracketing scan zeta4 = scan_start * scan_factor^k
    double scan_factor = 1.25;
    double scan_max = 20.0;
    double scan_min = 1e-4;
    double s_max = 50.0;           // fictitious-time horizon for the first section crossing
};

/// Periodic Broucke orbit found by shooting inside the isosceles subspace.
struct OrbitSolution {
    MassParams params;
    double zeta4 = 0.0;   // Q4(0)
    double s0 = 0.0;      // quarter period in fictitious time
    double T = 0.0;       // 4 s0
    Trajectory quarter;   // over [0, s0]
    double zeta1 = 0.0;   // Q1(s0)
    double zeta8 = 0.0;   // P4(s0)
    double t_period = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool warm_started = false;

    double gamma_drift() const { return quarter.diagnostics.gamma_drift; }
    double a_drift() const { return quarter.diagnostics.a_drift; }
};

/// Collision state (0, 0, 0, zeta4, 2 m1^{3/2}, 0, 0, 0).
RegState initial_state(const MassParams& params, double zeta4);

struct ShootResult {
    double residual = 0.0;  // P1 at the first decreasing Q4 = 0 crossing
    double s0 = 0.0;
    RegState crossing;
};

ShootResult shoot(const MassParams& params, double zeta4, const OrbitOptions& opts = {});
inline std::pair<double, double> shoot_residual(const MassParams& params, double zeta4,
                                                const OrbitOptions& opts = {}) {
    const ShootResult r = shoot(params, zeta4, opts);
    return {r.residual, r.s0};
}

/// Brackets zeta4 by a geometric scan when no guess is given; otherwise polishes
/// from the guess by safeguarded secant, falling back to a fresh scan.
OrbitSolution find_orbit(const MassParams& params, std::optional<double> guess = std::nullopt,
                         const OrbitOptions& opts = {});

/// Full period [0, T] assembled from the quarter by the two reflections
///   gamma(s) = -S gamma(T/2 - s) = S gamma(T - s).
Trajectory extend_full_period(const OrbitSolution& orb);

}  // namespace broucke
