#pragma once

#include <string>
#include <vector>

#include "broucke/stability.hpp"

namespace broucke {

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    double tol = 1e-12;
    // The full-period oracle needs a tighter tolerance: eigenvalue 1 of the
    // monodromy is defective, so integration error e shows up as sqrt(e).
    double oracle_tol = 3e-15;
    OrbitOptions orbit;
};

struct VerifyReport {
    StabilityRecord record;
    std::vector<Check> checks;
    bool all_pass() const;
};

/// Solves the orbit at `params` and evaluates every invariant the library
/// knows how to check. Throws OrbitSolveError when no orbit is found.
VerifyReport verify_mass(const MassParams& params, const VerifyOptions& opts = {});

/// Oracle spectrum against the spectrum of W^2 at the oracle tolerance.
double oracle_distance(const MassParams& params, double tol, const OrbitOptions& orbit_opts = {});

}  // namespace broucke
