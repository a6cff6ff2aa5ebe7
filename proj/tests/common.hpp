#pragma once

#include <random>

#include "broucke/dynamics.hpp"

namespace testutil {

// Uniform random state away from the binary and the m1-m2 collisions.
inline broucke::Vec8 random_state(std::mt19937& rng, const broucke::MassParams& params, double span = 1.5) {
    std::uniform_real_distribution<double> u(-span, span);
    for (;;) {
        broucke::Vec8 z;
        for (int i = 0; i < 8; ++i) z[i] = u(rng);
        const double r = z[0] * z[0] + z[1] * z[1];
        if (r < 0.05) continue;
        try {
            // Keep clear of near-collisions so finite differences stay meaningful.
            if (broucke::gamma_grad(z, params).norm() < 200.0) return z;
        } catch (const broucke::SingularConfiguration&) {
        }
    }
}

}  // namespace testutil
