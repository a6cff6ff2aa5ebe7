#include "broucke/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace broucke {

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double oracle_distance(const MassParams& params, double tol, const OrbitOptions& orbit_opts) {
    OrbitOptions oo = orbit_opts;
    oo.tol = tol;
    const OrbitSolution orb = find_orbit(params, std::nullopt, oo);
    const MonodromyData md = monodromy_data(orb, tol);
    return hausdorff_distance(monodromy_oracle(orb, tol), spectrum(md.W * md.W));
}

VerifyReport verify_mass(const MassParams& params, const VerifyOptions& opts) {
    const auto& st = structure();
    VerifyReport rep;
    auto add = [&rep](std::string name, double value, double threshold) {
        rep.checks.push_back({std::move(name), value, threshold, std::abs(value) < threshold});
    };

    OrbitOptions oo = opts.orbit;
    oo.tol = opts.tol;
    const OrbitSolution orb = find_orbit(params, std::nullopt, oo);
    const MonodromyData md = monodromy_data(orb, opts.tol);
    rep.record = classify(md, orb);
    const StructureResiduals res = verify_structure(md, orb);

    add("energy_surface |Gamma(gamma(0))|", gamma(initial_state(params, orb.zeta4), params), 1e-12);
    add("shooting residual |P1(s0)|", orb.residual, oo.residual_tol);
    add("k11 + 1", res.k11, 1e-6);
    add("first column of K + e1", res.first_column, 1e-6);
    add("K sparsity", res.sparsity, 1e-8);
    add("left relation (i)", res.rel_i, 1e-6);
    add("left relation (ii)", res.rel_ii, 1e-6);
    add("left eigenvector K w + w", res.left_eig, 1e-6);
    add("K vs (W + W^-1)/2 block", res.block_form, 1e-8);
    add("W symplectic (relative)", res.w_symplectic / std::max(1.0, md.W.squaredNorm()), 1e-10);
    add("eig2 trace vs -det", rep.record.eig2 - rep.record.eig2_det, 1e-6);

    const auto [l1, l2] = central_block_eigenvalues(md.a, md.b, md.c, md.d);
    add("central block eigenvalues real", std::max(std::abs(l1.imag()), std::abs(l2.imag())), 1e-8);

    add("Gamma drift", md.gamma_drift, 1e-10);
    add("angular momentum drift", md.a_drift, 1e-10);
    add("frame symplecticity", md.frame_symplectic, 1e-8);
    add("invariant-set leakage", md.state_leakage, 1e-9);
    add("frame pattern leakage", md.frame_leakage, 1e-8);

    // Half-period factorization: Y(T/2) = S Y0 B^{-1} S B.
    const FrameTrajectory half =
        flow_with_frame(initial_state(params, orb.zeta4), st.Y0, params, 2.0 * orb.s0, opts.tol);
    const Mat8 predicted = st.S * st.Y0 * symplectic_inverse(md.B) * st.S * md.B;
    const Mat8& direct = half.frames.back();
    add("Y(T/2) factorization (relative)", (direct - predicted).cwiseAbs().maxCoeff() / std::max(1.0, direct.cwiseAbs().maxCoeff()),
        1e-7);
    const Vec8 z_half = half.base.raw(half.base.size() - 1).head<8>();
    add("gamma(T/2) + gamma(0)", (z_half + initial_state(params, orb.zeta4).z()).cwiseAbs().maxCoeff(), 1e-8);

    // Full-period oracle at the tighter tolerance.
    OrbitOptions tight = oo;
    tight.tol = opts.oracle_tol;
    const OrbitSolution orb_t = find_orbit(params, orb.zeta4, tight);
    const MonodromyData md_t = monodromy_data(orb_t, opts.oracle_tol);
    const auto oracle = monodromy_oracle(orb_t, opts.oracle_tol);
    add("oracle vs W^2 spectrum distance", hausdorff_distance(oracle, spectrum(md_t.W * md_t.W)), 1e-5);
    std::complex<double> prod = 1.0;
    bool on_circle = true;
    for (const auto& z : oracle) {
        prod *= z;
        on_circle = on_circle && std::abs(std::abs(z) - 1.0) < 1e-5;
    }
    add("oracle eigenvalue product - 1", std::abs(prod - 1.0), 1e-6);
    add("spectral_4df agrees with oracle unit circle", on_circle == rep.record.spectral_4df ? 0.0 : 1.0, 0.5);
    return rep;
}

}  // namespace broucke
