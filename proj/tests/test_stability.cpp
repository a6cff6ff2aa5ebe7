#include <cmath>
#include <complex>
#include <deque>
#include <limits>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "broucke/stability.hpp"

using namespace broucke;

namespace {

const OrbitSolution& orbit_at(double m1) {
    static std::deque<std::pair<double, OrbitSolution>> cache;  // stable references
    for (const auto& [m, o] : cache)
        if (m == m1) return o;
    cache.emplace_back(m1, find_orbit(MassParams(m1)));
    return cache.back().second;
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("K at m1 = 1 matches the independent prototype") {
    // Frozen from a numpy/scipy implementation of the same factorization.
    const MonodromyData md = monodromy_data(orbit_at(1.0));
    CHECK(md.a == doctest::Approx(3.63445030).epsilon(1e-7));
    CHECK(md.b == doctest::Approx(11.3459523).epsilon(1e-7));
    CHECK(md.c == doctest::Approx(-0.245514834).epsilon(1e-7));
    CHECK(md.d == doctest::Approx(-1.60106365).epsilon(1e-7));
    CHECK(md.e == doctest::Approx(0.6435357887).epsilon(1e-8));
    CHECK(md.K(0, 3) == doctest::Approx(1.48002551).epsilon(1e-7));
    CHECK(md.a + md.d + 1.0 == doctest::Approx(3.0333866565).epsilon(1e-8));
}

TEST_CASE("K against the explicit-inverse factorization") {
    const auto& st = structure();
    for (double m1 : {0.4, 0.7, 1.0, 1.3}) {
        const MonodromyData md = monodromy_data(orbit_at(m1));
        const Mat8 Binv = md.B.inverse();
        CHECK((Binv - symplectic_inverse(md.B)).cwiseAbs().maxCoeff() < 1e-8 * Binv.cwiseAbs().maxCoeff());
        const Mat8 W = st.Y0.transpose() * st.S * st.Y0 * Binv * st.S * md.B;
        const Mat8 half = 0.5 * (W + W.inverse());
        CHECK((half.bottomRightCorner<4, 4>() - md.K).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((half.topLeftCorner<4, 4>() - md.K.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("structural theorems at m1 = 1") {
    const OrbitSolution& orb = orbit_at(1.0);
    const MonodromyData md = monodromy_data(orb);
    const StructureResiduals r = verify_structure(md, orb);
    CHECK(r.k11 < 1e-6);
    CHECK(r.first_column < 1e-6);
    CHECK(r.sparsity < 1e-8);
    CHECK(std::abs(r.rel_i) < 1e-6);
    CHECK(std::abs(r.rel_ii) < 1e-6);
    CHECK(r.left_eig < 1e-6);
    CHECK(r.block_form < 1e-8);
    CHECK(r.worst() < 1e-6);
    // The mass-weighted variant is not satisfied by the conserved generator.
    CHECK(std::abs(r.rel_i_mass_weighted) > 1.0);
}

TEST_CASE("left eigenvector has the closed form") {
    const MassParams p(0.8);
    const Vec4 w = left_eigenvector(p, 2.1);
    CHECK(w[0] == 0.0);
    CHECK(w[1] == doctest::Approx(-2.1));
    CHECK(w[2] == doctest::Approx(std::pow(0.8, 1.5)));
    CHECK(w[3] == 0.0);
}

TEST_CASE("perturbing B is detected") {
    const OrbitSolution& orb = orbit_at(1.0);
    const MonodromyData md = monodromy_data(orb);
    Mat8 B = md.B;
    B(1, 6) += 1e-3;
    const StructureResiduals r = verify_structure(monodromy_data_from_frame(B), orb);
    CHECK(r.worst() > 1e-4);
}

TEST_CASE("eigenvalues of K are real and eig2 equals minus the determinant") {
    for (double m1 : {0.1, 0.6, 0.71, 1.0, 1.45}) {
        const MonodromyData md = monodromy_data(orbit_at(m1));
        const auto [l1, l2] = central_block_eigenvalues(md.a, md.b, md.c, md.d);
        CHECK(std::abs(l1.imag()) < 1e-8);
        CHECK(std::abs(l2.imag()) < 1e-8);
        // One eigenvalue of the central block is -1 (angular momentum), the other is a + d + 1.
        const double eig2 = md.a + md.d + 1.0;
        const double other = std::abs(l1.real() + 1.0) < std::abs(l2.real() + 1.0) ? l2.real() : l1.real();
        CHECK(other == doctest::Approx(eig2).epsilon(1e-6));
        CHECK(std::abs(eig2 + (md.a * md.d - md.b * md.c)) < 1e-6);
    }
}

TEST_CASE("closed-form block eigenvalues") {
    const auto [l1, l2] = central_block_eigenvalues(2.0, 1.0, 1.0, 2.0);
    CHECK(l1.real() == doctest::Approx(3.0));
    CHECK(l2.real() == doctest::Approx(1.0));
    const auto [c1, c2] = central_block_eigenvalues(0.0, -1.0, 1.0, 0.0);
    CHECK(c1.imag() == doctest::Approx(1.0));
    CHECK(c2 == std::conj(c1));
}

TEST_CASE("classification at reference masses") {
    const StabilityRecord r065 = classify(monodromy_data(orbit_at(0.65)), orbit_at(0.65));
    CHECK(r065.spectral_4df);
    CHECK(r065.stable_2df);
    CHECK(r065.linear_4df);
    CHECK(r065.reliable);

    const StabilityRecord r1 = classify(monodromy_data(orbit_at(1.0)), orbit_at(1.0));
    CHECK(r1.stable_2df);
    CHECK_FALSE(r1.spectral_4df);
    CHECK_FALSE(r1.linear_4df);

    const StabilityRecord r071 = classify(monodromy_data(orbit_at(0.71)), orbit_at(0.71));
    CHECK(r071.spectral_4df);
    CHECK(r071.degenerate == Degeneracy::Crossing);
    CHECK_FALSE(r071.linear_4df);
    CHECK(std::abs(r071.e - r071.eig2) < 1e-3);
}

TEST_CASE("degeneracy rules on synthetic K") {
    const OrbitSolution& orb = orbit_at(0.65);
    MonodromyData md = monodromy_data(orb);
    // Editing the trace breaks the structural relations, so open the residual gate.
    ClassifyOptions open;
    open.residual_gate = std::numeric_limits<double>::infinity();
    auto with = [&](double e, double eig2) {
        MonodromyData m = md;
        m.e = e;
        m.d = eig2 - 1.0 - m.a;
        return classify(m, orb, open);
    };
    CHECK(with(0.5, 0.5004).degenerate == Degeneracy::Crossing);
    CHECK(with(0.5, 0.9995).degenerate == Degeneracy::UnitEigenvalue);
    CHECK(with(0.5, -0.9995).degenerate == Degeneracy::UnitEigenvalue);
    CHECK(with(0.5, 0.0004).degenerate == Degeneracy::ZeroEigenvalue);
    CHECK(with(0.5, -0.5002).degenerate == Degeneracy::DoubledAngle);
    CHECK(with(1.0, 0.3).degenerate == Degeneracy::Boundary);
    CHECK_FALSE(with(1.0, 0.3).stable_2df);
    CHECK(with(0.5, 0.3).degenerate == Degeneracy::None);
    CHECK(with(0.5, 1.5).degenerate == Degeneracy::None);
}

TEST_CASE("unreliable records are flagged, not thrown") {
    const OrbitSolution& orb = orbit_at(0.65);
    MonodromyData md = monodromy_data(orb);
    md.K(0, 1) = 1e-2;
    const StabilityRecord r = classify(md, orb);
    CHECK_FALSE(r.reliable);
    CHECK(r.degenerate == Degeneracy::Unreliable);
    CHECK_FALSE(r.linear_4df);
}

TEST_CASE("W squared reproduces the unit-circle pairs") {
    const MonodromyData md = monodromy_data(orbit_at(0.65));
    const auto sw = spectrum(md.W * md.W);
    for (double lambda : {md.e, md.a + md.d + 1.0}) {
        const std::complex<double> root(lambda, std::sqrt(1.0 - lambda * lambda));
        const std::complex<double> want = root * root;
        double best = 1e9;
        for (const auto& z : sw) best = std::min(best, std::abs(z - want));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("half-period factorization") {
    const auto& st = structure();
    const OrbitSolution& orb = orbit_at(0.9);
    const MonodromyData md = monodromy_data(orb);
    const FrameTrajectory half = flow_with_frame(initial_state(orb.params, orb.zeta4), st.Y0, orb.params, 2.0 * orb.s0);
    const Mat8 predicted = st.S * st.Y0 * symplectic_inverse(md.B) * st.S * md.B;
    CHECK((half.frames.back() - predicted).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("oracle spectrum") {
    OrbitOptions tight;
    tight.tol = 3e-15;
    const OrbitSolution orb = find_orbit(MassParams(0.7), std::nullopt, tight);
    const MonodromyData md = monodromy_data(orb, tight.tol);
    const auto oracle = monodromy_oracle(orb, tight.tol);
    REQUIRE(oracle.size() == 8);
    CHECK(hausdorff_distance(oracle, spectrum(md.W * md.W)) < 1e-5);
    std::complex<double> prod = 1.0;
    for (const auto& z : oracle) {
        prod *= z;
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-5);
    }
    CHECK(std::abs(prod - 1.0) < 1e-6);
}

TEST_CASE("hausdorff distance") {
    using C = std::complex<double>;
    CHECK(hausdorff_distance({C(0, 0), C(1, 0)}, {C(1, 0), C(0, 0)}) == 0.0);
    CHECK(hausdorff_distance({C(0, 0)}, {C(0, 0), C(3, 4)}) == doctest::Approx(5.0));
}

TEST_CASE("analyze reports failure as a status") {
    const StabilityRecord r = analyze(MassParams(1.49));
    CHECK(r.status == "out_of_range");
    CHECK_FALSE(r.ok());
    CHECK(analyze(MassParams(0.65)).ok());
}

}  // TEST_SUITE
