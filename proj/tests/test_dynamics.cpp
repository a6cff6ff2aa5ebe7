#include <cmath>
#include <random>

#include "doctest.h"

#include "broucke/dynamics.hpp"
#include "common.hpp"

using namespace broucke;

TEST_SUITE("dynamics") {

TEST_CASE("mass parameters") {
    const MassParams p(1.0);
    CHECK(p.m2() == doctest::Approx(1.0));
    CHECK(p.mu() == doctest::Approx(1.5));
    CHECK(p.energy() == -1.0);
    CHECK_THROWS_AS(MassParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MassParams(1.5), std::invalid_argument);
    CHECK_THROWS_AS(MassParams(-0.2), std::invalid_argument);
}

TEST_CASE("gamma at a hand-computed state") {
    // m1 = m2 = 1, Q = (1,0,0,0), P = 0: r = 1, D+ = D- = 1/4,
    // Gamma = -1 * 1 * (2 + 2) - 1 + 1 = -4.
    Vec8 z = Vec8::Zero();
    z[0] = 1.0;
    CHECK(gamma(z, MassParams(1.0)) == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("gamma is singular on the m1-m2 collision") {
    // m1 = 0.75 gives mu = 1. With Q = (1, 0, 1/2, 0), D- = 1/4 - 1/2 + 1/4 = 0 exactly.
    const MassParams p(0.75);
    REQUIRE(p.mu() == 1.0);
    Vec8 z = Vec8::Zero();
    z[0] = 1.0;
    z[2] = 0.5;
    CHECK_THROWS_AS(gamma(z, p), SingularConfiguration);
    CHECK_THROWS_AS(gamma_grad(z, p), SingularConfiguration);
}

TEST_CASE("gradient and Hessian against central differences") {
    std::mt19937 rng(20240611);
    for (double m1 : {0.3, 1.0, 1.4}) {
        const MassParams p(m1);
        double worst_g = 0.0, worst_h = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const Vec8 z = testutil::random_state(rng, p);
            const Vec8 g = gamma_grad(z, p);
            const Mat8 H = gamma_hess(z, p);
            for (int i = 0; i < 8; ++i) {
                const double h = 1e-5 * std::max(1.0, std::abs(z[i]));
                Vec8 zp = z, zm = z;
                zp[i] += h;
                zm[i] -= h;
                const double fd = (gamma(zp, p) - gamma(zm, p)) / (2 * h);
                worst_g = std::max(worst_g, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
                const Vec8 col = (gamma_grad(zp, p) - gamma_grad(zm, p)) / (2 * h);
                worst_h = std::max(worst_h, (col - H.col(i)).cwiseAbs().maxCoeff() /
                                                std::max(1.0, H.col(i).cwiseAbs().maxCoeff()));
            }
            CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()));
        }
        CHECK(worst_g < 1e-6);
        CHECK(worst_h < 1e-5);
    }
}

TEST_CASE("vector field is J grad gamma") {
    std::mt19937 rng(3);
    const MassParams p(0.7);
    for (int k = 0; k < 20; ++k) {
        const Vec8 z = testutil::random_state(rng, p);
        CHECK((vector_field(z, p) - structure().J * gamma_grad(z, p)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("gamma is invariant under S and under Q, P -> Q, -P") {
    std::mt19937 rng(5);
    const MassParams p(0.9);
    const Mat8& S = structure().S;
    for (int k = 0; k < 50; ++k) {
        const Vec8 z = testutil::random_state(rng, p);
        const double g = gamma(z, p);
        CHECK(gamma(Vec8(S * z), p) == doctest::Approx(g).epsilon(1e-13));
        CHECK(gamma(Vec8(-S * z), p) == doctest::Approx(g).epsilon(1e-13));
        Vec8 rev = z;
        rev.tail<4>() *= -1.0;
        CHECK(gamma(rev, p) == doctest::Approx(g).epsilon(1e-13));
    }
}

TEST_CASE("angular momentum is a first integral of gamma") {
    std::mt19937 rng(11);
    for (double m1 : {0.2, 1.0, 1.3}) {
        const MassParams p(m1);
        for (int k = 0; k < 50; ++k) {
            const Vec8 z = testutil::random_state(rng, p);
            // {A, Gamma} = grad A . J grad Gamma.
            const double bracket = angular_momentum_grad(z).dot(structure().J * gamma_grad(z, p));
            CHECK(std::abs(bracket) < 1e-11 * std::max(1.0, gamma_grad(z, p).norm()));
        }
    }
}

TEST_CASE("angular momentum gradient matches differences") {
    std::mt19937 rng(13);
    const MassParams p(1.0);
    const Vec8 z = testutil::random_state(rng, p);
    const Vec8 g = angular_momentum_grad(z);
    for (int i = 0; i < 8; ++i) {
        Vec8 zp = z, zm = z;
        zp[i] += 1e-6;
        zm[i] -= 1e-6;
        CHECK((angular_momentum(zp) - angular_momentum(zm)) / 2e-6 == doctest::Approx(g[i]).epsilon(1e-8));
    }
}

TEST_CASE("structure matrices") {
    const auto& st = structure();
    const Mat8 I = Mat8::Identity();
    CHECK((st.S * st.S - I).norm() == 0.0);
    CHECK((st.J * st.J + I).norm() == 0.0);
    // S is anti-symplectic: S^T J S = -J.
    CHECK((st.S.transpose() * st.J * st.S + st.J).norm() == 0.0);
    CHECK((st.Y0.transpose() * st.J * st.Y0 - st.J).norm() == 0.0);
    CHECK((-st.Y0.transpose() * st.S * st.Y0 - st.Lambda).norm() == 0.0);
    CHECK((st.Y0.transpose() * st.Y0 - I).norm() == 0.0);
}

TEST_CASE("pattern M") {
    int zeros = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) zeros += m_pattern_zero(i, j);
    CHECK(zeros == 8);
    CHECK_FALSE(m_pattern_zero(0, 3));
    CHECK_FALSE(m_pattern_zero(1, 2));
    CHECK(m_pattern_zero(0, 1));
    Mat4 k = Mat4::Ones();
    CHECK(m_pattern_violation(k) == 1.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (m_pattern_zero(i, j)) k(i, j) = 0.0;
    CHECK(m_pattern_violation(k) == 0.0);
}

TEST_CASE("invariant set is preserved by the vector field") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const MassParams p(0.6);
    for (int k = 0; k < 30; ++k) {
        Vec8 z;
        z << u(rng), 0.0, 0.0, u(rng), u(rng), 0.0, 0.0, u(rng);
        if (z[0] * z[0] < 0.05) continue;
        CHECK(in_invariant_set(z, 0.0));
        const Vec8 f = vector_field(z, p);
        CHECK(invariant_set_leakage(f) == 0.0);
        CHECK(m2_pattern_violation(Mat8(structure().J * gamma_hess(z, p))) == 0.0);
    }
}

}  // TEST_SUITE
