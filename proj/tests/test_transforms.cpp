#include <cmath>
#include <random>

#include "doctest.h"

#include "broucke/transforms.hpp"

using namespace broucke;
using namespace broucke::transforms;

namespace {

RelativeState random_relative(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    RelativeState r;
    for (int i = 0; i < 4; ++i) {
        r.u[i] = u(rng);
        r.v[i] = u(rng);
    }
    return r;
}

// Jacobian of rel_to_reg as a map R^8 -> R^8 by central differences.
Mat8 lc_jacobian(const RelativeState& r) {
    Mat8 Jac;
    for (int i = 0; i < 8; ++i) {
        RelativeState p = r, m = r;
        const double h = 1e-6;
        (i < 4 ? p.u[i] : p.v[i - 4]) += h;
        (i < 4 ? m.u[i] : m.v[i - 4]) -= h;
        Jac.col(i) = (rel_to_reg(p).z() - rel_to_reg(m).z()) / (2 * h);
    }
    return Jac;
}

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("relative coordinates of fixed examples") {
    RegState x;
    x.Q << 1.0, 0.0, 0.3, -0.4;
    const RelativeState r = reg_to_rel(x);
    CHECK(r.u[0] == 1.0);
    CHECK(r.u[1] == 0.0);
    CHECK(r.u[2] == 0.3);
    CHECK(r.u[3] == -0.4);

    x.Q << 1.0, 1.0, 0.0, 0.0;
    const RelativeState r2 = reg_to_rel(x);
    CHECK(r2.u[0] == 0.0);
    CHECK(r2.u[1] == 2.0);

    x.Q.setZero();
    CHECK_THROWS_AS(reg_to_rel(x), CollisionError);
}

TEST_CASE("square root branches") {
    RelativeState r;
    r.u << 1.0, 0.0, 0.0, 0.0;
    CHECK(rel_to_reg(r, Branch::Plus).Q[0] == doctest::Approx(1.0));
    CHECK(rel_to_reg(r, Branch::Minus).Q[0] == doctest::Approx(-1.0));
    r.u << 0.0, 2.0, 0.0, 0.0;
    const RegState x = rel_to_reg(r);
    CHECK(x.Q[0] == doctest::Approx(1.0));
    CHECK(x.Q[1] == doctest::Approx(1.0));
    // Negative real axis: principal root is +i.
    r.u << -4.0, 0.0, 0.0, 0.0;
    CHECK(rel_to_reg(r).Q[1] == doctest::Approx(2.0));
}

TEST_CASE("round trips") {
    std::mt19937 rng(101);
    const MassParams p(0.8);
    for (int k = 0; k < 200; ++k) {
        const RelativeState r = random_relative(rng);
        for (Branch b : {Branch::Plus, Branch::Minus}) {
            const RelativeState back = reg_to_rel(rel_to_reg(r, b));
            CHECK((back.u - r.u).cwiseAbs().maxCoeff() < 1e-14);
            CHECK((back.v - r.v).cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, 1.0 / r.u.head<2>().norm()));
        }
        const RelativeState via_cart = cart_to_rel(rel_to_cart(r, p));
        CHECK((via_cart.u - r.u).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((via_cart.v - r.v).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("momentum relations from the generating function") {
    std::mt19937 rng(103);
    for (int k = 0; k < 100; ++k) {
        const RelativeState r = random_relative(rng);
        const RegState x = rel_to_reg(r);
        const auto& Q = x.Q;
        const auto& v = r.v;
        CHECK(std::abs(x.P[0] - (2 * Q[0] * v[0] + 2 * Q[1] * v[1])) < 1e-12);
        CHECK(std::abs(x.P[1] - (-2 * Q[1] * v[0] + 2 * Q[0] * v[1])) < 1e-12);
    }
}

TEST_CASE("Levi-Civita map preserves the symplectic form") {
    std::mt19937 rng(107);
    const Mat8 Jm = broucke::structure().J;
    for (int k = 0; k < 20; ++k) {
        const RelativeState r = random_relative(rng);
        if (r.u.head<2>().norm() < 0.1) continue;
        const Mat8 D = lc_jacobian(r);
        CHECK((D.transpose() * Jm * D - Jm).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("Cartesian reconstruction is barycentric") {
    std::mt19937 rng(109);
    for (double m1 : {0.1, 1.0, 1.4}) {
        const MassParams p(m1);
        const CartesianState c = rel_to_cart(random_relative(rng), p);
        CHECK(center_of_mass_residual(c, p) < 1e-14);
        CHECK(net_momentum_residual(c) < 1e-14);
    }
}

TEST_CASE("Hamiltonians agree across levels") {
    std::mt19937 rng(113);
    for (double m1 : {0.2, 0.65, 1.0, 1.45}) {
        const MassParams p(m1);
        for (int k = 0; k < 50; ++k) {
            const RelativeState r = random_relative(rng);
            if (r.u.head<2>().norm() < 0.05) continue;
            const double e1 = h1(r, p);
            CHECK(h0(rel_to_cart(r, p), p) == doctest::Approx(e1).epsilon(1e-12));
            CHECK(h2(rel_to_reg(r), p) == doctest::Approx(e1).epsilon(1e-12));
            CHECK(h2(rel_to_reg(r, Branch::Minus), p) == doctest::Approx(e1).epsilon(1e-12));
        }
    }
}

TEST_CASE("angular momenta agree across levels") {
    std::mt19937 rng(127);
    for (double m1 : {0.3, 1.0}) {
        const MassParams p(m1);
        for (int k = 0; k < 50; ++k) {
            const RelativeState r = random_relative(rng);
            if (r.u.head<2>().norm() < 0.05) continue;
            const double a = a1(r, p);
            CHECK(a0(rel_to_cart(r, p)) == doctest::Approx(a).epsilon(1e-12));
            CHECK(a2_chain(rel_to_reg(r), p) == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("h2 is the scaled regularized Hamiltonian") {
    std::mt19937 rng(131);
    const MassParams p(0.9);
    for (int k = 0; k < 30; ++k) {
        const RelativeState r = random_relative(rng);
        if (r.u.head<2>().norm() < 0.05) continue;
        const RegState x = rel_to_reg(r);
        const double rr = x.Q.head<2>().squaredNorm();
        CHECK(gamma(x, p) == doctest::Approx(rr * (h2(x, p) - p.energy())).epsilon(1e-12));
    }
}

}  // TEST_SUITE
