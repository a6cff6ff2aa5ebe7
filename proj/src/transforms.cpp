#include "broucke/transforms.hpp"

#include <cmath>
#include <complex>

namespace broucke::transforms {

RelativeState cart_to_rel(const CartesianState& c) {
    const auto& q = c.q;
    const auto& p = c.p;
    RelativeState r;
    r.u << q[0] - q[2], q[1] - q[3], q[0] + q[2], q[1] + q[3];
    r.v << (p[0] - p[2]) / 2, (p[1] - p[3]) / 2, (p[0] + p[2]) / 2, (p[1] + p[3]) / 2;
    return r;
}

CartesianState rel_to_cart(const RelativeState& r, const MassParams& params) {
    const auto& u = r.u;
    const auto& v = r.v;
    const double ratio = params.m1() / params.m2();
    CartesianState c;
    c.q[0] = (u[0] + u[2]) / 2;
    c.q[1] = (u[1] + u[3]) / 2;
    c.q[2] = (u[2] - u[0]) / 2;
    c.q[3] = (u[3] - u[1]) / 2;
    c.q[4] = -ratio * (c.q[0] + c.q[2]);
    c.q[5] = -ratio * (c.q[1] + c.q[3]);
    c.p[0] = v[0] + v[2];
    c.p[1] = v[1] + v[3];
    c.p[2] = v[2] - v[0];
    c.p[3] = v[3] - v[1];
    c.p[4] = -(c.p[0] + c.p[2]);
    c.p[5] = -(c.p[1] + c.p[3]);
    return c;
}

RelativeState reg_to_rel(const RegState& x) {
    const auto& Q = x.Q;
    const auto& P = x.P;
    const double r = Q[0] * Q[0] + Q[1] * Q[1];
    if (r == 0.0) throw CollisionError("reg_to_rel: momenta undefined at Q1 = Q2 = 0");
    RelativeState out;
    out.u << Q[0] * Q[0] - Q[1] * Q[1], 2 * Q[0] * Q[1], Q[2], Q[3];
    out.v << (Q[0] * P[0] - Q[1] * P[1]) / (2 * r), (Q[1] * P[0] + Q[0] * P[1]) / (2 * r), P[2], P[3];
    return out;
}

RegState rel_to_reg(const RelativeState& r, Branch branch) {
    std::complex<double> w = std::sqrt(std::complex<double>(r.u[0], r.u[1]));
    // Principal branch: Q1 >= 0, and Q2 >= 0 when Q1 = 0.
    if (w.real() < 0.0 || (w.real() == 0.0 && w.imag() < 0.0)) w = -w;
    if (branch == Branch::Minus) w = -w;

    RegState x;
    x.Q << w.real(), w.imag(), r.u[2], r.u[3];
    const double q1 = x.Q[0], q2 = x.Q[1];
    // P = (du/dQ)^T v from the generating function v . u(Q).
    x.P << 2 * q1 * r.v[0] + 2 * q2 * r.v[1], -2 * q2 * r.v[0] + 2 * q1 * r.v[1], r.v[2], r.v[3];
    return x;
}

double h0(const CartesianState& c, const MassParams& params) {
    const auto& q = c.q;
    const auto& p = c.p;
    const double m1 = params.m1(), m2 = params.m2();
    const double kinetic =
        0.5 * ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]) / m1 +
               ((p[0] + p[2]) * (p[0] + p[2]) + (p[1] + p[3]) * (p[1] + p[3])) / m2);
    const double sx = params.m1() * (q[0] + q[2]) / m2;
    const double sy = params.m1() * (q[1] + q[3]) / m2;
    const double d12 = std::hypot(q[0] - q[2], q[1] - q[3]);
    const double d13 = std::hypot(q[0] + sx, q[1] + sy);
    const double d23 = std::hypot(q[2] + sx, q[3] + sy);
    if (d12 == 0.0 || d13 == 0.0 || d23 == 0.0) throw SingularConfiguration("h0: collision");
    return kinetic - (m1 * m1 / d12 + m1 * m2 / d13 + m1 * m2 / d23);
}

double h1(const RelativeState& r, const MassParams& params) {
    const auto& u = r.u;
    const auto& v = r.v;
    const double m1 = params.m1(), m2 = params.m2(), mu = params.mu();
    const double kinetic = v.squaredNorm() / m1 + 2.0 / m2 * (v[2] * v[2] + v[3] * v[3]);
    const double d12 = std::hypot(u[0], u[1]);
    const double d13 = std::hypot(0.5 * u[0] + mu * u[2], 0.5 * u[1] + mu * u[3]);
    const double d23 = std::hypot(mu * u[2] - 0.5 * u[0], mu * u[3] - 0.5 * u[1]);
    if (d12 == 0.0 || d13 == 0.0 || d23 == 0.0) throw SingularConfiguration("h1: collision");
    return kinetic - (m1 * m1 / d12 + m1 * m2 / d13 + m1 * m2 / d23);
}

double h2(const RegState& x, const MassParams& params) {
    const double r = x.Q[0] * x.Q[0] + x.Q[1] * x.Q[1];
    if (r == 0.0) throw SingularConfiguration("h2: m1-m1 collision");
    return gamma(x, params) / r + params.energy();
}

double a0(const CartesianState& c) {
    const auto& q = c.q;
    const auto& p = c.p;
    return q[0] * p[1] - q[1] * p[0] + q[2] * p[3] - q[3] * p[2] + q[4] * p[5] - q[5] * p[4];
}

double a1(const RelativeState& r, const MassParams& params) {
    const auto& u = r.u;
    const auto& v = r.v;
    return u[0] * v[1] - u[1] * v[0] + 2 * params.mu() * (u[2] * v[3] - u[3] * v[2]);
}

double a2_chain(const RegState& x, const MassParams& params) {
    const auto& Q = x.Q;
    const auto& P = x.P;
    return 0.5 * (Q[0] * P[1] - Q[1] * P[0]) + 2 * params.mu() * (Q[2] * P[3] - Q[3] * P[2]);
}

double center_of_mass_residual(const CartesianState& c, const MassParams& params) {
    const double m1 = params.m1(), m2 = params.m2();
    return std::max(std::abs(m1 * (c.q[0] + c.q[2]) + m2 * c.q[4]),
                    std::abs(m1 * (c.q[1] + c.q[3]) + m2 * c.q[5]));
}

double net_momentum_residual(const CartesianState& c) {
    return std::max(std::abs(c.p[0] + c.p[2] + c.p[4]), std::abs(c.p[1] + c.p[3] + c.p[5]));
}

}  // namespace broucke::transforms
