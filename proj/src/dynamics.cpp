#include "broucke/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace broucke {

MassParams::MassParams(double m1, double energy) : m1_(m1), energy_(energy) {
    if (!(m1 > 0.0 && m1 < 1.5)) {
        std::ostringstream os;
        os << "m1 must lie in (0, 1.5), got " << m1;
        throw std::invalid_argument(os.str());
    }
}

Vec8 RegState::z() const {
    Vec8 out;
    out << Q, P;
    return out;
}

RegState RegState::from_z(const Vec8& z, double s, double t) {
    RegState x;
    x.Q = z.head<4>();
    x.P = z.tail<4>();
    x.s = s;
    x.t = t;
    return x;
}

namespace {

// Pieces of Gamma that depend on Q only. The two mutual m1-m2 terms are
// T(+) and T(-), with
//   T = r / sqrt(D),  D = r^2/4 +- mu BQ + mu^2 (Q3^2 + Q4^2),
//   r = Q1^2 + Q2^2,  BQ = (Q1^2 - Q2^2) Q3 + 2 Q1 Q2 Q4.
struct QTerms {
    double r;
    Vec4 dr;
    Mat4 d2r;
    double bq;
    Vec4 dbq;
    Mat4 d2bq;
    double r34;
    Vec4 dr34;
    Mat4 d2r34;
};

QTerms q_terms(const Vec4& Q) {
    const double q1 = Q[0], q2 = Q[1], q3 = Q[2], q4 = Q[3];
    QTerms t;
    t.r = q1 * q1 + q2 * q2;
    t.dr << 2 * q1, 2 * q2, 0, 0;
    t.d2r.setZero();
    t.d2r(0, 0) = t.d2r(1, 1) = 2;

    t.bq = (q1 * q1 - q2 * q2) * q3 + 2 * q1 * q2 * q4;
    t.dbq << 2 * q1 * q3 + 2 * q2 * q4, -2 * q2 * q3 + 2 * q1 * q4, q1 * q1 - q2 * q2, 2 * q1 * q2;
    t.d2bq << 2 * q3, 2 * q4, 2 * q1, 2 * q2,
              2 * q4, -2 * q3, -2 * q2, 2 * q1,
              2 * q1, -2 * q2, 0, 0,
              2 * q2, 2 * q1, 0, 0;

    t.r34 = q3 * q3 + q4 * q4;
    t.dr34 << 0, 0, 2 * q3, 2 * q4;
    t.d2r34.setZero();
    t.d2r34(2, 2) = t.d2r34(3, 3) = 2;
    return t;
}

double sqrt_argument(const QTerms& t, double mu, double sign) {
    const double d = 0.25 * t.r * t.r + sign * mu * t.bq + mu * mu * t.r34;
    if (!(d > kSingularThreshold)) {
        std::ostringstream os;
        os << "singular configuration: square-root argument " << d
           << (sign > 0 ? " (+ branch)" : " (- branch)");
        throw SingularConfiguration(os.str());
    }
    return d;
}

// Value, gradient and Hessian (w.r.t. Q) of T = r / sqrt(D) for one branch.
struct MutualTerm {
    double value;
    Vec4 grad;
    Mat4 hess;
};

MutualTerm mutual_term(const QTerms& t, double mu, double sign, bool want_hess) {
    const double d = sqrt_argument(t, mu, sign);
    const double inv_sqrt = 1.0 / std::sqrt(d);
    const double inv_d32 = inv_sqrt / d;

    const Vec4 dd = 0.5 * t.r * t.dr + sign * mu * t.dbq + mu * mu * t.dr34;

    MutualTerm out;
    out.value = t.r * inv_sqrt;
    out.grad = inv_sqrt * t.dr - 0.5 * t.r * inv_d32 * dd;
    if (want_hess) {
        const Mat4 d2d = 0.5 * (t.dr * t.dr.transpose() + t.r * t.d2r) + sign * mu * t.d2bq +
                         mu * mu * t.d2r34;
        const double inv_d52 = inv_d32 / d;
        out.hess = inv_sqrt * t.d2r - 0.5 * inv_d32 * (t.dr * dd.transpose() + dd * t.dr.transpose()) +
                   0.75 * t.r * inv_d52 * (dd * dd.transpose()) - 0.5 * t.r * inv_d32 * d2d;
    } else {
        out.hess.setZero();
    }
    return out;
}

double kinetic_coefficient(const MassParams& p) { return 1.0 / p.m1() + 2.0 / p.m2(); }

}  // namespace

double gamma(const Vec8& z, const MassParams& params) {
    const Vec4 Q = z.head<4>();
    const Vec4 P = z.tail<4>();
    const double m1 = params.m1(), m2 = params.m2(), mu = params.mu();
    const QTerms t = q_terms(Q);
    const double c = kinetic_coefficient(params);

    const double tp = mutual_term(t, mu, +1.0, false).value;
    const double tm = mutual_term(t, mu, -1.0, false).value;

    return (P[0] * P[0] + P[1] * P[1]) / (4 * m1) + (P[2] * P[2] + P[3] * P[3]) * t.r * c -
           m1 * m2 * (tp + tm) - m1 * m1 - params.energy() * t.r;
}

Vec8 gamma_grad(const Vec8& z, const MassParams& params) {
    const Vec4 Q = z.head<4>();
    const Vec4 P = z.tail<4>();
    const double m1 = params.m1(), m2 = params.m2(), mu = params.mu();
    const QTerms t = q_terms(Q);
    const double c = kinetic_coefficient(params);
    const double p34 = P[2] * P[2] + P[3] * P[3];

    const MutualTerm tp = mutual_term(t, mu, +1.0, false);
    const MutualTerm tm = mutual_term(t, mu, -1.0, false);

    Vec8 g;
    g.head<4>() = (c * p34 - params.energy()) * t.dr - m1 * m2 * (tp.grad + tm.grad);
    g[4] = P[0] / (2 * m1);
    g[5] = P[1] / (2 * m1);
    g[6] = 2 * c * t.r * P[2];
    g[7] = 2 * c * t.r * P[3];
    return g;
}

Mat8 gamma_hess(const Vec8& z, const MassParams& params) {
    const Vec4 Q = z.head<4>();
    const Vec4 P = z.tail<4>();
    const double m1 = params.m1(), m2 = params.m2(), mu = params.mu();
    const QTerms t = q_terms(Q);
    const double c = kinetic_coefficient(params);
    const double p34 = P[2] * P[2] + P[3] * P[3];

    const MutualTerm tp = mutual_term(t, mu, +1.0, true);
    const MutualTerm tm = mutual_term(t, mu, -1.0, true);

    Mat8 h = Mat8::Zero();
    h.topLeftCorner<4, 4>() = (c * p34 - params.energy()) * t.d2r - m1 * m2 * (tp.hess + tm.hess);

    // Mixed Q-P block: only P3, P4 couple to Q through r.
    Mat4 qp = Mat4::Zero();
    qp.col(2) = 2 * c * P[2] * t.dr;
    qp.col(3) = 2 * c * P[3] * t.dr;
    h.topRightCorner<4, 4>() = qp;
    h.bottomLeftCorner<4, 4>() = qp.transpose();

    h(4, 4) = h(5, 5) = 1.0 / (2 * m1);
    h(6, 6) = h(7, 7) = 2 * c * t.r;
    return h;
}

Vec8 vector_field(const Vec8& z, const MassParams& params) {
    const Vec8 g = gamma_grad(z, params);
    Vec8 f;
    f.head<4>() = g.tail<4>();
    f.tail<4>() = -g.head<4>();
    return f;
}

double angular_momentum(const Vec8& z) {
    return 0.5 * (z[0] * z[5] - z[1] * z[4]) + (z[2] * z[7] - z[3] * z[6]);
}

Vec8 angular_momentum_grad(const Vec8& z) {
    Vec8 g;
    g << 0.5 * z[5], -0.5 * z[4], z[7], -z[6], -0.5 * z[1], 0.5 * z[0], -z[3], z[2];
    return g;
}

double invariant_set_leakage(const Vec8& z) {
    return std::max({std::abs(z[1]), std::abs(z[2]), std::abs(z[5]), std::abs(z[6])});
}

bool in_invariant_set(const Vec8& z, double tol) { return invariant_set_leakage(z) <= tol; }

namespace {

StructureMatrices make_structure() {
    StructureMatrices m;
    Vec8 sdiag;
    sdiag << -1, 1, -1, 1, 1, -1, 1, -1;
    m.S = sdiag.asDiagonal();

    m.Lambda = Mat8::Identity();
    m.Lambda.topLeftCorner<4, 4>() *= -1;

    m.J.setZero();
    m.J.topRightCorner<4, 4>().setIdentity();
    m.J.bottomLeftCorner<4, 4>() = -Mat4::Identity();

    m.Y0.setZero();
    m.Y0(0, 4) = 1;
    m.Y0(1, 2) = 1;
    m.Y0(2, 5) = 1;
    m.Y0(3, 3) = 1;
    m.Y0(4, 0) = -1;
    m.Y0(5, 6) = 1;
    m.Y0(6, 1) = -1;
    m.Y0(7, 7) = 1;
    return m;
}

}  // namespace

const StructureMatrices& structure() {
    static const StructureMatrices m = make_structure();
    return m;
}

bool m_pattern_zero(int row, int col) {
    // Within a 4x4 block, indices {0,3} couple to {0,3} and {1,2} to {1,2}.
    const auto group = [](int i) { return (i % 4 == 0 || i % 4 == 3) ? 0 : 1; };
    return group(row) != group(col);
}

double m2_pattern_violation(const Mat8& m) {
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (m_pattern_zero(i, j)) worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

double m_pattern_violation(const Mat4& m) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (m_pattern_zero(i, j)) worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

}  // namespace broucke
