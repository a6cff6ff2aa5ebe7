#include "broucke/stability.hpp"

#include <algorithm>
#include <cmath>

namespace broucke {

namespace {

double inf_norm(const Mat8& m) { return m.cwiseAbs().maxCoeff(); }

double frame_symplectic_residual(const Mat8& Y) {
    const auto& st = structure();
    const Mat8 M = Y * st.Y0.transpose();
    return inf_norm(M.transpose() * st.J * M - st.J);
}

}  // namespace

FrameTrajectory quarter_frame_trajectory(const OrbitSolution& orb, double tol) {
    return flow_with_frame(initial_state(orb.params, orb.zeta4), structure().Y0, orb.params, orb.s0, tol);
}

Mat8 quarter_frame(const OrbitSolution& orb, double tol) { return quarter_frame_trajectory(orb, tol).frames.back(); }

Mat4 k_matrix(const Mat8& B) {
    const auto& st = structure();
    const Mat8 sj = st.S * st.J;
    Mat4 K;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) K(i, j) = B.col(i).dot(sj * B.col(j + 4));
    return K;
}

Mat8 symplectic_inverse(const Mat8& B) {
    const Mat8& J = structure().J;
    return -J * B.transpose() * J;
}

Mat8 w_matrix(const Mat8& B) {
    const auto& st = structure();
    return st.Y0.transpose() * st.S * st.Y0 * symplectic_inverse(B) * st.S * B;
}

MonodromyData monodromy_data_from_frame(const Mat8& B) {
    MonodromyData md;
    md.B = B;
    md.W = w_matrix(B);
    md.K = k_matrix(B);
    md.L1 = md.W.topRightCorner<4, 4>();
    md.L2 = md.W.bottomLeftCorner<4, 4>();
    md.k11 = md.K(0, 0);
    md.a = md.K(1, 1);
    md.b = md.K(1, 2);
    md.c = md.K(2, 1);
    md.d = md.K(2, 2);
    md.e = md.K(3, 3);
    return md;
}

MonodromyData monodromy_data(const OrbitSolution& orb, double tol) {
    const FrameTrajectory ft = quarter_frame_trajectory(orb, tol);
    MonodromyData md = monodromy_data_from_frame(ft.frames.back());
    for (const Mat8& Y : ft.frames) {
        md.frame_symplectic = std::max(md.frame_symplectic, frame_symplectic_residual(Y));
        md.frame_leakage = std::max(md.frame_leakage, m2_pattern_violation(Y));
    }
    for (std::size_t i = 0; i < ft.base.size(); ++i)
        md.state_leakage = std::max(md.state_leakage, invariant_set_leakage(ft.base.raw(i).head<8>()));
    md.gamma_drift = std::max(ft.base.diagnostics.gamma_drift, orb.quarter.diagnostics.gamma_drift);
    md.a_drift = std::max(ft.base.diagnostics.a_drift, orb.quarter.diagnostics.a_drift);
    return md;
}

double StructureResiduals::worst() const {
    return std::max({left_relations(), sparsity, k11, first_column, left_eig});
}

Vec4 left_eigenvector(const MassParams& params, double zeta4) {
    const auto& st = structure();
    const Vec8 g = angular_momentum_grad(initial_state(params, zeta4).z());
    const Eigen::Matrix<double, 1, 8> row = g.transpose() * st.Y0;
    // Sign chosen so the vector reads (0, -zeta4, m1^{3/2}, 0).
    return -row.head<4>().transpose();
}

StructureResiduals verify_structure(const MonodromyData& md, const MassParams& params, double zeta4) {
    const auto& st = structure();
    const double m32 = std::pow(params.m1(), 1.5);
    StructureResiduals r;
    r.rel_i = -zeta4 * md.a + m32 * md.b - zeta4;
    r.rel_ii = -zeta4 * md.c + m32 * md.d + m32;
    const double tz = 2.0 * params.mu() * zeta4;
    r.rel_i_mass_weighted = -tz * md.a + m32 * md.b - tz;
    r.sparsity = m_pattern_violation(md.K);
    r.k11 = std::abs(md.k11 + 1.0);
    r.first_column = std::max({std::abs(md.K(0, 0) + 1.0), std::abs(md.K(1, 0)), std::abs(md.K(2, 0)),
                               std::abs(md.K(3, 0))});
    const Vec4 w = left_eigenvector(params, zeta4);
    r.left_eig = (md.K * w + w).cwiseAbs().maxCoeff();
    r.w_symplectic = inf_norm(md.W.transpose() * st.J * md.W - st.J);
    Mat8 block = Mat8::Zero();
    block.topLeftCorner<4, 4>() = md.K.transpose();
    block.bottomRightCorner<4, 4>() = md.K;
    const Mat8 w_inv = symplectic_inverse(md.W);
    r.block_form = inf_norm(0.5 * (md.W + w_inv) - block);
    return r;
}

StructureResiduals verify_structure(const MonodromyData& md, const OrbitSolution& orb) {
    return verify_structure(md, orb.params, orb.zeta4);
}

const char* to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::None: return "none";
        case Degeneracy::Crossing: return "crossing";
        case Degeneracy::UnitEigenvalue: return "unit_eigenvalue";
        case Degeneracy::ZeroEigenvalue: return "zero_eigenvalue";
        case Degeneracy::DoubledAngle: return "doubled_angle";
        case Degeneracy::Boundary: return "boundary";
        case Degeneracy::Unreliable: return "unreliable";
    }
    return "unknown";
}

std::pair<std::complex<double>, std::complex<double>> central_block_eigenvalues(double a, double b, double c,
                                                                                 double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        // Larger-magnitude root first, the other from the product to avoid cancellation.
        const double l1 = 0.5 * tr + std::copysign(root, tr == 0.0 ? 1.0 : tr);
        const double l2 = l1 != 0.0 ? det / l1 : 0.5 * tr - std::copysign(root, tr == 0.0 ? 1.0 : tr);
        return {l1, l2};
    }
    const double im = std::sqrt(-disc);
    return {{0.5 * tr, im}, {0.5 * tr, -im}};
}

StabilityRecord classify(const MonodromyData& md, const OrbitSolution& orb, const ClassifyOptions& opts) {
    StabilityRecord rec;
    rec.m1 = orb.params.m1();
    rec.m2 = orb.params.m2();
    rec.zeta4 = orb.zeta4;
    rec.s0 = orb.s0;
    rec.t_period = orb.t_period;
    rec.k11 = md.k11;
    rec.a = md.a;
    rec.b = md.b;
    rec.c = md.c;
    rec.d = md.d;
    rec.e = md.e;
    rec.eig2 = md.a + md.d + 1.0;
    rec.eig2_det = -(md.a * md.d - md.b * md.c);

    const StructureResiduals res = verify_structure(md, orb);
    rec.res_left_eig = res.left_relations();
    rec.res_sparsity = res.sparsity;
    rec.res_first_column = res.first_column;
    rec.res_symplectic = md.frame_symplectic;
    rec.res_leakage = md.state_leakage;
    rec.gamma_drift = md.gamma_drift;
    rec.a2_drift = md.a_drift;
    rec.reliable = res.worst() < opts.residual_gate;

    const double ae = std::abs(rec.e);
    const double a2 = std::abs(rec.eig2);
    const bool on_boundary = std::abs(ae - 1.0) <= opts.boundary || std::abs(a2 - 1.0) <= opts.boundary;
    rec.stable_2df = ae < 1.0 && std::abs(ae - 1.0) > opts.boundary;
    rec.spectral_4df = ae <= 1.0 && a2 <= 1.0;

    if (!rec.reliable) {
        rec.degenerate = Degeneracy::Unreliable;
    } else if (rec.spectral_4df) {
        const double delta = opts.delta;
        const auto doubled = [](double x) { return std::cos(2.0 * std::acos(std::clamp(x, -1.0, 1.0))); };
        if (on_boundary)
            rec.degenerate = Degeneracy::Boundary;
        else if (std::abs(rec.e - rec.eig2) < delta)
            rec.degenerate = Degeneracy::Crossing;
        else if (std::abs(rec.eig2 - 1.0) < delta || std::abs(rec.eig2 + 1.0) < delta)
            rec.degenerate = Degeneracy::UnitEigenvalue;
        else if (std::abs(rec.eig2) < delta)
            rec.degenerate = Degeneracy::ZeroEigenvalue;
        else if (std::abs(doubled(rec.e) - doubled(rec.eig2)) < delta)
            rec.degenerate = Degeneracy::DoubledAngle;
    } else if (on_boundary && ae <= 1.0 + opts.boundary) {
        rec.degenerate = Degeneracy::Boundary;
    }
    rec.linear_4df = rec.spectral_4df && rec.reliable && rec.degenerate == Degeneracy::None;
    return rec;
}

std::vector<std::complex<double>> spectrum(const Mat8& m) {
    Eigen::EigenSolver<Mat8> solver(m, false);
    const auto ev = solver.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](auto x, auto y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

std::vector<std::complex<double>> monodromy_oracle(const OrbitSolution& orb, double tol) {
    const FrameTrajectory ft =
        flow_with_frame(initial_state(orb.params, orb.zeta4), structure().Y0, orb.params, orb.T, tol);
    return spectrum(structure().Y0.transpose() * ft.frames.back());
}

double hausdorff_distance(const std::vector<std::complex<double>>& x, const std::vector<std::complex<double>>& y) {
    auto directed = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(x, y), directed(y, x));
}

StabilityRecord analyze(const MassParams& params, std::optional<double> guess, const OrbitOptions& orbit_opts,
                        const ClassifyOptions& opts) {
    try {
        const OrbitSolution orb = find_orbit(params, guess, orbit_opts);
        const MonodromyData md = monodromy_data(orb, orbit_opts.tol);
        return classify(md, orb, opts);
    } catch (const OrbitSolveError& e) {
        StabilityRecord rec;
        rec.m1 = params.m1();
        rec.m2 = params.m2();
        rec.status = to_string(e.cause());
        rec.reliable = false;
        return rec;
    } catch (const std::runtime_error&) {
        StabilityRecord rec;
        rec.m1 = params.m1();
        rec.m2 = params.m2();
        rec.status = "integration_failure";
        rec.reliable = false;
        return rec;
    }
}

}  // namespace broucke
