#pragma once

#include <complex>
#include <string>
#include <vector>

#include "broucke/orbit.hpp"

namespace broucke {

/// Quarter-period factorization of the monodromy:
///   W = Y0^{-1} S Y0 B^{-1} S B,  B = Y(T/4),  W = [[K^T, L1], [L2, K]].
struct MonodromyData {
    Mat8 B;
    Mat8 W;
    Mat4 K;
    Mat4 L1;
    Mat4 L2;
    double k11 = 0.0, a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
    double frame_symplectic = 0.0;  // max over samples of ||(Y Y0^{-1})^T J (Y Y0^{-1}) - J||_inf
    double frame_leakage = 0.0;     // max pattern violation of Y(s) over the quarter
    double gamma_drift = 0.0;
    double a_drift = 0.0;
    double state_leakage = 0.0;     // max |Q2|,|Q3|,|P2|,|P3| along the quarter
};

/// B = Y(s0) with Y(0) = Y0, co-integrated along the quarter orbit.
FrameTrajectory quarter_frame_trajectory(const OrbitSolution& orb, double tol = 1e-12);
Mat8 quarter_frame(const OrbitSolution& orb, double tol = 1e-12);

/// K[i][j] = c_i^T S J c_{j+4} for the columns c of B; no inversion.
Mat4 k_matrix(const Mat8& B);

/// Symplectic inverse -J B^T J.
Mat8 symplectic_inverse(const Mat8& B);
Mat8 w_matrix(const Mat8& B);

MonodromyData monodromy_data(const OrbitSolution& orb, double tol = 1e-12);
MonodromyData monodromy_data_from_frame(const Mat8& B);

struct StructureResiduals {
    double rel_i = 0.0;         // -zeta4 a + m1^{3/2} b - zeta4
    double rel_ii = 0.0;        // -zeta4 c + m1^{3/2} d + m1^{3/2}
    double sparsity = 0.0;      // K entries outside the pattern
    double k11 = 0.0;           // |k11 + 1|
    double first_column = 0.0;  // ||K e1 + e1||_inf
    double left_eig = 0.0;      // ||K w + w||_inf, w = (0, -zeta4, m1^{3/2}, 0)
    double w_symplectic = 0.0;  // ||W^T J W - J||_inf
    double block_form = 0.0;    // ||(W + W^{-1})/2 - blockdiag(K^T, K)||_inf
    // Relation (i) with the coefficient 2 mu zeta4 in place of zeta4, for comparison.
    double rel_i_mass_weighted = 0.0;

    double left_relations() const { return std::max(std::abs(rel_i), std::abs(rel_ii)); }
    double worst() const;
};

/// Left eigenvector grad A(gamma(0)) Y0 restricted to its first four entries.
Vec4 left_eigenvector(const MassParams& params, double zeta4);

StructureResiduals verify_structure(const MonodromyData& md, const OrbitSolution& orb);
StructureResiduals verify_structure(const MonodromyData& md, const MassParams& params, double zeta4);

enum class Degeneracy { None, Crossing, UnitEigenvalue, ZeroEigenvalue, DoubledAngle, Boundary, Unreliable };
const char* to_string(Degeneracy d);

struct ClassifyOptions {
    double delta = 1e-3;             // degeneracy window
    double boundary = 1e-9;          // |e| = 1 within this is degenerate
    double residual_gate = 1e-4;     // structure residuals above this mark the record unreliable
};

struct StabilityRecord {
    double m1 = 0.0;
    double m2 = 0.0;
    double zeta4 = 0.0;
    double s0 = 0.0;
    double t_period = 0.0;
    double k11 = 0.0, a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
    double eig2 = 0.0;      // a + d + 1
    double eig2_det = 0.0;  // -(a d - b c)
    double res_left_eig = 0.0;
    double res_sparsity = 0.0;
    double res_symplectic = 0.0;
    double res_first_column = 0.0;
    double res_leakage = 0.0;
    double gamma_drift = 0.0;
    double a2_drift = 0.0;
    bool stable_2df = false;
    bool spectral_4df = false;
    bool linear_4df = false;
    Degeneracy degenerate = Degeneracy::None;
    std::string status = "ok";  // "ok" or a failure cause
    bool reliable = true;

    bool ok() const { return status == "ok"; }
};

/// Eigenvalues of the 2x2 block [[a, b], [c, d]] from trace and determinant.
std::pair<std::complex<double>, std::complex<double>> central_block_eigenvalues(double a, double b, double c,
                                                                                 double d);

StabilityRecord classify(const MonodromyData& md, const OrbitSolution& orb, const ClassifyOptions& opts = {});

/// Direct oracle: spectrum of Y0^{-1} Y(T) from one full-period integration.
std::vector<std::complex<double>> monodromy_oracle(const OrbitSolution& orb, double tol = 1e-12);
std::vector<std::complex<double>> spectrum(const Mat8& m);
/// Hausdorff distance between two finite point sets in the complex plane.
double hausdorff_distance(const std::vector<std::complex<double>>& x, const std::vector<std::complex<double>>& y);

/// Solve, integrate and classify one mass.
StabilityRecord analyze(const MassParams& params, std::optional<double> guess = std::nullopt,
                        const OrbitOptions& orbit_opts = {}, const ClassifyOptions& opts = {});

}  // namespace broucke
