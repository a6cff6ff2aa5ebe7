#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace broucke {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Raised when the regularized Hamiltonian is evaluated at an unregularized
/// collision (an m1-m2 binary collision or the triple collision).
class SingularConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mass parameters for the isosceles problem with the normalization
/// 2 m1 + m2 = 3. m2 and mu are derived, never stored.
class MassParams {
public:
    explicit MassParams(double m1, double energy = -1.0);

    double m1() const { return m1_; }
    double m2() const { return 3.0 - 2.0 * m1_; }
    double mu() const { return 0.5 + m1_ / m2(); }
    double energy() const { return energy_; }

private:
    double m1_;
    double energy_;
};

/// Regularized phase point. `s` is fictitious time, `t` physical time.
struct RegState {
    Vec4 Q = Vec4::Zero();
    Vec4 P = Vec4::Zero();
    double s = 0.0;
    double t = 0.0;

    Vec8 z() const;
    static RegState from_z(const Vec8& z, double s = 0.0, double t = 0.0);
};

// Square-root arguments below this are treated as an unregularized collision.
inline constexpr double kSingularThreshold = 1e-30;

double gamma(const Vec8& z, const MassParams& params);
Vec8 gamma_grad(const Vec8& z, const MassParams& params);
Mat8 gamma_hess(const Vec8& z, const MassParams& params);

inline double gamma(const RegState& x, const MassParams& p) { return gamma(x.z(), p); }
inline Vec8 gamma_grad(const RegState& x, const MassParams& p) { return gamma_grad(x.z(), p); }
inline Mat8 gamma_hess(const RegState& x, const MassParams& p) { return gamma_hess(x.z(), p); }

/// Vector field J * DGamma.
Vec8 vector_field(const Vec8& z, const MassParams& params);

/// dt/ds = Q1^2 + Q2^2.
inline double time_rate(const Vec8& z) { return z[0] * z[0] + z[1] * z[1]; }

/// Angular momentum conserved by the Gamma flow: the generator of the
/// rotation (Q1,Q2) -> e^{i theta/2}(Q1,Q2), (Q3,Q4) -> e^{i theta}(Q3,Q4).
///   A = 1/2 (Q1 P2 - Q2 P1) + (Q3 P4 - Q4 P3)
double angular_momentum(const Vec8& z);
inline double angular_momentum(const RegState& x) { return angular_momentum(x.z()); }
Vec8 angular_momentum_grad(const Vec8& z);

/// True iff max(|Q2|, |Q3|, |P2|, |P3|) <= tol.
bool in_invariant_set(const Vec8& z, double tol);
inline bool in_invariant_set(const RegState& x, double tol) { return in_invariant_set(x.z(), tol); }
double invariant_set_leakage(const Vec8& z);

/// Constant matrices of the symmetry-reduced stability analysis.
struct StructureMatrices {
    Mat8 S;       // diag(-1, 1, -1, 1, 1, -1, 1, -1)
    Mat8 Lambda;  // blockdiag(-I, I)
    Mat8 J;       // [[0, I], [-I, 0]]
    Mat8 Y0;      // orthogonal, symplectic; -Y0^{-1} S Y0 = Lambda
};

const StructureMatrices& structure();

/// Entries that must vanish for an 8x8 matrix whose 4x4 blocks have the
/// pattern [[*,0,0,*],[0,*,*,0],[0,*,*,0],[*,0,0,*]].
bool m_pattern_zero(int row, int col);
double m2_pattern_violation(const Mat8& m);
double m_pattern_violation(const Mat4& m);

}  // namespace broucke
