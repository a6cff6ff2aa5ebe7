#pragma once

#include <stdexcept>

#include "broucke/dynamics.hpp"

// Coordinate chain for the isosceles problem:
//
//   Cartesian (q, p)  --F1-->  relative (u, v)  --F2-->  regularized (Q, P)
//
// The first map takes differences and sums of the two m1 bodies. The second
// is the Levi-Civita squaring (Q1 + i Q2)^2 = u1 + i u2. The reduced
// Hamiltonians H0, H1, H2 and the angular momenta A0, A1, A2 at each level
// are provided as cross-checks. Production code never leaves (Q, P).
namespace broucke::transforms {

using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Raised when a transform needs Q1^2 + Q2^2 > 0 and gets a collision.
class CollisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Positions q1..q6 and momenta p1..p6. Bodies 1, 2 (mass m1) occupy
/// (q1,q2), (q3,q4); body 3 (mass m2) occupies (q5,q6).
struct CartesianState {
    Vec6 q = Vec6::Zero();
    Vec6 p = Vec6::Zero();
};

struct RelativeState {
    Vec4 u = Vec4::Zero();
    Vec4 v = Vec4::Zero();
};

enum class Branch { Plus, Minus };

RelativeState cart_to_rel(const CartesianState& c);
CartesianState rel_to_cart(const RelativeState& r, const MassParams& params);

RelativeState reg_to_rel(const RegState& x);
RegState rel_to_reg(const RelativeState& r, Branch branch = Branch::Plus);

double h0(const CartesianState& c, const MassParams& params);
double h1(const RelativeState& r, const MassParams& params);
double h2(const RegState& x, const MassParams& params);

double a0(const CartesianState& c);
double a1(const RelativeState& r, const MassParams& params);
/// A0 carried through the chain into (Q, P). This is not the quantity the
/// Gamma flow conserves off the isosceles subspace; see
/// broucke::angular_momentum for that.
double a2_chain(const RegState& x, const MassParams& params);

/// Center-of-mass residuals m1(q1+q3)+m2 q5, m1(q2+q4)+m2 q6 and net momentum.
double center_of_mass_residual(const CartesianState& c, const MassParams& params);
double net_momentum_residual(const CartesianState& c);

}  // namespace broucke::transforms
