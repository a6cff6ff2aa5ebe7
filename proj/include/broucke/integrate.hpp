#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "broucke/dop853.hpp"
#include "broucke/dynamics.hpp"

namespace broucke {

/// Regularized state with physical time appended: (Q, P, t).
using Vec9 = Eigen::Matrix<double, 9, 1>;

class NoCrossing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense segment over [s_begin, s_begin + h], h > 0. The stored polynomial may
/// be read backwards and mapped through y -> scale .* y + offset, which is how
/// symmetry-extended pieces reuse integrated steps.
struct Segment {
    double s_begin = 0.0;
    double h = 0.0;
    std::array<Vec9, 8> rc;
    bool reversed = false;
    Vec9 scale = Vec9::Ones();
    Vec9 offset = Vec9::Zero();

    Vec9 eval(double s) const;
};

struct TrajectoryDiagnostics {
    double gamma_drift = 0.0;  // max |Gamma(z(s)) - Gamma(z(s_0))|
    double a_drift = 0.0;      // same for the angular momentum
    IntegrationStats stats;
};

class Trajectory {
public:
    explicit Trajectory(MassParams params) : params_(params) {}

    const MassParams& params() const { return params_; }
    std::size_t size() const { return s_.size(); }
    double s(std::size_t i) const { return s_[i]; }
    const Vec9& raw(std::size_t i) const { return y_[i]; }
    RegState sample(std::size_t i) const;
    double s_front() const { return s_.front(); }
    double s_back() const { return s_.back(); }
    const std::vector<Segment>& segments() const { return segments_; }

    /// Dense interpolation; throws std::out_of_range outside the samples.
    RegState state_at(double s) const;

    TrajectoryDiagnostics diagnostics;

    void push(double s, const Vec9& y) {
        s_.push_back(s);
        y_.push_back(y);
    }
    void push_segment(const Segment& seg) { segments_.push_back(seg); }
    /// Reorders a backward-integrated trajectory so samples increase in s.
    void make_increasing();

private:
    MassParams params_;
    std::vector<double> s_;
    std::vector<Vec9> y_;
    std::vector<Segment> segments_;
};

/// Trajectory plus the fundamental matrix Y(s) at every sample.
struct FrameTrajectory {
    Trajectory base;
    std::vector<Mat8> frames;
};

struct FlowOptions {
    Tolerances tol;
    // Optional stop condition: integration halts after the first accepted
    // step across which stop_event changes sign in stop_direction
    // (-1 decreasing, +1 increasing, 0 either).
    std::function<double(const Vec8&)> stop_event;
    int stop_direction = -1;
};

inline FlowOptions default_flow_options(double tol = 1e-12) {
    FlowOptions o;
    o.tol.rtol = tol;
    o.tol.atol = tol;
    return o;
}

/// Right-hand sides: (J DGamma, dt/ds) and the co-integrated frame.
void flow_rhs(const MassParams& params, const Vec9& y, Vec9& dy);

/// Propagates the regularized flow from `start` over [start.s, s_end].
Trajectory flow(const RegState& start, const MassParams& params, double s_end, const FlowOptions& opts);
inline Trajectory flow(const RegState& start, const MassParams& params, double s_end, double tol = 1e-12) {
    return flow(start, params, s_end, default_flow_options(tol));
}

/// Co-integrates the state with the 64 entries of Y, Y' = J D^2Gamma(z) Y.
FrameTrajectory flow_with_frame(const RegState& start, const Mat8& y0, const MassParams& params, double s_end,
                                const FlowOptions& opts);
inline FrameTrajectory flow_with_frame(const RegState& start, const Mat8& y0, const MassParams& params,
                                       double s_end, double tol = 1e-12) {
    return flow_with_frame(start, y0, params, s_end, default_flow_options(tol));
}

/// First crossing of g = 0 with the requested direction, refined by root
/// finding on exact single integrator steps from the preceding sample.
/// Throws NoCrossing if none exists.
std::pair<double, RegState> find_section(const Trajectory& traj, const std::function<double(const Vec8&)>& g,
                                         int direction, double tol = 1e-12);

}  // namespace broucke
