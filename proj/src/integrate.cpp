#include "broucke/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

namespace broucke {

namespace {

using Vec73 = Eigen::Matrix<double, 73, 1>;

bool crossed(double before, double after, int direction) {
    if (direction < 0) return before > 0.0 && after <= 0.0;
    if (direction > 0) return before < 0.0 && after >= 0.0;
    return (before > 0.0 && after <= 0.0) || (before < 0.0 && after >= 0.0);
}

Segment segment_from(const dop853::DenseStep<9>& step) {
    Segment seg;
    seg.s_begin = step.s_begin;
    seg.h = step.h;
    seg.rc = step.rc;
    return seg;
}

template <int N>
Segment segment_from_head(const dop853::DenseStep<N>& step) {
    Segment seg;
    seg.s_begin = step.s_begin;
    seg.h = step.h;
    for (int k = 0; k < 8; ++k) seg.rc[k] = step.rc[k].template head<9>();
    return seg;
}

void update_drift(Trajectory& traj, const Vec8& z, double gamma0, double a0) {
    traj.diagnostics.gamma_drift = std::max(traj.diagnostics.gamma_drift, std::abs(gamma(z, traj.params()) - gamma0));
    traj.diagnostics.a_drift = std::max(traj.diagnostics.a_drift, std::abs(angular_momentum(z) - a0));
}

Vec9 pack(const RegState& x) {
    Vec9 y;
    y << x.Q, x.P, x.t;
    return y;
}

}  // namespace

Vec9 Segment::eval(double s) const {
    double th = (s - s_begin) / h;
    if (reversed) th = 1.0 - th;
    const double th1 = 1.0 - th;
    const Vec9 p =
        rc[0] + th * (rc[1] + th1 * (rc[2] + th * (rc[3] + th1 * (rc[4] + th * (rc[5] + th1 * (rc[6] + th * rc[7]))))));
    return scale.cwiseProduct(p) + offset;
}

RegState Trajectory::sample(std::size_t i) const {
    return RegState::from_z(y_[i].head<8>(), s_[i], y_[i][8]);
}

RegState Trajectory::state_at(double s) const {
    if (s_.empty() || s < s_.front() || s > s_.back()) throw std::out_of_range("state_at: s outside trajectory");
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    if (i + 1 >= s_.size()) return sample(s_.size() - 1);
    if (s == s_[i]) return sample(i);
    if (segments_.size() + 1 != s_.size()) throw std::logic_error("state_at: trajectory has no dense output");
    const Vec9 y = segments_[i].eval(s);
    return RegState::from_z(y.head<8>(), s, y[8]);
}

void Trajectory::make_increasing() {
    if (s_.size() < 2 || s_.front() < s_.back()) return;
    std::reverse(s_.begin(), s_.end());
    std::reverse(y_.begin(), y_.end());
    std::reverse(segments_.begin(), segments_.end());
    for (auto& seg : segments_) {
        // A step from s_a with h < 0 covers [s_a + h, s_a] read backwards.
        if (seg.h < 0.0) {
            seg.s_begin += seg.h;
            seg.h = -seg.h;
            seg.reversed = !seg.reversed;
        }
    }
}

void flow_rhs(const MassParams& params, const Vec9& y, Vec9& dy) {
    const Vec8 z = y.head<8>();
    dy.head<8>() = vector_field(z, params);
    dy[8] = time_rate(z);
}

Trajectory flow(const RegState& start, const MassParams& params, double s_end, const FlowOptions& opts) {
    Trajectory traj(params);
    const Vec9 y0 = pack(start);
    traj.push(start.s, y0);
    const Vec8 z0 = start.z();
    const double g0 = gamma(z0, params);
    const double a0 = angular_momentum(z0);
    double ev_prev = opts.stop_event ? opts.stop_event(z0) : 0.0;

    auto rhs = [&params](double, const Vec9& y, Vec9& dy) { flow_rhs(params, y, dy); };
    auto observer = [&](const dop853::DenseStep<9>& step) {
        traj.push(step.s_begin + step.h, step.y_end);
        traj.push_segment(segment_from(step));
        const Vec8 z = step.y_end.head<8>();
        update_drift(traj, z, g0, a0);
        if (opts.stop_event) {
            const double ev = opts.stop_event(z);
            if (crossed(ev_prev, ev, opts.stop_direction)) return false;
            ev_prev = ev;
        }
        return true;
    };
    traj.diagnostics.stats = dop853::integrate<9>(rhs, start.s, y0, s_end, opts.tol, true, observer);
    traj.make_increasing();
    return traj;
}

FrameTrajectory flow_with_frame(const RegState& start, const Mat8& y0, const MassParams& params, double s_end,
                                const FlowOptions& opts) {
    FrameTrajectory out{Trajectory(params), {}};
    Vec73 init;
    init.head<9>() = pack(start);
    init.tail<64>() = Eigen::Map<const Eigen::Matrix<double, 64, 1>>(y0.data());
    out.base.push(start.s, init.head<9>());
    out.frames.push_back(y0);
    const Vec8 z0 = start.z();
    const double g0 = gamma(z0, params);
    const double a0 = angular_momentum(z0);
    const Mat8& J = structure().J;

    auto rhs = [&](double, const Vec73& y, Vec73& dy) {
        const Vec8 z = y.head<8>();
        dy.head<8>() = vector_field(z, params);
        dy[8] = time_rate(z);
        const Mat8 a = J * gamma_hess(z, params);
        Eigen::Map<const Mat8> frame(y.data() + 9);
        Eigen::Map<Mat8> dframe(dy.data() + 9);
        dframe.noalias() = a * frame;
    };
    double ev_prev = opts.stop_event ? opts.stop_event(z0) : 0.0;
    auto observer = [&](const dop853::DenseStep<73>& step) {
        out.base.push(step.s_begin + step.h, step.y_end.head<9>());
        out.base.push_segment(segment_from_head<73>(step));
        out.frames.push_back(Eigen::Map<const Mat8>(step.y_end.data() + 9));
        update_drift(out.base, step.y_end.head<8>(), g0, a0);
        if (opts.stop_event) {
            const double ev = opts.stop_event(step.y_end.head<8>());
            if (crossed(ev_prev, ev, opts.stop_direction)) return false;
            ev_prev = ev;
        }
        return true;
    };
    out.base.diagnostics.stats = dop853::integrate<73>(rhs, start.s, init, s_end, opts.tol, true, observer);
    if (out.base.size() > 1 && out.base.s_front() > out.base.s_back()) {
        out.base.make_increasing();
        std::reverse(out.frames.begin(), out.frames.end());
    }
    return out;
}

std::pair<double, RegState> find_section(const Trajectory& traj, const std::function<double(const Vec8&)>& g,
                                         int direction, double tol) {
    const MassParams& params = traj.params();
    auto rhs = [&params](double, const Vec9& y, Vec9& dy) { flow_rhs(params, y, dy); };

    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double ga = g(traj.raw(i).head<8>());
        const double gb = g(traj.raw(i + 1).head<8>());
        if (!crossed(ga, gb, direction)) continue;

        const double sa = traj.s(i);
        const double h = traj.s(i + 1) - sa;
        if (gb == 0.0) return {traj.s(i + 1), traj.sample(i + 1)};

        const Vec9 ya = traj.raw(i);
        auto state_after = [&](double sigma) { return dop853::single_step<9>(rhs, sa, ya, sigma); };
        auto phi = [&](double sigma) { return sigma == 0.0 ? ga : g(state_after(sigma).head<8>()); };

        // Exact single-step endpoint agrees with the stored sample only up to
        // roundoff; keep the bracket honest.
        const double fb = phi(h);
        double lo = 0.0, hi = h, flo = ga, fhi = fb;
        if (!(flo * fhi < 0.0)) {
            if (fhi == 0.0) {
                const Vec9 y = state_after(h);
                return {sa + h, RegState::from_z(y.head<8>(), sa + h, y[8])};
            }
            throw NoCrossing("find_section: bracket lost during refinement");
        }
        std::uintmax_t iters = 200;
        auto width_ok = [h](double a, double b) { return std::abs(b - a) <= 1e-16 * std::abs(h) + 1e-300; };
        const auto root = boost::math::tools::toms748_solve(phi, lo, hi, flo, fhi, width_ok, iters);
        double sigma = 0.5 * (root.first + root.second);
        // Pick the bracket end with smaller |g| when that is tighter.
        double best = std::abs(phi(sigma));
        for (double cand : {root.first, root.second}) {
            const double v = std::abs(phi(cand));
            if (v < best) {
                best = v;
                sigma = cand;
            }
        }
        if (best > tol) {
            std::ostringstream os;
            os << "find_section: refinement reached |g| = " << best;
            throw NoCrossing(os.str());
        }
        const Vec9 y = sigma == 0.0 ? ya : state_after(sigma);
        return {sa + sigma, RegState::from_z(y.head<8>(), sa + sigma, y[8])};
    }
    throw NoCrossing("find_section: no sign change with the requested direction");
}

}  // namespace broucke
