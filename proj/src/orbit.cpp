#include "broucke/orbit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

namespace broucke {

const char* to_string(OrbitSolveError::Cause cause) {
    switch (cause) {
        case OrbitSolveError::Cause::NoBracket: return "no_bracket";
        case OrbitSolveError::Cause::NotConverged: return "not_converged";
        case OrbitSolveError::Cause::OutOfRange: return "out_of_range";
        case OrbitSolveError::Cause::ShootFailure: return "shoot_failure";
    }
    return "unknown";
}

RegState initial_state(const MassParams& params, double zeta4) {
    if (!(zeta4 > 0.0)) throw std::invalid_argument("initial_state: zeta4 must be positive");
    RegState x;
    x.Q << 0.0, 0.0, 0.0, zeta4;
    x.P << 2.0 * std::pow(params.m1(), 1.5), 0.0, 0.0, 0.0;
    return x;
}

ShootResult shoot(const MassParams& params, double zeta4, const OrbitOptions& opts) {
    FlowOptions fo = default_flow_options(opts.tol);
    fo.stop_event = [](const Vec8& z) { return z[3]; };
    fo.stop_direction = -1;
    try {
        const Trajectory traj = flow(initial_state(params, zeta4), params, opts.s_max, fo);
        const auto [s0, x] = find_section(traj, [](const Vec8& z) { return z[3]; }, -1, opts.tol);
        return {x.P[0], s0, x};
    } catch (const NoCrossing& e) {
        std::ostringstream os;
        os << "shoot at zeta4 = " << zeta4 << ": " << e.what();
        throw OrbitSolveError(OrbitSolveError::Cause::ShootFailure, os.str());
    } catch (const SingularConfiguration& e) {
        std::ostringstream os;
        os << "shoot at zeta4 = " << zeta4 << ": " << e.what();
        throw OrbitSolveError(OrbitSolveError::Cause::ShootFailure, os.str());
    } catch (const StepFailure& e) {
        std::ostringstream os;
        os << "shoot at zeta4 = " << zeta4 << ": " << e.what();
        throw OrbitSolveError(OrbitSolveError::Cause::ShootFailure, os.str());
    }
}

namespace {

struct Probe {
    double zeta4;
    double residual;
};

class Shooter {
public:
    Shooter(const MassParams& params, const OrbitOptions& opts) : params_(params), opts_(opts) {}

    std::optional<Probe> try_eval(double zeta4) {
        ++evaluations;
        try {
            return Probe{zeta4, shoot(params_, zeta4, opts_).residual};
        } catch (const OrbitSolveError&) {
            return std::nullopt;
        }
    }

    double eval(double zeta4) {
        ++evaluations;
        return shoot(params_, zeta4, opts_).residual;
    }

    // Geometric scan zeta4 = start * factor^k; goes downward when the first
    // usable probe is already past the root.
    std::pair<Probe, Probe> bracket() {
        std::optional<Probe> prev;
        for (double z = opts_.scan_start; z <= opts_.scan_max; z *= opts_.scan_factor) {
            const auto p = try_eval(z);
            if (!p) continue;
            if (p->residual == 0.0) return {*p, *p};
            if (prev && (prev->residual > 0.0) != (p->residual > 0.0)) return {*prev, *p};
            if (!prev && p->residual < 0.0) return scan_down(*p);
            prev = p;
        }
        std::ostringstream os;
        os << "no sign change of the section residual for zeta4 in [" << opts_.scan_start << ", "
           << opts_.scan_max << "] at m1 = " << params_.m1();
        throw OrbitSolveError(OrbitSolveError::Cause::NoBracket, os.str());
    }

    std::pair<Probe, Probe> scan_down(Probe upper) {
        for (double z = upper.zeta4 / opts_.scan_factor; z >= opts_.scan_min; z /= opts_.scan_factor) {
            const auto p = try_eval(z);
            if (!p) continue;
            if (p->residual >= 0.0) return {*p, upper};
            upper = *p;
        }
        std::ostringstream os;
        os << "no sign change of the section residual below zeta4 = " << opts_.scan_start
           << " at m1 = " << params_.m1();
        throw OrbitSolveError(OrbitSolveError::Cause::NoBracket, os.str());
    }

    Probe solve_bracket(Probe a, Probe b) {
        if (a.residual == 0.0) return a;
        if (b.residual == 0.0) return b;
        std::uintmax_t iters = static_cast<std::uintmax_t>(opts_.max_iterations);
        auto f = [this](double z) { return eval(z); };
        auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 4e-16 * std::abs(hi); };
        std::pair<double, double> root;
        try {
            root = boost::math::tools::toms748_solve(f, a.zeta4, b.zeta4, a.residual, b.residual, tol, iters);
        } catch (const OrbitSolveError&) {
            throw;
        } catch (const std::exception& e) {
            throw OrbitSolveError(OrbitSolveError::Cause::NotConverged, e.what());
        }
        Probe best{root.first, eval(root.first)};
        if (root.second != root.first) {
            const Probe other{root.second, eval(root.second)};
            if (std::abs(other.residual) < std::abs(best.residual)) best = other;
        }
        return best;
    }

    // Safeguarded secant from a continuation guess. Returns nullopt when the
    // iteration leaves the trust region or stalls.
    std::optional<Probe> secant(double guess) {
        auto p0 = try_eval(guess);
        if (!p0) return std::nullopt;
        if (std::abs(p0->residual) < opts_.residual_tol) return p0;
        auto p1 = try_eval(guess * (1.0 + 1e-6));
        if (!p1) return std::nullopt;
        for (int k = 0; k < 12; ++k) {
            if ((p0->residual > 0.0) != (p1->residual > 0.0)) return solve_bracket(*p0, *p1);
            if (std::abs(p1->residual) < opts_.residual_tol) return p1;
            const double denom = p1->residual - p0->residual;
            if (denom == 0.0) return std::nullopt;
            const double z = p1->zeta4 - p1->residual * (p1->zeta4 - p0->zeta4) / denom;
            if (!(z > 0.5 * guess && z < 2.0 * guess)) return std::nullopt;
            auto p2 = try_eval(z);
            if (!p2) return std::nullopt;
            p0 = p1;
            p1 = p2;
        }
        return std::nullopt;
    }

    int evaluations = 0;

private:
    MassParams params_;
    OrbitOptions opts_;
};

}  // namespace

OrbitSolution find_orbit(const MassParams& params, std::optional<double> guess, const OrbitOptions& opts) {
    if (params.m1() > opts.m1_limit) {
        std::ostringstream os;
        os << "no bracket attempted: m1 = " << params.m1() << " is outside the supported range (0, "
           << opts.m1_limit << "]";
        throw OrbitSolveError(OrbitSolveError::Cause::OutOfRange, os.str());
    }
    Shooter shooter(params, opts);
    std::optional<Probe> found;
    bool warm = false;
    if (guess && *guess > 0.0) {
        try {
            found = shooter.secant(*guess);
        } catch (const OrbitSolveError&) {
            found.reset();
        }
        // A bracket across a jump of the first crossing converges to the jump.
        if (found && !(std::abs(found->residual) < opts.residual_tol)) found.reset();
        warm = found.has_value();
    }
    if (!found) {
        const auto [a, b] = shooter.bracket();
        found = shooter.solve_bracket(a, b);
    }
    if (!(std::abs(found->residual) < opts.residual_tol)) {
        std::ostringstream os;
        os << "shooting residual " << found->residual << " above " << opts.residual_tol << " at m1 = "
           << params.m1();
        throw OrbitSolveError(OrbitSolveError::Cause::NotConverged, os.str());
    }

    const ShootResult final_shot = shoot(params, found->zeta4, opts);
    OrbitSolution orb{params, found->zeta4, final_shot.s0, 4.0 * final_shot.s0, Trajectory(params)};
    orb.quarter = flow(initial_state(params, found->zeta4), params, final_shot.s0, opts.tol);
    orb.zeta1 = final_shot.crossing.Q[0];
    orb.zeta8 = final_shot.crossing.P[3];
    orb.t_period = 4.0 * orb.quarter.sample(orb.quarter.size() - 1).t;
    orb.residual = final_shot.residual;
    orb.iterations = shooter.evaluations;
    orb.warm_started = warm;
    return orb;
}

Trajectory extend_full_period(const OrbitSolution& orb) {
    const Trajectory& q = orb.quarter;
    const double s0 = orb.s0;
    const double t0 = q.sample(q.size() - 1).t;
    const Mat8& S = structure().S;

    // Affine map y -> scale .* y + offset on (Q, P, t).
    struct Mirror {
        Vec9 scale;
        Vec9 offset;
        Vec9 apply(const Vec9& y) const { return scale.cwiseProduct(y) + offset; }
    };
    auto compose = [](const Mirror& m, const Segment& seg, double s_begin) {
        Segment out = seg;
        out.s_begin = s_begin;
        out.reversed = !seg.reversed;
        out.scale = m.scale.cwiseProduct(seg.scale);
        out.offset = m.scale.cwiseProduct(seg.offset) + m.offset;
        return out;
    };

    Trajectory half(orb.params);
    for (std::size_t i = 0; i < q.size(); ++i) half.push(q.s(i), q.raw(i));
    for (const auto& seg : q.segments()) half.push_segment(seg);

    // gamma(s) = -S gamma(2 s0 - s) on [s0, 2 s0]; t(s) = 2 t0 - t(2 s0 - s).
    Mirror second;
    second.scale.head<8>() = -S.diagonal();
    second.scale[8] = -1.0;
    second.offset.setZero();
    second.offset[8] = 2.0 * t0;
    for (std::size_t k = q.size() - 1; k-- > 0;) {
        half.push(2.0 * s0 - q.s(k), second.apply(q.raw(k)));
        const Segment& seg = q.segments()[k];
        half.push_segment(compose(second, seg, 2.0 * s0 - (seg.s_begin + seg.h)));
    }

    // gamma(s) = S gamma(4 s0 - s) on [2 s0, 4 s0]; t(s) = 4 t0 - t(4 s0 - s).
    Mirror third;
    third.scale.head<8>() = S.diagonal();
    third.scale[8] = -1.0;
    third.offset.setZero();
    third.offset[8] = 4.0 * t0;
    Trajectory full(orb.params);
    for (std::size_t i = 0; i < half.size(); ++i) full.push(half.s(i), half.raw(i));
    for (const auto& seg : half.segments()) full.push_segment(seg);
    for (std::size_t k = half.size() - 1; k-- > 0;) {
        full.push(4.0 * s0 - half.s(k), third.apply(half.raw(k)));
        const Segment& seg = half.segments()[k];
        full.push_segment(compose(third, seg, 4.0 * s0 - (seg.s_begin + seg.h)));
    }
    full.diagnostics = q.diagnostics;
    return full;
}

}  // namespace broucke
