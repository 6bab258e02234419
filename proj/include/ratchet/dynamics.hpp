#ifndef RATCHET_DYNAMICS_HPP
#define RATCHET_DYNAMICS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "ratchet/forcing.hpp"
#include "ratchet/integrate.hpp"
#include "ratchet/potential.hpp"

namespace ratchet {

struct State {
    double x = 0.0; // unwrapped position on the real line
    double v = 0.0;
};

struct Trajectory {
    std::vector<double> t, x, v;
    long steps = 0;
    long rejected = 0;
    double max_error_estimate = 0.0;
};

namespace detail {

// Position is integrated wrapped to [0, 2*pi) with an integer winding count,
// so the error weights never loosen as the unwrapped drift grows.
struct Winding {
    long long turns = 0;

    double unwrapped(const Vec<2>& y) const { return y[0] + two_pi * static_cast<double>(turns); }

    void normalize(Vec<2>& y) {
        while (y[0] >= two_pi) {
            y[0] -= two_pi;
            ++turns;
        }
        while (y[0] < 0.0) {
            y[0] += two_pi;
            --turns;
        }
    }
};

inline double dynamics_scale(const Vec<2>& y, std::size_t i) {
    return i == 0 ? two_pi : std::abs(y[1]);
}

struct AutonomousRhs {
    const PeriodicPotential* pot;
    double field, gamma;
    void operator()(double, const Vec<2>& y, Vec<2>& dy) const {
        dy[0] = y[1];
        dy[1] = field - pot->slope(y[0]) - gamma * y[1];
    }
};

struct DrivenRhs {
    const PeriodicPotential* pot;
    const DrivingProtocol* proto;
    double gamma;
    void operator()(double t, const Vec<2>& y, Vec<2>& dy) const {
        dy[0] = y[1];
        dy[1] = eval_driving_at_fast_time(*proto, t) - pot->slope(y[0]) - gamma * y[1];
    }
};

// Integrate one smooth segment, wrapping x after every accepted step.
template <class Rhs>
inline void run_segment(Rhs rhs, double t0, Vec<2>& y, double t1, Winding& wind,
                        const IntegratorConfig& cfg, Trajectory* record) {
    auto observe = [&](double t, Vec<2>& yy) {
        wind.normalize(yy);
        if (record) {
            record->t.push_back(t);
            record->x.push_back(wind.unwrapped(yy));
            record->v.push_back(yy[1]);
        }
    };
    StepStats st;
    if (cfg.method == IntegratorConfig::Method::rk45_adaptive)
        st = integrate_dopri5<2>(rhs, t0, y, t1, cfg, dynamics_scale, observe);
    else
        st = integrate_rk4<2>(rhs, t0, y, t1, cfg, observe);
    if (record) {
        record->steps += st.n_steps;
        record->rejected += st.n_rejected;
        record->max_error_estimate = std::max(record->max_error_estimate, st.max_error_estimate);
    }
}

} // namespace detail

// One RK4 step of the autonomous system (Eq. on the cylinder: xdot = v,
// vdot = E - U'(x) - gamma v); used by the fixed-step path and by tests.
inline State step_autonomous(const PeriodicPotential& p, double field, double gamma,
                             State s, double dt) {
    if (!(dt > 0.0)) throw ConfigError("step_autonomous: dt must be positive");
    detail::AutonomousRhs rhs{&p, field, gamma};
    Vec<2> y{s.x, s.v};
    y = rk4_step<2>(rhs, 0.0, y, dt);
    if (!detail::finite(y)) throw IntegrationError("step_autonomous: non-finite state");
    return State{y[0], y[1]};
}

namespace detail {

template <class SegmentRhsFactory>
Trajectory run_driver(SegmentRhsFactory&& make_rhs, std::span<const double> cuts, State s0,
                      const IntegratorConfig& cfg, std::span<const double> sample_times) {
    Trajectory out;
    Winding wind;
    Vec<2> y{wrap(s0.x), s0.v};
    wind.turns = static_cast<long long>(std::llround((s0.x - y[0]) / two_pi));

    out.t.push_back(0.0);
    out.x.push_back(s0.x);
    out.v.push_back(s0.v);

    const bool record_all = sample_times.empty();
    std::size_t next_sample = 0;
    double t = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double seg_end = cuts[c + 1];
        auto rhs = make_rhs(c);
        // land exactly on requested sample times inside this segment
        while (true) {
            double target = seg_end;
            bool is_sample = false;
            if (!record_all && next_sample < sample_times.size() &&
                sample_times[next_sample] <= seg_end) {
                target = sample_times[next_sample];
                is_sample = true;
            }
            if (target > t) {
                Trajectory* rec = record_all ? &out : nullptr;
                run_segment(rhs, t, y, target, wind, cfg, rec);
                t = target;
            }
            if (is_sample) {
                out.t.push_back(t);
                out.x.push_back(wind.unwrapped(y));
                out.v.push_back(y[1]);
                ++next_sample;
            }
            if (target >= seg_end && !(is_sample && target < seg_end)) break;
        }
    }
    return out;
}

} // namespace detail

// Trajectory of the autonomous system up to t_end. If sample_times is empty
// every accepted step is recorded; otherwise exactly the requested times.
inline Trajectory integrate_autonomous(const PeriodicPotential& p, double field, double gamma,
                                       State s0, double t_end,
                                       const IntegratorConfig& cfg = {},
                                       std::span<const double> sample_times = {}) {
    if (!(t_end > 0.0)) throw ConfigError("integrate_autonomous: t_end must be positive");
    std::vector<double> cuts{0.0, t_end};
    detail::AutonomousRhs rhs{&p, field, gamma};
    return detail::run_driver([&](std::size_t) { return rhs; }, cuts, s0, cfg, sample_times);
}

// Trajectory under the slow drive E_delta(lambda t). Integration restarts at
// every plateau/ramp junction; plateau segments use a constant-field right
// hand side.
inline Trajectory integrate_driven(const PeriodicPotential& p, const DrivingProtocol& proto,
                                   double gamma, State s0, double t_end,
                                   const IntegratorConfig& cfg = {},
                                   std::span<const double> sample_times = {}) {
    if (!(t_end > 0.0)) throw ConfigError("integrate_driven: t_end must be positive");
    auto segs = forcing_segments(proto, 0.0, t_end);
    std::vector<double> cuts;
    cuts.reserve(segs.size() + 1);
    cuts.push_back(0.0);
    for (const auto& s : segs) cuts.push_back(s.t1);

    struct SegRhs {
        const PeriodicPotential* pot;
        const DrivingProtocol* proto;
        double gamma;
        bool constant;
        double field;
        void operator()(double t, const Vec<2>& y, Vec<2>& dy) const {
            double e = constant ? field : eval_driving_at_fast_time(*proto, t);
            dy[0] = y[1];
            dy[1] = e - pot->slope(y[0]) - gamma * y[1];
        }
    };
    auto make_rhs = [&](std::size_t c) {
        return SegRhs{&p, &proto, gamma, segs[c].constant, segs[c].field};
    };
    return detail::run_driver(make_rhs, cuts, s0, cfg, sample_times);
}

// Final state only; the lean path used by ensemble averaging.
inline State drive_final_state(const PeriodicPotential& p, const DrivingProtocol& proto,
                               double gamma, State s0, double t_end,
                               const IntegratorConfig& cfg = {}) {
    double samples[1] = {t_end};
    Trajectory tr = integrate_driven(p, proto, gamma, s0, t_end, cfg, samples);
    return State{tr.x.back(), tr.v.back()};
}

} // namespace ratchet

#endif
