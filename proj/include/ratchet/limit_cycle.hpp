#ifndef RATCHET_LIMIT_CYCLE_HPP
#define RATCHET_LIMIT_CYCLE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "ratchet/integrate.hpp"
#include "ratchet/potential.hpp"

namespace ratchet {

struct CycleOptions {
    std::size_t grid = 4096;     // samples per period for the recorded cycle
    double tol = 1e-12;          // fixed-point tolerance on |G(v) - v|
    int max_iterations = 20000;
    double margin = 0.0;         // regime guard: require E >= M + margin
    double v_floor = 1e-6;       // singular-flow guard on the x-parameterized ODE
    double rtol = 1e-11;
    double atol = 1e-13;
    bool newton = false;         // optional accelerated iteration
};

// The attracting cycle v_E(x) for a static field beyond the slope bounds.
struct LimitCycle {
    double field = 0.0;
    double gamma = 0.0;
    std::string potential;
    std::vector<double> x;  // inclusive grid, x[0] = 0 .. x[n] = 2*pi
    std::vector<double> v;  // v_E at the grid nodes
    double v_star = 0.0;        // v_E(0), fixed point of the return map
    double mean_velocity = 0.0; // harmonic mean 2*pi / (integral dx / v_E)
    double cycle_average = 0.0; // (1/2*pi) integral v_E dx  (identity: E/gamma)
    double contraction = 0.0;   // exp(-integral gamma / v_E dx) in (0, 1)
    int iterations = 0;
    std::vector<double> gaps;   // |G(v_k) - v_k| per iteration
};

namespace detail {

struct CycleRhs {
    const PeriodicPotential* pot;
    double field, gamma, v_floor;
    void operator()(double x, const Vec<1>& y, Vec<1>& dy) const {
        if (y[0] <= v_floor)
            throw RegimeError("singular flow: velocity fell to " + std::to_string(y[0]) +
                              " on the cycle ODE; field is too close to the slope bound");
        dy[0] = -gamma + (field - pot->slope(x)) / y[0];
    }
};

inline double vel_scale(const Vec<1>& y, std::size_t) { return std::abs(y[0]); }

struct CycleSensRhs {
    const PeriodicPotential* pot;
    double field, gamma, v_floor;
    void operator()(double x, const Vec<2>& y, Vec<2>& dy) const {
        if (y[0] <= v_floor)
            throw RegimeError("singular flow: velocity fell to " + std::to_string(y[0]) +
                              " on the cycle ODE; field is too close to the slope bound");
        dy[0] = -gamma + (field - pot->slope(x)) / y[0];
        dy[1] = gamma / y[0];
    }
};

inline double sens_scale(const Vec<2>& y, std::size_t i) {
    return i == 0 ? std::abs(y[0]) : std::abs(y[1]) + 1.0;
}

} // namespace detail

// Phi(x_end; v0): the x-parameterized flow dv/dx = -gamma + (E - U'(x)) / v.
inline double phase_flow(const PeriodicPotential& p, double field, double gamma, double v0,
                         double x_end, const CycleOptions& opts = {}) {
    if (!(v0 > opts.v_floor))
        throw RegimeError("phase_flow: initial velocity must exceed the floor " +
                          std::to_string(opts.v_floor));
    detail::CycleRhs rhs{&p, field, gamma, opts.v_floor};
    Vec<1> y{v0};
    IntegratorConfig cfg;
    cfg.rtol = opts.rtol;
    cfg.atol = opts.atol;
    integrate_dopri5<1>(rhs, 0.0, y, x_end, cfg, detail::vel_scale, [](double, const Vec<1>&) {});
    return y[0];
}

// Flow together with the accumulated integral of gamma / v, so that
// dPhi/dv = (v0 / Phi) exp(-integral) is available in closed form.
inline std::pair<double, double> phase_flow_sensitivity(const PeriodicPotential& p, double field,
                                                        double gamma, double v0, double x_end,
                                                        const CycleOptions& opts = {}) {
    detail::CycleSensRhs rhs{&p, field, gamma, opts.v_floor};
    Vec<2> y{v0, 0.0};
    IntegratorConfig cfg;
    cfg.rtol = opts.rtol;
    cfg.atol = opts.atol;
    integrate_dopri5<2>(rhs, 0.0, y, x_end, cfg, detail::sens_scale, [](double, const Vec<2>&) {});
    return {y[0], y[1]};
}

// One application of the return map G(v) = Phi(2*pi; v).
inline double poincare_map(const PeriodicPotential& p, double field, double gamma, double v,
                           const CycleOptions& opts = {}) {
    return phase_flow(p, field, gamma, v, two_pi, opts);
}

// Unique attracting cycle for field > M, found by iterating the contracting
// return map from v = E/gamma and then sampling one final sweep on the grid.
inline LimitCycle find_cycle(const PeriodicPotential& p, double field, double gamma,
                             const CycleOptions& opts = {}) {
    if (!(gamma > 0.0)) throw ConfigError("find_cycle: damping gamma must be positive");
    SlopeBounds sb = slope_bounds(p);
    if (field < sb.M + opts.margin)
        throw RegimeError("find_cycle: field E = " + std::to_string(field) +
                          " is below the running regime; the positive cycle requires E > max U' = " +
                          std::to_string(sb.M));

    LimitCycle cyc;
    cyc.field = field;
    cyc.gamma = gamma;
    cyc.potential = p.name;

    double v = field / gamma;
    double tol_floor = 8.0 * 2.2e-16 * (1.0 + std::abs(v));
    double tol = std::max(opts.tol, tol_floor);
    int it = 0;
    for (;; ++it) {
        if (it >= opts.max_iterations)
            throw NumericsError("find_cycle: return map did not converge within " +
                                std::to_string(opts.max_iterations) + " iterations (gap " +
                                std::to_string(cyc.gaps.empty() ? -1.0 : cyc.gaps.back()) + ")");
        double gap;
        if (opts.newton) {
            auto [g, integral] = phase_flow_sensitivity(p, field, gamma, v, two_pi, opts);
            double gprime = v / g * std::exp(-integral);
            gap = std::abs(g - v);
            cyc.gaps.push_back(gap);
            if (gap < tol) { v = g; break; }
            v = v - (g - v) / (gprime - 1.0);
        } else {
            double g = poincare_map(p, field, gamma, v, opts);
            gap = std::abs(g - v);
            cyc.gaps.push_back(gap);
            v = g;
            if (gap < tol) break;
        }
    }
    cyc.iterations = it + 1;

    // final sweep: record v_E on the inclusive grid
    const std::size_t n = opts.grid;
    const double h = two_pi / static_cast<double>(n);
    cyc.x.resize(n + 1);
    cyc.v.resize(n + 1);
    detail::CycleRhs rhs{&p, field, gamma, opts.v_floor};
    IntegratorConfig cfg;
    cfg.rtol = opts.rtol;
    cfg.atol = opts.atol;
    Vec<1> y{v};
    cyc.x[0] = 0.0;
    cyc.v[0] = v;
    for (std::size_t j = 0; j < n; ++j) {
        double x0 = static_cast<double>(j) * h;
        double x1 = (j + 1 == n) ? two_pi : (static_cast<double>(j + 1)) * h;
        integrate_dopri5<1>(rhs, x0, y, x1, cfg, detail::vel_scale, [](double, const Vec<1>&) {});
        cyc.x[j + 1] = x1;
        cyc.v[j + 1] = y[0];
    }
    cyc.v_star = cyc.v[0];

    std::vector<double> inv(n + 1);
    for (std::size_t j = 0; j <= n; ++j) inv[j] = 1.0 / cyc.v[j];
    double circuit = trapezoid(inv, h);
    cyc.mean_velocity = two_pi / circuit;
    cyc.cycle_average = trapezoid(cyc.v, h) / two_pi;
    cyc.contraction = std::exp(-gamma * circuit);
    return cyc;
}

// Harmonic-mean formula recomputed from the stored samples.
inline double mean_velocity(const LimitCycle& c) {
    std::vector<double> inv(c.v.size());
    for (std::size_t j = 0; j < c.v.size(); ++j) inv[j] = 1.0 / c.v[j];
    double h = two_pi / static_cast<double>(c.v.size() - 1);
    return two_pi / trapezoid(inv, h);
}

// Cycle for field < -m via the reflection y = -x: the reflected potential
// U~(y) = U(-y) has its positive cycle at field -E, and
// v_E(x) = -v~(-x), so the mean velocity is negative.
inline LimitCycle negative_field_cycle(const PeriodicPotential& p, double field_neg, double gamma,
                                       const CycleOptions& opts = {}) {
    SlopeBounds sb = slope_bounds(p);
    if (!(field_neg < -(sb.m + opts.margin)))
        throw RegimeError("negative_field_cycle: field E = " + std::to_string(field_neg) +
                          " is above the running regime; the negative cycle requires E < -(-min U') = " +
                          std::to_string(-sb.m));
    LimitCycle mirror = find_cycle(reflect(p), -field_neg, gamma, opts);
    const std::size_t n = mirror.v.size() - 1;
    LimitCycle cyc;
    cyc.field = field_neg;
    cyc.gamma = gamma;
    cyc.potential = p.name;
    cyc.x = mirror.x;
    cyc.v.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) cyc.v[j] = -mirror.v[n - j];
    cyc.v_star = cyc.v[0];
    cyc.mean_velocity = -mirror.mean_velocity;
    cyc.cycle_average = -mirror.cycle_average;
    cyc.contraction = mirror.contraction;
    cyc.iterations = mirror.iterations;
    cyc.gaps = mirror.gaps;
    return cyc;
}

} // namespace ratchet

#endif
