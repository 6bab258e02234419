#ifndef RATCHET_ADIABATIC_HPP
#define RATCHET_ADIABATIC_HPP

#include <cmath>
#include <string>
#include <vector>

#include "ratchet/limit_cycle.hpp"

namespace ratchet {

struct AdiabaticOptions {
    double margin = 1e-3; // require E1 >= M + margin and E2 >= m + margin
    CycleOptions cycle;
};

// Adiabatic-limit current J = (E2 V_{E1} + E1 V_{-E2}) / (E1 + E2) and its
// signed components.
struct AdiabaticCurrent {
    double e1 = 0.0, e2 = 0.0, gamma = 0.0;
    std::string potential;
    double v_forward = 0.0;   // V_{E1} > 0
    double v_backward = 0.0;  // V_{-E2} < 0
    double forward_share = 0.0;  // E2 V_{E1} / (E1 + E2)
    double backward_share = 0.0; // E1 V_{-E2} / (E1 + E2)
    double current = 0.0;        // forward_share + backward_share
};

inline AdiabaticCurrent adiabatic_current(const PeriodicPotential& p, double gamma, double e1,
                                          double e2, const AdiabaticOptions& opts = {}) {
    SlopeBounds sb = slope_bounds(p);
    if (!(e1 >= sb.M + opts.margin))
        throw RegimeError("adiabatic_current: hypothesis E1 > max U' violated (E1 = " +
                          std::to_string(e1) + ", max U' = " + std::to_string(sb.M) + ")");
    if (!(e2 >= sb.m + opts.margin))
        throw RegimeError("adiabatic_current: hypothesis E2 > -min U' violated (E2 = " +
                          std::to_string(e2) + ", -min U' = " + std::to_string(sb.m) + ")");

    CycleOptions copts = opts.cycle;
    LimitCycle up = find_cycle(p, e1, gamma, copts);
    LimitCycle down = negative_field_cycle(p, -e2, gamma, copts);

    AdiabaticCurrent out;
    out.e1 = e1;
    out.e2 = e2;
    out.gamma = gamma;
    out.potential = p.name;
    out.v_forward = up.mean_velocity;
    out.v_backward = down.mean_velocity;
    out.forward_share = e2 * up.mean_velocity / (e1 + e2);
    out.backward_share = e1 * down.mean_velocity / (e1 + e2);
    out.current = out.forward_share + out.backward_share;
    return out;
}

// Mean velocity on the reflected-potential cycle, V~_E = -V_{-E}.
inline double tilde_mean_velocity(const PeriodicPotential& p, double gamma, double E,
                                  const AdiabaticOptions& opts = {}) {
    SlopeBounds sb = slope_bounds(p);
    if (!(E >= sb.m + opts.margin))
        throw RegimeError("tilde_mean_velocity: requires E > -min U' = " + std::to_string(sb.m) +
                          " (got E = " + std::to_string(E) + ")");
    CycleOptions copts = opts.cycle;
    return find_cycle(reflect(p), E, gamma, copts).mean_velocity;
}

// Symmetric-protocol current J = (V_E - V~_E)/2 for E1 = E2 = E, computed
// from the difference flow w(x) = v~_E(x) - v_E(x) instead of subtracting
// two nearly equal mean velocities. Both cycles obey the same ODE form, so
//   w' = [-(E - U~'(x)) w + (U'(x) - U~'(x)) (v + w)] / (v (v + w)),
// and J = -(V V~ / 4 pi) * integral w / (v (v + w)) dx carries full relative
// precision even where J ~ E^-6 while V ~ E.
struct SymmetricCurrent {
    double field = 0.0, gamma = 0.0;
    std::string potential;
    double v_mean = 0.0;       // V_E
    double v_tilde_mean = 0.0; // V~_E
    double current = 0.0;      // (V_E - V~_E)/2
    int iterations = 0;
};

namespace detail {

struct PairRhs {
    const PeriodicPotential* pot;
    double field, gamma, v_floor;
    void operator()(double x, const Vec<2>& y, Vec<2>& dy) const {
        double v = y[0];
        double vt = y[0] + y[1];
        if (v <= v_floor || vt <= v_floor)
            throw RegimeError("singular flow on the paired cycle ODE");
        double up = pot->slope(x);
        double ur = -pot->slope(-x); // U~'(x) = -U'(-x)
        dy[0] = -gamma + (field - up) / v;
        dy[1] = (-(field - ur) * y[1] + (up - ur) * vt) / (v * vt);
    }
};

} // namespace detail

inline SymmetricCurrent symmetric_pair_current(const PeriodicPotential& p, double gamma, double E,
                                               const AdiabaticOptions& opts = {}) {
    SlopeBounds sb = slope_bounds(p);
    double bound = std::max(sb.m, sb.M);
    if (!(E >= bound + opts.margin))
        throw RegimeError("symmetric_pair_current: requires E > max(-min U', max U') = " +
                          std::to_string(bound) + " (got E = " + std::to_string(E) + ")");

    // scale of w ~ gamma * osc(U) / E, used for error weights and tolerances
    double amp = 0.0;
    for (int j = 0; j < 4096; ++j)
        amp = std::max(amp, std::abs(p.value(two_pi * j / 4096.0)));
    const double w_scale = std::max(2.0 * gamma * amp / E, 1e-12);

    detail::PairRhs rhs{&p, E, gamma, opts.cycle.v_floor};
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-15;
    auto scale = [w_scale](const Vec<2>& y, std::size_t i) {
        return i == 0 ? std::abs(y[0]) : std::abs(y[1]) + 0.1 * w_scale;
    };

    auto ret_map = [&](Vec<2> y) {
        integrate_dopri5<2>(rhs, 0.0, y, two_pi, cfg, scale, [](double, const Vec<2>&) {});
        return y;
    };

    Vec<2> y{E / gamma, 0.0};
    const double tol_v = std::max(1e-13 * (1.0 + E / gamma), 4.4e-16 * E / gamma);
    const double tol_w = std::max(1e-12 * w_scale, 1e-17);
    int it = 0;
    double best = 1e300;
    int stale = 0;
    for (;; ++it) {
        if (it >= opts.cycle.max_iterations)
            throw NumericsError("symmetric_pair_current: paired return map did not converge");
        Vec<2> z = ret_map(y);
        double gv = std::abs(z[0] - y[0]);
        double gw = std::abs(z[1] - y[1]);
        y = z;
        if (gv < tol_v && gw < tol_w) break;
        double score = gv / tol_v + gw / tol_w;
        if (score < best * 0.999) {
            best = score;
            stale = 0;
        } else if (++stale > 60) {
            break; // roundoff floor of the map; fixed point as good as it gets
        }
    }

    // sweep: record v and w on the grid
    const std::size_t n = opts.cycle.grid;
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> v(n + 1), w(n + 1);
    v[0] = y[0];
    w[0] = y[1];
    Vec<2> z = y;
    for (std::size_t j = 0; j < n; ++j) {
        double x0 = static_cast<double>(j) * h;
        double x1 = (j + 1 == n) ? two_pi : static_cast<double>(j + 1) * h;
        integrate_dopri5<2>(rhs, x0, z, x1, cfg, scale, [](double, const Vec<2>&) {});
        v[j + 1] = z[0];
        w[j + 1] = z[1];
    }

    std::vector<double> inv(n + 1), diff(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        inv[j] = 1.0 / v[j];
        diff[j] = w[j] / (v[j] * (v[j] + w[j]));
    }
    double circuit = trapezoid(inv, h);
    double v_mean = two_pi / circuit;
    std::vector<double> invt(n + 1);
    for (std::size_t j = 0; j <= n; ++j) invt[j] = 1.0 / (v[j] + w[j]);
    double v_tilde_mean = two_pi / trapezoid(invt, h);

    SymmetricCurrent out;
    out.field = E;
    out.gamma = gamma;
    out.potential = p.name;
    out.v_mean = v_mean;
    out.v_tilde_mean = v_tilde_mean;
    out.iterations = it + 1;
    out.current = -(v_mean * v_tilde_mean / (2.0 * two_pi)) * trapezoid(diff, h);
    return out;
}

} // namespace ratchet

#endif
