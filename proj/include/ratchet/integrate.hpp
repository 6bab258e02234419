#ifndef RATCHET_INTEGRATE_HPP
#define RATCHET_INTEGRATE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "ratchet/errors.hpp"

namespace ratchet {

struct IntegratorConfig {
    enum class Method { rk4_fixed, rk45_adaptive };
    Method method = Method::rk45_adaptive;
    double rtol = 1e-9;
    double atol = 1e-11;
    double dt = 1e-3;              // fixed-step size for rk4_fixed
    long max_steps = 500000000;
};

inline IntegratorConfig::Method parse_method(const std::string& s) {
    if (s == "rk4") return IntegratorConfig::Method::rk4_fixed;
    if (s == "rk45") return IntegratorConfig::Method::rk45_adaptive;
    throw ConfigError("unknown integrator method '" + s + "' (rk4 | rk45)");
}

struct StepStats {
    long n_steps = 0;
    long n_rejected = 0;
    double max_error_estimate = 0.0;
};

template <std::size_t N>
using Vec = std::array<double, N>;

namespace detail {

template <std::size_t N>
inline bool finite(const Vec<N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace detail

// One classical RK4 step. F: void(double t, const Vec<N>&, Vec<N>&).
template <std::size_t N, class F>
Vec<N> rk4_step(F&& f, double t, const Vec<N>& y, double dt) {
    Vec<N> k1, k2, k3, k4, tmp;
    f(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    f(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    f(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
    f(t + dt, tmp, k4);
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Adaptive Dormand-Prince 5(4) with FSAL. Scale: per-component magnitude used
// in the error weight atol + rtol * scale_i. Observer: called after every
// accepted step with (t, y); return value ignored.
template <std::size_t N, class F, class Scale, class Observer>
StepStats integrate_dopri5(F&& f, double t0, Vec<N>& y, double t1,
                           const IntegratorConfig& cfg, Scale&& scale, Observer&& observe) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded 4th-order error weights (b - bhat)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    StepStats stats;
    if (t1 <= t0) return stats;

    Vec<N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    double t = t0;
    f(t, y, k1);

    // initial step: limited by both the interval and the state scale
    double h = (t1 - t0) / 100.0;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double w = cfg.atol + cfg.rtol * scale(y, i);
            d0 = std::max(d0, std::abs(y[i]) / w);
            d1 = std::max(d1, std::abs(k1[i]) / w);
        }
        if (d1 > 0.0) h = std::min(h, 0.01 * std::max(d0, 1.0) / d1);
        h = std::max(h, 1e-12);
    }

    bool last = false;
    while (!last) {
        if (++stats.n_steps + stats.n_rejected > cfg.max_steps)
            throw IntegrationError("integration step budget exhausted (max_steps = " +
                                   std::to_string(cfg.max_steps) + ")");
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double w = cfg.atol + cfg.rtol * scale(ynew, i);
            err = std::max(err, std::abs(e) / w);
        }

        if (!detail::finite(ynew) || !std::isfinite(err))
            throw IntegrationError("integration produced a non-finite state at t = " +
                                   std::to_string(t));

        if (err <= 1.0) {
            t = last ? t1 : t + h;
            y = ynew;
            k1 = k7; // FSAL
            stats.max_error_estimate = std::max(stats.max_error_estimate, err);
            observe(t, y);
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, fac));
        } else {
            ++stats.n_rejected;
            --stats.n_steps;
            last = false;
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::min(1.0, std::max(0.1, fac));
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("step size underflow at t = " + std::to_string(t));
        }
    }
    return stats;
}

// Fixed-step RK4 from t0 to t1 (last step shortened to land on t1).
template <std::size_t N, class F, class Observer>
StepStats integrate_rk4(F&& f, double t0, Vec<N>& y, double t1,
                        const IntegratorConfig& cfg, Observer&& observe) {
    StepStats stats;
    if (t1 <= t0) return stats;
    if (!(cfg.dt > 0.0)) throw ConfigError("integrator: fixed step dt must be positive");
    double t = t0;
    while (t < t1) {
        if (++stats.n_steps > cfg.max_steps)
            throw IntegrationError("integration step budget exhausted");
        double h = std::min(cfg.dt, t1 - t);
        y = rk4_step<N>(f, t, y, h);
        if (!detail::finite(y))
            throw IntegrationError("integration produced a non-finite state at t = " +
                                   std::to_string(t));
        t = (t1 - t <= cfg.dt) ? t1 : t + h;
        observe(t, y);
    }
    return stats;
}

} // namespace ratchet

#endif
