#ifndef RATCHET_FORCING_HPP
#define RATCHET_FORCING_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/numerics.hpp"

namespace ratchet {

// Smooth bridge phi between the plateaus: phi(s) = 1 for s <= 0, -1 for
// s >= 1, non-increasing and strictly decreasing on (0, 1).
struct Mollifier {
    std::string name;
    std::function<double(double)> phi;
};

// phi(s) = cos(pi s) on [0, 1]: C^1 at the junctions, zero integral,
// antisymmetric about s = 1/2.
inline Mollifier half_cosine_mollifier() {
    return {"half_cosine", [](double s) {
                if (s <= 0.0) return 1.0;
                if (s >= 1.0) return -1.0;
                return std::cos(s * 3.14159265358979323846);
            }};
}

// C-infinity bridge built from the standard exp(-1/s) smoothstep; also
// antisymmetric about s = 1/2.
inline Mollifier smooth_bump_mollifier() {
    return {"smooth_bump", [](double s) {
                if (s <= 0.0) return 1.0;
                if (s >= 1.0) return -1.0;
                double a = std::exp(-1.0 / s);
                double b = std::exp(-1.0 / (1.0 - s));
                return 1.0 - 2.0 * a / (a + b);
            }};
}

inline Mollifier default_mollifier() { return half_cosine_mollifier(); }

inline Mollifier make_mollifier(const std::string& name) {
    if (name == "half_cosine") return half_cosine_mollifier();
    if (name == "smooth_bump") return smooth_bump_mollifier();
    throw ConfigError("unknown mollifier '" + name + "' (half_cosine | smooth_bump)");
}

// Switching time T_delta that gives the protocol zero average. The phi
// contributions of the two ramps cancel for any clamped mollifier, so the
// mean is linear in T_delta and the closed form
//     T_delta = E2 T / (E1 + E2) - delta
// holds in general; one quadrature pass corrects any residual.
inline double solve_t_delta(double e1, double e2, double T, double delta,
                            const Mollifier& phi) {
    if (!(e1 > 0.0 && e2 > 0.0)) throw ConfigError("forcing: E1 and E2 must be positive");
    if (!(T > 0.0)) throw ConfigError("forcing: period must be positive");
    if (!(delta >= 0.0)) throw ConfigError("forcing: delta must be non-negative");

    double td = e2 * T / (e1 + e2) - delta;
    if (delta > 0.0) {
        // Residual mean over one period; plateaus contribute exactly.
        auto ramp_mean = [&](double sgn) {
            const int q = 512;
            CompensatedSum s;
            for (int j = 0; j <= q; ++j) {
                double w = (j == 0 || j == q) ? 0.5 : 1.0;
                double val = 0.5 * (e1 - e2) + sgn * 0.5 * (e1 + e2) * phi.phi(double(j) / q);
                s.add(w * val);
            }
            return s.value() * delta / q;
        };
        double integral = e1 * td + ramp_mean(+1.0) - e2 * (T - td - 2.0 * delta) + ramp_mean(-1.0);
        td -= integral / (e1 + e2);
    }

    bool feasible = delta > 0.0 ? (td > 0.0 && 2.0 * delta < T - td) : (td > 0.0 && td < T);
    if (!feasible)
        throw ConfigError("forcing: infeasible mollification time, need 0 < 2*delta < T - T_delta "
                          "(T_delta = " + std::to_string(td) + ", delta = " + std::to_string(delta) + ")");
    return td;
}

// The mollified square-wave drive: E1 on [0, T_delta], ramp down over delta,
// -E2 on [T_delta + delta, T - delta], ramp back up over the final delta.
struct DrivingProtocol {
    double e1 = 1.0;
    double e2 = 1.0;
    double period = 1.0;   // T, in slow time
    double delta = 0.0;
    double lambda = 1.0;   // time-scale ratio; fast time t maps to tau = lambda t
    double t_delta = 0.5;  // computed switching time
    Mollifier mollifier;
};

inline DrivingProtocol make_protocol(double e1, double e2, double T, double delta,
                                     double lambda, Mollifier phi = default_mollifier()) {
    if (!(lambda > 0.0)) throw ConfigError("forcing: lambda must be positive");
    DrivingProtocol p;
    p.e1 = e1;
    p.e2 = e2;
    p.period = T;
    p.delta = delta;
    p.lambda = lambda;
    p.mollifier = std::move(phi);
    p.t_delta = solve_t_delta(e1, e2, T, delta, p.mollifier);
    return p;
}

// E_delta(tau): plateaus are returned exactly, ramps through the mollifier.
inline double eval_forcing(const DrivingProtocol& p, double tau) {
    double tw = wrap(tau, p.period);
    if (tw <= p.t_delta) return p.e1;
    if (tw < p.t_delta + p.delta)
        return 0.5 * (p.e1 - p.e2) + 0.5 * (p.e1 + p.e2) * p.mollifier.phi((tw - p.t_delta) / p.delta);
    if (tw <= p.period - p.delta) return -p.e2;
    return 0.5 * (p.e1 - p.e2) - 0.5 * (p.e1 + p.e2) * p.mollifier.phi((tw - p.period + p.delta) / p.delta);
}

inline double eval_driving_at_fast_time(const DrivingProtocol& p, double t) {
    return eval_forcing(p, p.lambda * t);
}

// One smooth piece of the drive in fast time; the integrator restarts at
// piece boundaries so the C^1 mollifier junctions cost no order.
struct ForcingSegment {
    double t0, t1;
    bool constant;
    double field; // meaningful when constant
};

// Split [t0, t1] (fast time) at every plateau/ramp junction.
inline std::vector<ForcingSegment> forcing_segments(const DrivingProtocol& p, double t0, double t1) {
    std::vector<ForcingSegment> out;
    const double T = p.period;
    std::vector<double> offsets;
    if (p.delta > 0.0)
        offsets = {0.0, p.t_delta, p.t_delta + p.delta, T - p.delta};
    else
        offsets = {0.0, p.t_delta};

    double tau0 = p.lambda * t0;
    double k = std::floor(tau0 / T);
    std::vector<double> cuts;
    cuts.push_back(t0);
    for (;; k += 1.0) {
        bool past_end = true;
        for (double off : offsets) {
            double t = (k * T + off) / p.lambda;
            if (t >= t1) continue;
            past_end = false;
            if (t > t0) cuts.push_back(t);
        }
        if (past_end && k * T / p.lambda >= t1) break;
    }
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        ForcingSegment seg{cuts[i], cuts[i + 1], false, 0.0};
        double tau_mid = wrap(p.lambda * 0.5 * (seg.t0 + seg.t1), T);
        if (tau_mid < p.t_delta) {
            seg.constant = true;
            seg.field = p.e1;
        } else if (tau_mid >= p.t_delta + p.delta && tau_mid < T - p.delta) {
            seg.constant = true;
            seg.field = -p.e2;
        }
        out.push_back(seg);
    }
    return out;
}

} // namespace ratchet

#endif
