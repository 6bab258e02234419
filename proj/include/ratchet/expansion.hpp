#ifndef RATCHET_EXPANSION_HPP
#define RATCHET_EXPANSION_HPP

#include <cmath>
#include <string>
#include <vector>

#include "ratchet/adiabatic.hpp"
#include "ratchet/limit_cycle.hpp"
#include "ratchet/potential.hpp"

namespace ratchet {

// Coefficients v_k of the large-field expansion
//   v_E(x) = E/gamma + sum_k v_k(x)/E^k + R_{N,E}(x)/E^{N+1},
// each 2*pi-periodic with zero mean. Built by cumulative quadrature from the
// triangular system
//   v_1' = -gamma U',   v_{k+1}' = -gamma^2 v_k - gamma sum_{l=1}^{k-1} v_l' v_{k-l}.
struct ExpansionSet {
    int order = 0;
    double gamma = 0.0;
    std::string potential;
    std::size_t grid = 0;                       // intervals; samples are inclusive grids
    std::vector<std::vector<double>> v;         // v[k-1] = samples of v_k
    std::vector<std::vector<double>> v_prime;   // matching derivative samples
};

inline ExpansionSet expansion_coefficients(const PeriodicPotential& p, double gamma, int order,
                                           std::size_t grid = 8192) {
    if (order < 1) throw ConfigError("expansion: order must be at least 1");
    if (!(gamma > 0.0)) throw ConfigError("expansion: gamma must be positive");
    const std::size_t n = grid;
    const double h = two_pi / static_cast<double>(n);

    ExpansionSet set;
    set.order = order;
    set.gamma = gamma;
    set.potential = p.name;
    set.grid = n;

    // sample triples (v_k, v_k', v_k''); the second derivative feeds the
    // Euler-Maclaurin correction of the next cumulative integral
    std::vector<std::vector<double>> vk, dvk, ddvk;

    std::vector<double> d(n + 1), dd(n + 1), scratch(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        double x = static_cast<double>(j) * h;
        d[j] = -gamma * p.slope(x);
        dd[j] = -gamma * p.curvature(x);
    }

    for (int k = 1; k <= order; ++k) {
        if (k > 1) {
            const auto& prev = vk[k - 2];
            const auto& dprev = dvk[k - 2];
            for (std::size_t j = 0; j <= n; ++j) {
                d[j] = -gamma * gamma * prev[j];
                dd[j] = -gamma * gamma * dprev[j];
            }
            for (int l = 1; l <= k - 2; ++l) {
                const auto& a = dvk[l - 1];
                const auto& da = ddvk[l - 1];
                const auto& b = vk[k - 1 - l - 1];
                const auto& db = dvk[k - 1 - l - 1];
                for (std::size_t j = 0; j <= n; ++j) {
                    d[j] -= gamma * a[j] * b[j];
                    dd[j] -= gamma * (da[j] * b[j] + a[j] * db[j]);
                }
            }
        }
        // solvability: the right-hand side is a perfect derivative, so its
        // mean must vanish before integration
        double rhs_scale = 0.0;
        for (std::size_t j = 0; j <= n; ++j) rhs_scale = std::max(rhs_scale, std::abs(d[j]));
        double rhs_mean = periodic_mean(d, h);
        if (std::abs(rhs_mean) > 1e-8 * std::max(1.0, rhs_scale))
            throw NumericsError("expansion: right-hand side at order " + std::to_string(k) +
                                " has mean " + std::to_string(rhs_mean) +
                                "; the triangular system is not solvable on this grid");

        auto val = cumulative_integral(d, dd, h);
        double mean = periodic_mean(val, h);
        for (auto& x : val) x -= mean;

        vk.push_back(std::move(val));
        dvk.push_back(d);
        ddvk.push_back(dd);
    }

    set.v = vk;
    set.v_prime = dvk;
    return set;
}

// Truncated expansion sampled on the set's grid for a given field.
inline std::vector<double> expansion_truncation(const ExpansionSet& set, double field) {
    std::vector<double> out(set.grid + 1, field / set.gamma);
    double ek = 1.0;
    for (int k = 1; k <= set.order; ++k) {
        ek *= field;
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += set.v[k - 1][j] / ek;
    }
    return out;
}

// max_x |v_E - truncation| per field plus the fitted log-log slope, which
// should be close to -(N+1).
struct ResidualScaling {
    int order = 0;
    std::vector<double> fields;
    std::vector<double> residual_max;
    double slope = 0.0;
};

inline ResidualScaling expansion_residual_scaling(const PeriodicPotential& p, double gamma,
                                                  int order, std::vector<double> fields,
                                                  std::size_t grid = 4096,
                                                  CycleOptions cycle_opts = {}) {
    if (fields.size() < 2) throw ConfigError("residual scaling: need at least two fields");
    double lo = fields.front(), hi = fields.front();
    for (double e : fields) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (!(hi >= 8.0 * lo))
        throw ConfigError("residual scaling: field list should span at least a decade");

    cycle_opts.grid = grid;
    ExpansionSet set = expansion_coefficients(p, gamma, order, grid);

    ResidualScaling out;
    out.order = order;
    std::vector<double> logE, logR;
    for (double e : fields) {
        LimitCycle cyc = find_cycle(p, e, gamma, cycle_opts);
        auto trunc = expansion_truncation(set, e);
        double r = 0.0;
        for (std::size_t j = 0; j < trunc.size(); ++j)
            r = std::max(r, std::abs(cyc.v[j] - trunc[j]));
        out.fields.push_back(e);
        out.residual_max.push_back(r);
        logE.push_back(std::log(e));
        logR.push_back(std::log(std::max(r, 1e-300)));
    }
    out.slope = fit_slope(logE, logR);
    return out;
}

// integral_0^{2 pi} G(x) G'(x)^2 dx = integral G U^2 dx; odd for even
// potentials, -(3 pi / 4) mu for the two-harmonic family.
struct RatchetIntegral {
    double value = 0.0;
    std::string potential;
    std::size_t resolution = 0;
};

inline RatchetIntegral ratchet_integral(const PeriodicPotential& p, std::size_t grid = 4096) {
    Antiderivative g = antiderivative_zero_mean(p, grid);
    const double h = g.h;
    std::vector<double> f(grid + 1);
    for (std::size_t j = 0; j <= grid; ++j) {
        double x = static_cast<double>(j) * h;
        double u = p.value(x);
        f[j] = g.samples[j] * u * u;
    }
    RatchetIntegral out;
    out.value = trapezoid(f, h);
    out.potential = p.name;
    out.resolution = grid;
    return out;
}

// Leading-order current for the tilted protocol E1 = E + Delta, E2 = E:
//   J ~ (V_{E+Delta} V~_E gamma^5 / 2 pi (2E+Delta)) (1/E^4 - 1/(E+Delta)^4) integral U^2.
// The sign is the sign of Delta once E is large.
inline double asymptotic_current_tilted(const PeriodicPotential& p, double gamma, double E,
                                        double delta, const AdiabaticOptions& opts = {}) {
    SlopeBounds sb = slope_bounds(p);
    if (!(E >= std::max(sb.m, sb.M) + opts.margin) || !(E + delta >= sb.M + opts.margin))
        throw RegimeError("asymptotic_current_tilted: fields must exceed the slope bounds "
                          "(E = " + std::to_string(E) + ", Delta = " + std::to_string(delta) + ")");
    CycleOptions copts = opts.cycle;
    double v_up = find_cycle(p, E + delta, gamma, copts).mean_velocity;
    double v_tilde = find_cycle(reflect(p), E, gamma, copts).mean_velocity;

    const std::size_t n = 4096;
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> u2(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        double u = p.value(static_cast<double>(j) * h);
        u2[j] = u * u;
    }
    double int_u2 = trapezoid(u2, h);
    double g5 = std::pow(gamma, 5);
    double bracket = 1.0 / std::pow(E, 4) - 1.0 / std::pow(E + delta, 4);
    return v_up * v_tilde * g5 / (two_pi * (2.0 * E + delta)) * bracket * int_u2;
}

// Leading-order current for the symmetric protocol (Delta = 0):
//   J ~ (5 V_E V~_E gamma^9 / 2 pi E^8) integral G G'^2.
inline double asymptotic_current_symmetric(const PeriodicPotential& p, double gamma, double E,
                                           const AdiabaticOptions& opts = {}) {
    SlopeBounds sb = slope_bounds(p);
    if (!(E >= std::max(sb.m, sb.M) + opts.margin))
        throw RegimeError("asymptotic_current_symmetric: field must exceed both slope bounds "
                          "(E = " + std::to_string(E) + ")");
    CycleOptions copts = opts.cycle;
    double v_mean = find_cycle(p, E, gamma, copts).mean_velocity;
    double v_tilde = find_cycle(reflect(p), E, gamma, copts).mean_velocity;
    double ri = ratchet_integral(p).value;
    return 5.0 * v_mean * v_tilde * std::pow(gamma, 9) / (two_pi * std::pow(E, 8)) * ri;
}

} // namespace ratchet

#endif
