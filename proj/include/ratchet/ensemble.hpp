#ifndef RATCHET_ENSEMBLE_HPP
#define RATCHET_ENSEMBLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ratchet/adiabatic.hpp"
#include "ratchet/dynamics.hpp"

namespace ratchet {

// Product measure: x0 uniform on the circle, v0 from the chosen law
// (point_mass pins both coordinates). Every offered law satisfies the
// moment condition integral (1 + |v0|) log(e + |v0|) dmu < infinity.
struct InitialMeasure {
    enum class Law { point_mass, uniform, gaussian };
    Law law = Law::point_mass;
    double x0 = 0.0, v0 = 0.0; // point_mass
    double v_lo = 0.0, v_hi = 0.0; // uniform velocity window
    double mean = 0.0, sigma = 1.0; // gaussian velocity law
};

inline InitialMeasure point_mass_measure(double x0, double v0) {
    InitialMeasure m;
    m.law = InitialMeasure::Law::point_mass;
    m.x0 = x0;
    m.v0 = v0;
    return m;
}

inline InitialMeasure uniform_velocity_measure(double v_lo, double v_hi) {
    if (!(v_lo <= v_hi)) throw ConfigError("measure: need v_lo <= v_hi");
    InitialMeasure m;
    m.law = InitialMeasure::Law::uniform;
    m.v_lo = v_lo;
    m.v_hi = v_hi;
    return m;
}

inline InitialMeasure gaussian_velocity_measure(double mean, double sigma) {
    if (!(sigma >= 0.0)) throw ConfigError("measure: sigma must be non-negative");
    InitialMeasure m;
    m.law = InitialMeasure::Law::gaussian;
    m.mean = mean;
    m.sigma = sigma;
    return m;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based per-sample seed: reproducible independently of execution
// order or thread count.
inline std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

} // namespace detail

inline std::vector<State> sample_measure(const InitialMeasure& m, std::size_t n,
                                         std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample_measure: need n >= 1");
    std::vector<State> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m.law == InitialMeasure::Law::point_mass) {
            out[i] = State{m.x0, m.v0};
            continue;
        }
        std::mt19937_64 eng(detail::sample_seed(seed, i));
        std::uniform_real_distribution<double> ux(0.0, two_pi);
        double x0 = ux(eng);
        double v0 = 0.0;
        if (m.law == InitialMeasure::Law::uniform) {
            std::uniform_real_distribution<double> uv(m.v_lo, m.v_hi);
            v0 = uv(eng);
        } else {
            std::normal_distribution<double> nv(m.mean, m.sigma);
            v0 = nv(eng);
        }
        out[i] = State{x0, v0};
    }
    return out;
}

// Finite-time ensemble current with its Monte-Carlo error bar.
struct CurrentEstimate {
    double t = 0.0, lambda = 0.0, delta = 0.0;
    double estimate = 0.0;  // mean drift (X(t) - X(0)) / t over the measure
    double std_error = 0.0;
    std::size_t samples = 0;
    double q10 = 0.0, q50 = 0.0, q90 = 0.0; // per-sample drift quantiles
};

inline CurrentEstimate current_estimate(const PeriodicPotential& p, const DrivingProtocol& proto,
                                        double gamma, const InitialMeasure& m, double t,
                                        std::size_t n, const IntegratorConfig& cfg = {},
                                        std::uint64_t seed = 0, unsigned threads = 0) {
    if (!(t > 0.0)) throw ConfigError("current_estimate: horizon t must be positive");
    auto initial = sample_measure(m, n, seed);
    std::vector<double> drifts(n);

    unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<std::size_t>(nt, n);

    struct Failure {
        std::size_t index;
        std::string what;
    };
    std::vector<std::unique_ptr<Failure>> failures(nt);

    auto work = [&](unsigned tid) {
        std::size_t lo = n * tid / nt, hi = n * (tid + 1) / nt;
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                State fin = drive_final_state(p, proto, gamma, initial[i], t, cfg);
                drifts[i] = (fin.x - initial[i].x) / t;
            } catch (const std::exception& e) {
                if (!failures[tid]) failures[tid] = std::make_unique<Failure>(Failure{i, e.what()});
                return;
            }
        }
    };

    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < nt; ++tid) pool.emplace_back(work, tid);
        for (auto& th : pool) th.join();
    }
    for (const auto& f : failures)
        if (f)
            throw IntegrationError("ensemble sample " + std::to_string(f->index) + " (x0 = " +
                                   std::to_string(initial[f->index].x) + ", v0 = " +
                                   std::to_string(initial[f->index].v) + ") failed: " + f->what);

    // aggregation in fixed index order: results do not depend on the thread count
    CompensatedSum sum;
    for (double d : drifts) sum.add(d);
    double mean = sum.value() / static_cast<double>(n);
    CompensatedSum var;
    for (double d : drifts) var.add((d - mean) * (d - mean));
    double sd = n > 1 ? std::sqrt(var.value() / static_cast<double>(n - 1)) : 0.0;

    std::vector<double> sorted(drifts);
    std::sort(sorted.begin(), sorted.end());
    auto quant = [&](double q) {
        double pos = q * static_cast<double>(n - 1);
        std::size_t j = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(j);
        return j + 1 < n ? sorted[j] * (1.0 - frac) + sorted[j + 1] * frac : sorted[j];
    };

    CurrentEstimate est;
    est.t = t;
    est.lambda = proto.lambda;
    est.delta = proto.delta;
    est.estimate = mean;
    est.std_error = sd / std::sqrt(static_cast<double>(n));
    est.samples = n;
    est.q10 = quant(0.1);
    est.q50 = quant(0.5);
    est.q90 = quant(0.9);
    return est;
}

// Convergence sweep toward the adiabatic current: a grid of estimates over
// (lambda, delta) at a fixed horizon of K slow periods.
struct SweepRow {
    double lambda = 0.0, delta = 0.0, t = 0.0;
    double estimate = 0.0, std_error = 0.0;
    double j_adiabatic = 0.0, abs_error = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    double j_adiabatic = 0.0;
    bool monotone_in_lambda = true; // per delta, error non-increasing within noise
    double delta_extrapolated = std::numeric_limits<double>::quiet_NaN();
};

inline SweepTable adiabatic_convergence_sweep(const PeriodicPotential& p, double gamma, double e1,
                                              double e2, double T,
                                              const std::vector<double>& lambdas,
                                              const std::vector<double>& deltas, double periods,
                                              const InitialMeasure& m, std::size_t n,
                                              const IntegratorConfig& cfg = {},
                                              std::uint64_t seed = 0, unsigned threads = 0,
                                              const Mollifier& phi = default_mollifier()) {
    if (lambdas.empty() || deltas.empty()) throw ConfigError("sweep: need lambda and delta lists");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i - 1])) throw ConfigError("sweep: lambda list must decrease");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw ConfigError("sweep: delta list must decrease");
    if (!(periods >= 10.0))
        throw ConfigError("sweep: horizon must be at least 10 slow periods");

    SweepTable table;
    table.j_adiabatic = adiabatic_current(p, gamma, e1, e2).current;

    for (double delta : deltas) {
        double prev_err = std::numeric_limits<double>::infinity();
        double prev_se = 0.0;
        for (double lambda : lambdas) {
            DrivingProtocol proto = make_protocol(e1, e2, T, delta, lambda, phi);
            double t = periods * T / lambda;
            CurrentEstimate est = current_estimate(p, proto, gamma, m, t, n, cfg, seed, threads);
            SweepRow row;
            row.lambda = lambda;
            row.delta = delta;
            row.t = t;
            row.estimate = est.estimate;
            row.std_error = est.std_error;
            row.j_adiabatic = table.j_adiabatic;
            row.abs_error = std::abs(est.estimate - table.j_adiabatic);
            table.rows.push_back(row);
            if (row.abs_error > prev_err + 3.0 * (est.std_error + prev_se))
                table.monotone_in_lambda = false;
            prev_err = row.abs_error;
            prev_se = est.std_error;
        }
    }

    if (deltas.size() >= 2) {
        // linear delta -> 0 extrapolation from the two smallest deltas at the
        // smallest lambda
        double d1 = deltas[deltas.size() - 1], d2 = deltas[deltas.size() - 2];
        double e_1 = 0.0, e_2 = 0.0;
        for (const auto& row : table.rows) {
            if (row.lambda == lambdas.back() && row.delta == d1) e_1 = row.estimate;
            if (row.lambda == lambdas.back() && row.delta == d2) e_2 = row.estimate;
        }
        table.delta_extrapolated = (d2 * e_1 - d1 * e_2) / (d2 - d1);
    }
    return table;
}

} // namespace ratchet

#endif
