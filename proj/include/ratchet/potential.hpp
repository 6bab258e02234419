#ifndef RATCHET_POTENTIAL_HPP
#define RATCHET_POTENTIAL_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/numerics.hpp"

namespace ratchet {

// A 2*pi-periodic potential with analytic derivatives. Immutable after
// construction; shared concurrent reads are safe.
struct PeriodicPotential {
    std::string name;
    std::map<std::string, double> params;
    std::function<double(double)> value;     // U(x)
    std::function<double(double)> slope;     // U'(x)
    std::function<double(double)> curvature; // U''(x)
};

struct SlopeBounds {
    double m; // -min U' > 0
    double M; //  max U' > 0
};

inline PeriodicPotential make_cosine() {
    PeriodicPotential p;
    p.name = "cosine";
    p.value = [](double x) { return -std::cos(x); };
    p.slope = [](double x) { return std::sin(x); };
    p.curvature = [](double x) { return std::cos(x); };
    return p;
}

inline PeriodicPotential make_two_harmonic(double mu) {
    if (!(mu > 0.0 && mu < 1.0))
        throw ConfigError("two_harmonic: mu must lie in (0, 1), got " + std::to_string(mu));
    PeriodicPotential p;
    p.name = "two_harmonic";
    p.params["mu"] = mu;
    p.value = [mu](double x) { return std::sin(x) + mu * std::sin(2.0 * x); };
    p.slope = [mu](double x) { return std::cos(x) + 2.0 * mu * std::cos(2.0 * x); };
    p.curvature = [mu](double x) { return -std::sin(x) - 4.0 * mu * std::sin(2.0 * x); };
    return p;
}

namespace detail {

// C^2 triweight kernel on [-1, 1], normalized: w(t) = (35/32)(1-t^2)^3.
inline double triweight(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    double q = 1.0 - t * t;
    return 35.0 / 32.0 * q * q * q;
}

// CDF of the triweight kernel.
inline double triweight_cdf(double t) {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double t3 = t * t * t, t5 = t3 * t * t, t7 = t5 * t * t;
    return 35.0 / 32.0 * (t - t3 + 0.6 * t5 - t7 / 7.0) + 0.5;
}

// Smoothed-corner correction: (u_+ * w_eps)(u) - u_+, supported on [-eps, eps].
// Convolving a kink of unit slope jump with the kernel adds exactly this term.
inline double corner_correction(double u, double eps) {
    double t = u / eps;
    if (std::abs(t) >= 1.0) return 0.0;
    double q = 1.0 - t * t;
    double q4 = q * q * q * q;
    double r = eps * (t * triweight_cdf(t) + 35.0 / 256.0 * q4);
    return r - eps * std::max(t, 0.0);
}

} // namespace detail

// Mollified piecewise-linear sawtooth: rises with slope b/a on [0, a], falls
// with slope -b/(2*pi - a) on [a, 2*pi], corners smoothed by convolution with
// a C^2 bump of half-width eps. Agrees with the piecewise-linear potential
// outside the eps-neighborhoods of the kinks; zero mean restored by
// subtracting the quadrature mean.
inline PeriodicPotential make_sawtooth(double a, double b, double eps = 0.05) {
    if (!(a > 0.0 && a < two_pi))
        throw ConfigError("sawtooth: kink position a must lie in (0, 2*pi)");
    if (!(b > 0.0)) throw ConfigError("sawtooth: height b must be positive");
    double eps_max = std::min(a, two_pi - a) / 4.0;
    if (!(eps > 0.0 && eps < eps_max))
        throw ConfigError("sawtooth: smoothing width must satisfy 0 < eps < min(a, 2*pi - a)/4 = " +
                          std::to_string(eps_max));

    const double s_up = b / a;              // slope on (0, a)
    const double s_down = -b / (two_pi - a); // slope on (a, 2*pi)
    const double jump0 = s_up - s_down;      // slope jump at x = 0 (mod 2*pi)
    const double jump_a = s_down - s_up;     // slope jump at x = a

    auto piecewise = [a, b](double xw) {
        return xw <= a ? b * xw / a - 0.5 * b : b * (two_pi - xw) / (two_pi - a) - 0.5 * b;
    };
    auto unshifted = [=](double x) {
        double xw = wrap(x);
        double u = piecewise(xw);
        double d0 = wrap_centered(xw);
        if (std::abs(d0) < eps) u += jump0 * detail::corner_correction(d0, eps);
        double da = wrap_centered(xw - a);
        if (std::abs(da) < eps) u += jump_a * detail::corner_correction(da, eps);
        return u;
    };

    // The two corner corrections cancel in the mean (equal and opposite
    // jumps); the quadrature mean removes the numerical remainder.
    const std::size_t n = std::size_t(1) << 16;
    double mean = 0.0;
    {
        CompensatedSum s;
        for (std::size_t j = 0; j < n; ++j)
            s.add(unshifted(two_pi * static_cast<double>(j) / static_cast<double>(n)));
        mean = s.value() / static_cast<double>(n);
    }

    PeriodicPotential p;
    p.name = "sawtooth";
    p.params["a"] = a;
    p.params["b"] = b;
    p.params["eps"] = eps;
    p.value = [=](double x) { return unshifted(x) - mean; };
    p.slope = [=](double x) {
        double xw = wrap(x);
        double d0 = wrap_centered(xw);
        if (std::abs(d0) < eps) return s_down + jump0 * detail::triweight_cdf(d0 / eps);
        double da = wrap_centered(xw - a);
        if (std::abs(da) < eps) return s_up + jump_a * detail::triweight_cdf(da / eps);
        return xw < a ? s_up : s_down;
    };
    p.curvature = [=](double x) {
        double xw = wrap(x);
        double d0 = wrap_centered(xw);
        if (std::abs(d0) < eps) return jump0 * detail::triweight(d0 / eps) / eps;
        double da = wrap_centered(xw - a);
        if (std::abs(da) < eps) return jump_a * detail::triweight(da / eps) / eps;
        return 0.0;
    };
    return p;
}

namespace detail {

// Periodic cubic spline through (x_i, y_i), x_i strictly increasing in
// [0, period). Second derivatives from the cyclic tridiagonal system via
// Sherman-Morrison.
class PeriodicSpline {
  public:
    PeriodicSpline(std::vector<double> xs, std::vector<double> ys, double period = two_pi)
        : x_(std::move(xs)), y_(std::move(ys)), period_(period) {
        const std::size_t k = x_.size();
        if (k < 4 || y_.size() != k)
            throw ConfigError("tabulated potential: need at least 4 (x, U) samples");
        for (std::size_t i = 0; i + 1 < k; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw ConfigError("tabulated potential: x samples must be strictly increasing");
        if (!(x_.front() >= 0.0 && x_.back() < period_))
            throw ConfigError("tabulated potential: x samples must lie in [0, 2*pi)");
        h_.resize(k);
        for (std::size_t i = 0; i < k; ++i) h_[i] = node(i + 1) - node(i);
        solve_moments();
    }

    double value(double x) const {
        auto [i, t] = locate(x);
        double hi = h_[i];
        double c1 = (ynext(i) - y_[i]) / hi - hi * (2.0 * m_[i] + mnext(i)) / 6.0;
        return y_[i] + t * c1 + 0.5 * t * t * m_[i] + t * t * t * (mnext(i) - m_[i]) / (6.0 * hi);
    }
    double deriv(double x) const {
        auto [i, t] = locate(x);
        double hi = h_[i];
        double c1 = (ynext(i) - y_[i]) / hi - hi * (2.0 * m_[i] + mnext(i)) / 6.0;
        return c1 + t * m_[i] + 0.5 * t * t * (mnext(i) - m_[i]) / hi;
    }
    double deriv2(double x) const {
        auto [i, t] = locate(x);
        return m_[i] + t * (mnext(i) - m_[i]) / h_[i];
    }
    double mean() const {
        CompensatedSum s;
        for (std::size_t i = 0; i < x_.size(); ++i)
            s.add(h_[i] * (y_[i] + ynext(i)) / 2.0 - h_[i] * h_[i] * h_[i] * (m_[i] + mnext(i)) / 24.0);
        return s.value() / period_;
    }

  private:
    double node(std::size_t i) const {
        return i < x_.size() ? x_[i] : x_[i - x_.size()] + period_;
    }
    double ynext(std::size_t i) const { return y_[(i + 1) % y_.size()]; }
    double mnext(std::size_t i) const { return m_[(i + 1) % m_.size()]; }

    std::pair<std::size_t, double> locate(double x) const {
        double xw = wrap(x - x_[0], period_) + x_[0];
        std::size_t lo = 0, hi = x_.size();
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= xw ? lo : hi) = mid;
        }
        return {lo, xw - x_[lo]};
    }

    void solve_moments() {
        const std::size_t k = x_.size();
        std::vector<double> lower(k), diag(k), upper(k), rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            double hm = h_[(i + k - 1) % k], hp = h_[i];
            lower[i] = hm / 6.0;
            diag[i] = (hm + hp) / 3.0;
            upper[i] = hp / 6.0;
            double ym = y_[(i + k - 1) % k];
            rhs[i] = (ynext(i) - y_[i]) / hp - (y_[i] - ym) / hm;
        }
        // Sherman-Morrison: cyclic corners lower[0] and upper[k-1].
        double alpha = lower[0], beta = upper[k - 1];
        double gamma = -diag[0];
        std::vector<double> d(diag);
        d[0] -= gamma;
        d[k - 1] -= alpha * beta / gamma;
        auto thomas = [&](std::vector<double> b) {
            std::vector<double> c(k), out(k);
            c[0] = upper[0] / d[0];
            b[0] /= d[0];
            for (std::size_t i = 1; i < k; ++i) {
                double mlt = d[i] - lower[i] * c[i - 1];
                c[i] = upper[i] / mlt;
                b[i] = (b[i] - lower[i] * b[i - 1]) / mlt;
            }
            out[k - 1] = b[k - 1];
            for (std::size_t i = k - 1; i-- > 0;) out[i] = b[i] - c[i] * out[i + 1];
            return out;
        };
        std::vector<double> u(k, 0.0);
        u[0] = gamma;
        u[k - 1] = beta;
        auto sol_y = thomas(rhs);
        auto sol_u = thomas(u);
        double fact = (sol_y[0] + alpha * sol_y[k - 1] / gamma) /
                      (1.0 + sol_u[0] + alpha * sol_u[k - 1] / gamma);
        m_.resize(k);
        for (std::size_t i = 0; i < k; ++i) m_[i] = sol_y[i] - fact * sol_u[i];
    }

    std::vector<double> x_, y_, h_, m_;
    double period_;
};

} // namespace detail

// Potential interpolated from (x, U) samples on [0, 2*pi) with a periodic
// cubic spline; the sample mean is subtracted so the result has zero average.
inline PeriodicPotential make_tabulated(std::vector<double> xs, std::vector<double> us) {
    auto spline = std::make_shared<detail::PeriodicSpline>(std::move(xs), std::move(us));
    double mean = spline->mean();
    PeriodicPotential p;
    p.name = "tabulated";
    p.value = [spline, mean](double x) { return spline->value(x) - mean; };
    p.slope = [spline](double x) { return spline->deriv(x); };
    p.curvature = [spline](double x) { return spline->deriv2(x); };
    return p;
}

// The reflected potential U~(x) = U(-x) used by the negative-field reduction.
inline PeriodicPotential reflect(const PeriodicPotential& p) {
    PeriodicPotential q;
    q.name = p.name + "_reflected";
    q.params = p.params;
    auto v = p.value, s = p.slope, c = p.curvature;
    q.value = [v](double x) { return v(-x); };
    q.slope = [s](double x) { return -s(-x); };
    q.curvature = [c](double x) { return c(-x); };
    return q;
}

// Slope bounds (m, M) = (-min U', max U') by dense grid scan plus
// golden-section refinement around the best cells.
inline SlopeBounds slope_bounds(const PeriodicPotential& p, std::size_t grid = std::size_t(1) << 16) {
    const double h = two_pi / static_cast<double>(grid);
    double lo = p.slope(0.0), hi = lo;
    std::size_t jlo = 0, jhi = 0;
    for (std::size_t j = 1; j < grid; ++j) {
        double s = p.slope(static_cast<double>(j) * h);
        if (s < lo) { lo = s; jlo = j; }
        if (s > hi) { hi = s; jhi = j; }
    }
    auto refine = [&](std::size_t j, double sign) {
        double a = (static_cast<double>(j) - 1.0) * h, b = (static_cast<double>(j) + 1.0) * h;
        double xs = golden_section_min([&](double x) { return sign * p.slope(x); }, a, b);
        return p.slope(xs);
    };
    double smin = std::min(lo, refine(jlo, +1.0));
    double smax = std::max(hi, refine(jhi, -1.0));
    if (!(smax > 1e-12 && -smin > 1e-12))
        throw ConfigError("potential must be non-constant: max U' > 0 and min U' < 0 required");
    return SlopeBounds{-smin, smax};
}

// Zero-mean antiderivative G of a zero-mean potential, G' = U, as grid
// samples with a cubic Hermite evaluator (slopes are U itself, exact).
struct Antiderivative {
    HermiteTable table;
    std::vector<double> samples; // G on the inclusive grid x_j = j h, j = 0..n
    std::size_t resolution = 0;  // n
    double h = 0;

    double operator()(double x) const { return table(x); }
};

inline Antiderivative antiderivative_zero_mean(const PeriodicPotential& p,
                                               std::size_t grid = 4096) {
    const std::size_t n = grid;
    const double h = two_pi / static_cast<double>(n);
    std::vector<double> u(n + 1), du(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        double x = static_cast<double>(j) * h;
        u[j] = p.value(x);
        du[j] = p.slope(x);
    }
    double mean_u = periodic_mean(u, h);
    if (std::abs(mean_u) > 1e-8)
        throw NumericsError("antiderivative: potential mean " + std::to_string(mean_u) +
                            " violates the zero-average precondition");
    auto g = cumulative_integral(u, du, h);
    double mean_g = periodic_mean(g, h);
    for (auto& v : g) v -= mean_g;
    Antiderivative out;
    out.samples = g;
    out.resolution = n;
    out.h = h;
    out.table = HermiteTable(std::move(g), std::move(u), two_pi);
    return out;
}

} // namespace ratchet

#endif
