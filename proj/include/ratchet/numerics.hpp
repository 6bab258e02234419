#ifndef RATCHET_NUMERICS_HPP
#define RATCHET_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ratchet/errors.hpp"

namespace ratchet {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Wrap into [0, length).
inline double wrap(double x, double length = two_pi) {
    double r = std::fmod(x, length);
    return r < 0 ? r + length : r;
}

// Wrap into [-length/2, length/2).
inline double wrap_centered(double x, double length = two_pi) {
    double r = wrap(x, length);
    return r >= 0.5 * length ? r - length : r;
}

// Neumaier compensated summation.
class CompensatedSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

// Trapezoid rule on an inclusive uniform grid f[0..n] (f[n] is the sample at
// the right endpoint). For periodic integrands over a full period this is
// spectrally accurate.
inline double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) throw NumericsError("trapezoid: need at least two samples");
    CompensatedSum s;
    s.add(0.5 * f.front());
    for (std::size_t j = 1; j + 1 < f.size(); ++j) s.add(f[j]);
    s.add(0.5 * f.back());
    return s.value() * h;
}

// Mean over one period of an inclusive grid (endpoints assumed equal up to
// roundoff; trapezoid weights handle the duplicate sample).
inline double periodic_mean(std::span<const double> f, double h) {
    return trapezoid(f, h) / (h * static_cast<double>(f.size() - 1));
}

// Cumulative integral F_j = int_0^{x_j} f dx on an inclusive uniform grid,
// with the Euler-Maclaurin endpoint correction -h^2/12 (f'_j - f'_0).
// Plain cumulative trapezoid is O(h^2); the correction makes it O(h^4),
// which the expansion closed-form tolerances need at moderate grids.
inline std::vector<double> cumulative_integral(std::span<const double> f,
                                               std::span<const double> fprime,
                                               double h) {
    if (f.size() != fprime.size())
        throw NumericsError("cumulative_integral: sample/derivative size mismatch");
    std::vector<double> out(f.size());
    CompensatedSum s;
    out[0] = 0.0;
    for (std::size_t j = 1; j < f.size(); ++j) {
        s.add(0.5 * h * (f[j - 1] + f[j]));
        out[j] = s.value() - h * h / 12.0 * (fprime[j] - fprime[0]);
    }
    return out;
}

// Golden-section minimization of a unimodal function on [a, b].
inline double golden_section_min(const std::function<double(double)>& f, double a,
                                 double b, double xtol = 1e-13) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw NumericsError("fit_slope: need matching samples, at least two");
    double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

// Periodic cubic Hermite table: values g[0..n] on the inclusive grid with
// exact slopes s[0..n]. Piecewise-cubic evaluation is O(h^4).
class HermiteTable {
  public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> values, std::vector<double> slopes, double period)
        : g_(std::move(values)), s_(std::move(slopes)), period_(period) {
        if (g_.size() != s_.size() || g_.size() < 3)
            throw NumericsError("HermiteTable: bad table sizes");
        h_ = period_ / static_cast<double>(g_.size() - 1);
    }

    double operator()(double x) const {
        double xb = wrap(x, period_);
        auto n = g_.size() - 1;
        std::size_t j = static_cast<std::size_t>(xb / h_);
        if (j >= n) j = n - 1;
        double u = (xb - static_cast<double>(j) * h_) / h_;
        double u2 = u * u, u3 = u2 * u;
        double h00 = 2 * u3 - 3 * u2 + 1;
        double h10 = u3 - 2 * u2 + u;
        double h01 = -2 * u3 + 3 * u2;
        double h11 = u3 - u2;
        return h00 * g_[j] + h10 * h_ * s_[j] + h01 * g_[j + 1] + h11 * h_ * s_[j + 1];
    }

    double spacing() const { return h_; }
    std::size_t intervals() const { return g_.empty() ? 0 : g_.size() - 1; }

  private:
    std::vector<double> g_, s_;
    double period_ = two_pi;
    double h_ = 0;
};

} // namespace ratchet

#endif
