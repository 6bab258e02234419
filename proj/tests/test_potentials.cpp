#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ratchet/potential.hpp"

using namespace ratchet;
using Catch::Approx;

namespace {

constexpr double pi = 3.14159265358979323846;

double quadrature_mean(const PeriodicPotential& p, std::size_t n = 4096) {
    std::vector<double> u(n + 1);
    double h = two_pi / double(n);
    for (std::size_t j = 0; j <= n; ++j) u[j] = p.value(double(j) * h);
    return periodic_mean(u, h);
}

// brute-force slope-bound oracle: dense evaluation, no refinement
SlopeBounds dense_bounds(const PeriodicPotential& p, std::size_t n) {
    double lo = p.slope(0.0), hi = lo;
    for (std::size_t j = 1; j < n; ++j) {
        double s = p.slope(two_pi * double(j) / double(n));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {-lo, hi};
}

} // namespace

TEST_CASE("cosine potential point values and bounds", "[potentials]") {
    auto p = make_cosine();
    CHECK(p.value(0.0) == -1.0);
    CHECK(p.slope(pi / 2) == Approx(1.0).margin(1e-15));
    CHECK(p.value(pi) == Approx(1.0).margin(1e-15));
    CHECK(p.value(-pi) == Approx(p.value(pi)).margin(1e-15)); // evenness

    auto sb = slope_bounds(p);
    CHECK(sb.m == Approx(1.0).margin(1e-12));
    CHECK(sb.M == Approx(1.0).margin(1e-12));

    CHECK(std::abs(quadrature_mean(p)) < 1e-10);
}

TEST_CASE("two-harmonic potential construction and bounds", "[potentials]") {
    CHECK_THROWS_AS(make_two_harmonic(0.0), ConfigError);
    CHECK_THROWS_AS(make_two_harmonic(1.0), ConfigError);
    CHECK_THROWS_AS(make_two_harmonic(-0.5), ConfigError);

    auto p = make_two_harmonic(0.5);
    CHECK(std::abs(quadrature_mean(p)) < 1e-10);

    // analytic extremes of U' = cos x + cos 2x: max 2 at x = 0, min -9/8
    auto sb = slope_bounds(p);
    CHECK(sb.M == Approx(2.0).margin(1e-10));
    CHECK(sb.m == Approx(1.125).margin(1e-10));

    // brute-force oracle at 10^6 points
    auto dense = dense_bounds(p, 1000000);
    CHECK(sb.M >= dense.M - 1e-12);
    CHECK(sb.m >= dense.m - 1e-12);
    CHECK(sb.M == Approx(dense.M).margin(1e-9));
    CHECK(sb.m == Approx(dense.m).margin(1e-9));

    // small mu limit reduces to sin x
    auto q = make_two_harmonic(1e-8);
    auto sbq = slope_bounds(q);
    CHECK(sbq.M == Approx(1.0).margin(1e-6));
    CHECK(sbq.m == Approx(1.0).margin(1e-6));
}

TEST_CASE("sawtooth potential geometry", "[potentials]") {
    CHECK_THROWS_AS(make_sawtooth(0.0, 1.0, 0.05), ConfigError);
    CHECK_THROWS_AS(make_sawtooth(pi, -1.0, 0.05), ConfigError);
    CHECK_THROWS_AS(make_sawtooth(pi, 1.0, 2.0), ConfigError); // eps too large

    auto p = make_sawtooth(pi, 1.0, 0.05);
    // midpoint of the rising ramp, far from the smoothed corners
    CHECK(std::abs(p.value(pi / 2)) < 1e-13);
    CHECK(std::abs(quadrature_mean(p, 1 << 15)) < 1e-10);

    auto q = make_sawtooth(3 * pi / 2, 1.0, 0.05);
    double max_slope = std::max(1.0 / (3 * pi / 2), 1.0 / (2 * pi - 3 * pi / 2));
    for (int j = 0; j < 20000; ++j) {
        double x = two_pi * j / 20000.0;
        CHECK(std::abs(q.slope(x)) <= max_slope + 1e-12);
    }
    // the convolution mollifier attains the ramp slopes exactly
    auto sb = slope_bounds(q);
    CHECK(sb.M == Approx(1.0 / (3 * pi / 2)).margin(1e-9));
    CHECK(sb.m == Approx(1.0 / (pi / 2)).margin(1e-9));
    CHECK(std::abs(quadrature_mean(q, 1 << 15)) < 1e-10);
}

TEST_CASE("potentials are 2*pi periodic", "[potentials]") {
    std::mt19937_64 eng(12345);
    std::uniform_real_distribution<double> ux(-10.0, 10.0);
    std::vector<PeriodicPotential> pots{make_cosine(), make_two_harmonic(0.5),
                                        make_sawtooth(3 * pi / 2, 1.0, 0.05)};
    for (const auto& p : pots) {
        for (int i = 0; i < 1000; ++i) {
            double x = ux(eng);
            CHECK(std::abs(p.value(x + two_pi) - p.value(x)) < 1e-12);
        }
    }
}

TEST_CASE("derivative evaluators agree with finite differences", "[potentials]") {
    std::mt19937_64 eng(777);
    std::uniform_real_distribution<double> ux(0.0, two_pi);
    std::vector<PeriodicPotential> pots{make_cosine(), make_two_harmonic(0.5),
                                        make_sawtooth(pi / 2, 1.0, 0.05)};
    for (const auto& p : pots) {
        double err_h = 0.0, err_h2 = 0.0;
        const double h = 1e-3;
        for (int i = 0; i < 200; ++i) {
            double x = ux(eng);
            double fd_h = (p.value(x + h) - p.value(x - h)) / (2 * h);
            double fd_h2 = (p.value(x + h / 2) - p.value(x - h / 2)) / h;
            err_h = std::max(err_h, std::abs(fd_h - p.slope(x)));
            err_h2 = std::max(err_h2, std::abs(fd_h2 - p.slope(x)));
        }
        double order = std::log2(err_h / err_h2);
        CHECK(order >= 1.9);

        // curvature consistency at a few points
        for (int i = 0; i < 50; ++i) {
            double x = ux(eng);
            double fd = (p.slope(x + h) - p.slope(x - h)) / (2 * h);
            // FD error grows with the local derivative scale inside the
            // mollified corners
            CHECK(fd == Approx(p.curvature(x)).margin(5e-4 + 1e-3 * std::abs(p.curvature(x))));
        }
    }
}

TEST_CASE("antiderivative closed forms", "[potentials]") {
    SECTION("two-harmonic: G = -cos x - (mu/2) cos 2x") {
        auto p = make_two_harmonic(0.5);
        auto g = antiderivative_zero_mean(p);
        CHECK(g(0.0) == Approx(-1.25).margin(1e-9));
        double maxerr = 0.0;
        for (std::size_t j = 0; j <= g.resolution; ++j) {
            double x = double(j) * g.h;
            double exact = -std::cos(x) - 0.25 * std::cos(2 * x);
            maxerr = std::max(maxerr, std::abs(g.samples[j] - exact));
        }
        CHECK(maxerr < 1e-9);
        // Hermite evaluation off the grid
        std::mt19937_64 eng(3);
        std::uniform_real_distribution<double> ux(0.0, two_pi);
        for (int i = 0; i < 200; ++i) {
            double x = ux(eng);
            CHECK(g(x) == Approx(-std::cos(x) - 0.25 * std::cos(2 * x)).margin(1e-9));
        }
        CHECK(std::abs(periodic_mean(g.samples, g.h)) < 1e-10);
    }
    SECTION("cosine: G = -sin x") {
        auto g = antiderivative_zero_mean(make_cosine());
        for (std::size_t j = 0; j <= g.resolution; ++j) {
            double x = double(j) * g.h;
            REQUIRE(std::abs(g.samples[j] + std::sin(x)) < 1e-9);
        }
    }
    SECTION("sawtooth: piecewise quadratic away from kinks") {
        // The constant that actually gives G zero average is b(pi - a)/6;
        // the b pi (pi - a)/3 printed alongside the piecewise form integrates
        // to a nonzero mean and is inconsistent with G' = U, mean G = 0.
        double a = 3 * pi / 2, b = 1.0;
        auto g_const = b * (pi - a) / 6.0;
        auto g1 = antiderivative_zero_mean(make_sawtooth(a, b, 0.05), 1 << 14);
        CHECK(g1(0.0) == Approx(-g_const).margin(5e-3));
        auto g2 = antiderivative_zero_mean(make_sawtooth(a, b, 0.005), 1 << 15);
        CHECK(g2(0.0) == Approx(-g_const).margin(1e-4));
        double x = a / 2;
        double exact = b * x * x / (2 * a) - b * x / 2 - g_const;
        CHECK(g1(x) == Approx(exact).margin(1e-4));
        CHECK(g2(x) == Approx(exact).margin(1e-6));
    }
    SECTION("zero-mean precondition enforced") {
        PeriodicPotential biased = make_cosine();
        auto base = biased.value;
        biased.value = [base](double x) { return base(x) + 0.25; };
        CHECK_THROWS_AS(antiderivative_zero_mean(biased), NumericsError);
    }
}

TEST_CASE("antiderivative differentiates back to U", "[potentials]") {
    auto p = make_two_harmonic(0.3);
    auto g = antiderivative_zero_mean(p);
    double err_h = 0.0, err_h2 = 0.0;
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> ux(0.0, two_pi);
    const double h = 1e-3;
    for (int i = 0; i < 200; ++i) {
        double x = ux(eng);
        err_h = std::max(err_h, std::abs((g(x + h) - g(x - h)) / (2 * h) - p.value(x)));
        err_h2 = std::max(err_h2, std::abs((g(x + h / 2) - g(x - h / 2)) / h - p.value(x)));
    }
    CHECK(std::log2(err_h / err_h2) >= 1.9);
}

TEST_CASE("tabulated potential reproduces its source", "[potentials]") {
    auto src = make_two_harmonic(0.5);
    std::vector<double> xs, us;
    const int k = 256;
    for (int j = 0; j < k; ++j) {
        double x = two_pi * j / double(k);
        xs.push_back(x);
        us.push_back(src.value(x));
    }
    auto tab = make_tabulated(xs, us);
    std::mt19937_64 eng(21);
    std::uniform_real_distribution<double> ux(0.0, two_pi);
    for (int i = 0; i < 300; ++i) {
        double x = ux(eng);
        CHECK(tab.value(x) == Approx(src.value(x)).margin(1e-6));
        CHECK(tab.slope(x) == Approx(src.slope(x)).margin(1e-4));
    }
    CHECK(std::abs(quadrature_mean(tab)) < 1e-10);
    CHECK_THROWS_AS(make_tabulated({0.0, 1.0}, {0.0, 1.0}), ConfigError);
}

TEST_CASE("reflection flips the argument", "[potentials]") {
    auto p = make_two_harmonic(0.5);
    auto q = reflect(p);
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> ux(-two_pi, two_pi);
    for (int i = 0; i < 100; ++i) {
        double x = ux(eng);
        CHECK(q.value(x) == Approx(p.value(-x)).margin(1e-15));
        CHECK(q.slope(x) == Approx(-p.slope(-x)).margin(1e-15));
    }
    // reflected slope bounds swap
    auto sb = slope_bounds(p), sbr = slope_bounds(q);
    CHECK(sbr.M == Approx(sb.m).margin(1e-10));
    CHECK(sbr.m == Approx(sb.M).margin(1e-10));
}
