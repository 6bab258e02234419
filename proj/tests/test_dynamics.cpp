#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ratchet/dynamics.hpp"
#include "ratchet/limit_cycle.hpp"

using namespace ratchet;
using Catch::Approx;

namespace {

// degenerate flat potential (test-only): U' = 0, so v(t) has a closed form
PeriodicPotential flat_potential() {
    PeriodicPotential p;
    p.name = "flat";
    p.value = [](double) { return 0.0; };
    p.slope = [](double) { return 0.0; };
    p.curvature = [](double) { return 0.0; };
    return p;
}

double flat_v(double E, double gamma, double v0, double t) {
    return E / gamma + (v0 - E / gamma) * std::exp(-gamma * t);
}

double flat_x(double E, double gamma, double x0, double v0, double t) {
    return x0 + E / gamma * t + (v0 - E / gamma) * (1.0 - std::exp(-gamma * t)) / gamma;
}

} // namespace

TEST_CASE("flat-potential closed form", "[dynamics]") {
    auto p = flat_potential();
    double E = 2.0, gamma = 0.7, v0 = 5.0;
    double samples[3] = {1.0, 4.0, 10.0};
    auto tr = integrate_autonomous(p, E, gamma, State{1.0, v0}, 10.0, {}, samples);
    REQUIRE(tr.t.size() == 4);
    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        double t = tr.t[i];
        CHECK(tr.v[i] == Approx(flat_v(E, gamma, v0, t)).margin(1e-8));
        CHECK(tr.x[i] == Approx(flat_x(E, gamma, 1.0, v0, t)).margin(1e-7));
    }
}

TEST_CASE("single RK4 step on the flat potential converges at fourth order", "[dynamics]") {
    auto p = flat_potential();
    double E = 1.5, gamma = 1.0, v0 = 3.0;
    auto err = [&](double dt) {
        State s = step_autonomous(p, E, gamma, State{0.0, v0}, dt);
        return std::abs(s.v - flat_v(E, gamma, v0, dt));
    };
    double e1 = err(0.1), e2 = err(0.05);
    CHECK(std::log2(e1 / e2) >= 4.5); // local error is O(dt^5)
}

TEST_CASE("undriven pendulum equilibrium is stationary", "[dynamics]") {
    auto p = make_cosine();
    State s = step_autonomous(p, 0.0, 1.0, State{0.0, 0.0}, 0.05);
    CHECK(s.x == 0.0);
    CHECK(s.v == 0.0);
}

TEST_CASE("fixed-step RK4 observed order on a smooth segment", "[dynamics]") {
    auto p = make_cosine();
    double E = 2.0, gamma = 1.0, t_end = 2.0;
    State s0{0.3, 1.5};
    IntegratorConfig tight;
    tight.rtol = 1e-13;
    tight.atol = 1e-14;
    double samples[1] = {t_end};
    auto ref = integrate_autonomous(p, E, gamma, s0, t_end, tight, samples);

    auto rk4_err = [&](double dt) {
        IntegratorConfig cfg;
        cfg.method = IntegratorConfig::Method::rk4_fixed;
        cfg.dt = dt;
        auto tr = integrate_autonomous(p, E, gamma, s0, t_end, cfg, samples);
        return std::abs(tr.x.back() - ref.x.back()) + std::abs(tr.v.back() - ref.v.back());
    };
    double e1 = rk4_err(1e-2), e2 = rk4_err(5e-3);
    CHECK(std::log2(e1 / e2) >= 3.7);
}

TEST_CASE("energy balance across one step", "[dynamics]") {
    auto p = make_two_harmonic(0.5);
    double E = 3.0, gamma = 1.0, dt = 1e-3;
    State s0{0.7, 2.2};
    State s1 = step_autonomous(p, E, gamma, s0, dt);
    State half = step_autonomous(p, E, gamma, s0, dt / 2);

    double de = (0.5 * s1.v * s1.v + p.value(s1.x)) - (0.5 * s0.v * s0.v + p.value(s0.x));
    // Simpson quadrature of the power integral (E - gamma v) v dt
    auto power = [&](const State& s) { return (E - gamma * s.v) * s.v; };
    double work = dt / 6.0 * (power(s0) + 4.0 * power(half) + power(s1));
    CHECK(de == Approx(work).margin(1e-12));
}

TEST_CASE("invariant strip for a static field beyond the bounds", "[dynamics]") {
    auto p = make_cosine();
    double E = 2.0, gamma = 1.0; // strip [(E-M)/gamma, (E+m)/gamma] = [1, 3]
    std::vector<double> samples;
    for (int i = 1; i <= 400; ++i) samples.push_back(50.0 * i / 400.0);
    for (double v0 : {1.0, 1.5, 2.9, 3.0}) {
        auto tr = integrate_autonomous(p, E, gamma, State{0.0, v0}, 50.0, {}, samples);
        for (double v : tr.v) {
            CHECK(v >= 1.0 - 1e-9);
            CHECK(v <= 3.0 + 1e-9);
        }
    }
}

TEST_CASE("velocity bound |v(t)| <= C0 (1 + |v0|)", "[dynamics]") {
    auto p = make_cosine();
    double E = 2.0, gamma = 1.0;
    for (double v0 : {0.0, 10.0, 100.0}) {
        auto tr = integrate_autonomous(p, E, gamma, State{0.0, v0}, 30.0);
        double vmax = 0.0;
        for (double v : tr.v) vmax = std::max(vmax, std::abs(v));
        CHECK(vmax / (1.0 + std::abs(v0)) <= 3.5);
    }
}

TEST_CASE("driven trajectory matches the frozen-field flow on a short window", "[dynamics]") {
    auto p = make_two_harmonic(0.5);
    auto proto = make_protocol(3.0, 1.0, 1.0, 0.01, 1e-6);
    double gamma = 1.0, t_end = 5.0;
    double samples[2] = {2.0, 5.0};
    auto driven = integrate_driven(p, proto, gamma, State{0.5, 0.0}, t_end, {}, samples);
    auto frozen = integrate_autonomous(p, 3.0, gamma, State{0.5, 0.0}, t_end, {}, samples);
    for (std::size_t i = 0; i < driven.t.size(); ++i) {
        CHECK(driven.x[i] == Approx(frozen.x[i]).margin(1e-8));
        CHECK(driven.v[i] == Approx(frozen.v[i]).margin(1e-8));
    }
}

TEST_CASE("driven velocity stays uniformly bounded in lambda and delta", "[dynamics]") {
    auto p = make_cosine();
    double gamma = 1.0;
    for (double lambda : {1e-1, 1e-2})
        for (double delta : {0.05, 0.01})
            for (double v0 : {0.0, 20.0}) {
                auto proto = make_protocol(3.0, 2.0, 1.0, delta, lambda);
                auto tr = integrate_driven(p, proto, gamma, State{0.0, v0}, 2.0 / lambda);
                double vmax = 0.0;
                for (double v : tr.v) vmax = std::max(vmax, std::abs(v));
                CHECK(vmax / (1.0 + std::abs(v0)) <= 4.5);
            }
}

TEST_CASE("drift over slow periods approximates the cycle-weighted average", "[dynamics]") {
    auto p = make_cosine();
    double gamma = 1.0, lambda = 1e-3, T = 1.0, delta = 1e-3;
    auto proto = make_protocol(3.0, 2.0, T, delta, lambda);
    auto up = find_cycle(p, 3.0, gamma);
    double v_down = negative_field_cycle(p, -2.0, gamma).mean_velocity;
    double per_period =
        (proto.t_delta * up.mean_velocity + (T - proto.t_delta - 2 * delta) * v_down) / lambda;

    auto drift_over = [&](int periods) {
        double t1 = periods * T / lambda;
        double samples[1] = {t1};
        auto tr = integrate_driven(p, proto, gamma, State{0.0, up.v_star}, t1, {}, samples);
        return tr.x.back() - tr.x.front();
    };
    // per-period corrections stay bounded: transitions cost O(lambda^-1 delta)
    // and each plateau entry costs an O(1) relaxation offset
    double d1 = drift_over(1);
    CHECK(std::abs(d1 - per_period) <= 10.0);
    double d5 = drift_over(5);
    CHECK(std::abs(d5 - 5.0 * per_period) <= 20.0);
    CHECK(std::abs(d5 - 5.0 * per_period) / 5.0 <= std::abs(d1 - per_period) + 1.0);
}

TEST_CASE("mirror symmetry of the symmetric protocol", "[dynamics]") {
    // even potential + E1 = E2 gives E(tau + T/2) = -E(tau) exactly, so
    // z(s) = -x(s + T/(2 lambda)) solves the same driven equation.
    auto p = make_cosine();
    double gamma = 1.0, lambda = 0.05, T = 1.0;
    auto proto = make_protocol(2.0, 2.0, T, 0.05, lambda);
    double h = 0.5 * T / lambda;

    IntegratorConfig tight;
    tight.rtol = 1e-11;
    tight.atol = 1e-13;
    std::vector<double> stage1{h};
    auto a = integrate_driven(p, proto, gamma, State{0.4, 0.3}, h, tight, stage1);
    double xh = a.x.back(), vh = a.v.back();

    std::vector<double> checks{1.0, 3.0, 7.0, 12.0};
    std::vector<double> extended;
    for (double s : checks) extended.push_back(h + s);
    auto cont = integrate_driven(p, proto, gamma, State{0.4, 0.3}, h + 13.0, tight, extended);
    auto mirror = integrate_driven(p, proto, gamma, State{-xh, -vh}, 13.0, tight, checks);
    for (std::size_t i = 0; i < checks.size(); ++i) {
        CHECK(mirror.x[i + 1] == Approx(-cont.x[i + 1]).margin(1e-6));
        CHECK(mirror.v[i + 1] == Approx(-cont.v[i + 1]).margin(1e-6));
    }
}

TEST_CASE("trajectory recording basics", "[dynamics]") {
    auto p = make_cosine();
    auto tr = integrate_autonomous(p, 2.0, 1.0, State{0.1, 0.5}, 3.0);
    REQUIRE(!tr.t.empty());
    CHECK(tr.t.front() == 0.0);
    CHECK(tr.x.front() == 0.1);
    CHECK(tr.v.front() == 0.5);
    for (std::size_t i = 1; i < tr.t.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
    CHECK(tr.t.back() == Approx(3.0));
    CHECK(tr.steps > 0);

    CHECK_THROWS_AS(integrate_autonomous(p, 2.0, 1.0, State{0, 0}, -1.0), ConfigError);
}

TEST_CASE("adaptive and fixed-step integrators agree", "[dynamics]") {
    auto p = make_two_harmonic(0.5);
    IntegratorConfig fixed;
    fixed.method = IntegratorConfig::Method::rk4_fixed;
    fixed.dt = 2e-4;
    double samples[1] = {10.0};
    auto a = integrate_autonomous(p, 4.0, 1.0, State{0.0, 2.0}, 10.0, {}, samples);
    auto b = integrate_autonomous(p, 4.0, 1.0, State{0.0, 2.0}, 10.0, fixed, samples);
    CHECK(a.x.back() == Approx(b.x.back()).margin(1e-6));
    CHECK(a.v.back() == Approx(b.v.back()).margin(1e-6));
}
