#include <doctest.h>

#include <cmath>

#include "betactl/acceptance.hpp"
#include "betactl/mfc.hpp"
#include "betactl/rng.hpp"

using namespace betactl;

namespace {

constexpr double kH = 1e-4;

WindowedEstimator filled(double alpha, double tau, double (*y)(double), double u) {
    WindowedEstimator w(alpha, tau, kH);
    for (std::size_t k = 0; k < w.window_points(); ++k) w.push(y(static_cast<double>(k) * kH), u);
    return w;
}

}  // namespace

TEST_CASE("windowed estimator annihilates constants") {
    const auto w = filled(50.0, 0.8, [](double) { return 12.5; }, 0.0);
    CHECK(std::abs(w.estimate()) <= 1e-9);
}

TEST_CASE("windowed estimator reproduces a ramp slope") {
    const auto w = filled(50.0, 0.8, [](double t) { return -2.75 * t + 1.0; }, 0.0);
    CHECK(std::abs(w.estimate() + 2.75) <= 1e-6 * 2.75);
}

TEST_CASE("windowed estimator removes a constant input") {
    const auto w = filled(50.0, 0.8, [](double) { return 4.0; }, 0.8);
    CHECK(std::abs(w.estimate() + 40.0) <= 1e-6 * 40.0);
}

TEST_CASE("windowed estimator refuses to answer while warming up") {
    WindowedEstimator w(50.0, 0.01, kH);
    CHECK(w.window_points() == 101);
    for (int k = 0; k < 100; ++k) w.push(1.0, 0.0);
    CHECK_FALSE(w.ready());
    CHECK_THROWS_AS(w.estimate(), EstimatorWarmingUp);
    w.push(1.0, 0.0);
    CHECK(w.ready());
    CHECK_NOTHROW(w.estimate());
}

TEST_CASE("windowed estimator follows the newest window") {
    WindowedEstimator w(50.0, 0.01, kH);
    for (int k = 0; k < 500; ++k) w.push(3.0, 0.0);
    for (int k = 0; k < 101; ++k) w.push(5.0 * k * kH, 0.0);
    // 100 trapezoid intervals leave a quadrature error of about 2e-4
    CHECK(w.estimate() == doctest::Approx(5.0).epsilon(5e-4));
}

TEST_CASE("filtered estimator settles to zero on a constant output") {
    FilteredEstimator f(50.0, 0.8, kH);
    f.observe(1.0, 0.0);
    for (int k = 0; k < 1000; ++k) CHECK(f.observe(1.0, 0.0) == 0.0);
}

TEST_CASE("filtered estimator step response") {
    for (auto disc : {Discretization::forward_euler, Discretization::exact}) {
        FilteredEstimator f(50.0, 0.8, kH, disc);
        const double R = 7.0;
        // raw = (y - y_prev) / h - alpha u_prev = R
        double out = 0.0;
        const auto n = static_cast<int>(std::lround(0.8 / kH));
        for (int k = 0; k < n; ++k) out = f.update(0.0, R * kH, 0.0);
        CHECK(out == doctest::Approx(R * (1.0 - std::exp(-1.0))).epsilon(0.02));
    }
}

TEST_CASE("filtered estimator tracks a ramp") {
    FilteredEstimator f(50.0, 0.8, kH);
    double out = 0.0;
    for (int k = 0; k < 200000; ++k) out = f.observe(3.0 * k * kH, 0.0);
    CHECK(out == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("estimator front end") {
    EstimatorConfig cfg;
    UltraLocalEstimator e(50.0, kH, cfg);
    CHECK_FALSE(e.ready());
    CHECK(e.estimate() == 0.0);
    e.observe(1.0, 0.0);
    e.observe(1.0, 0.0);
    CHECK(e.ready());

    cfg.variant = EstimatorVariant::windowed;
    cfg.tau_w = 0.001;
    UltraLocalEstimator w(50.0, kH, cfg);
    for (int k = 0; k < 10; ++k) w.observe(0.0, 0.0);
    CHECK_FALSE(w.ready());
    w.observe(0.0, 0.0);
    CHECK(w.ready());
}

TEST_CASE("iP control law") {
    IpController c;
    CHECK(c.control(5.0, 100.0, 0.1, true) == 0.0);
    CHECK(c.control(0.0, c.y_star, 0.5, true) == 0.0);
    CHECK(c.control(2.0, 10.1, 0.5, true) == doctest::Approx(-1.04).epsilon(1e-14));
    CHECK(c.control(2.0, 10.1, 0.5, false) == 0.0);
    CHECK(c.control(2.0, 10.1, c.t_on, true) == 0.0);
}

TEST_CASE("iP output stays inside the saturation bounds") {
    IpController c;
    c.u_min = -3.0;
    c.u_max = 2.0;
    const NoiseStream rng(3, 0);
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const double u = c.control(1e3 * rng.normal(2 * k), 1e3 * rng.normal(2 * k + 1), 1.0, true);
        REQUIRE(u >= -3.0);
        REQUIRE(u <= 2.0);
    }
}

TEST_CASE("controller validation") {
    IpController c;
    CHECK_NOTHROW(c.validate());
    c.K = -1.0;
    CHECK_THROWS_WITH(c.validate(), doctest::Contains("K must be positive"));
    c = IpController{};
    c.alpha = 0.0;
    CHECK_THROWS(c.validate());
    c = IpController{};
    c.u_min = 1.0;
    c.u_max = 1.0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("discrete PI and iP laws") {
    CHECK(pi_velocity_step(0.7, 0.0, 0.0, 3.0, 4.0, 0.1) == 0.7);
    CHECK(pi_velocity_step(1.0, 0.5, 0.0, 1.0, 0.0, 0.1) == doctest::Approx(1.5));
    CHECK(pi_velocity_step(0.0, 2.0, 1.0, -20.0, 100.0, 0.001) == doctest::Approx(-19.8).epsilon(1e-14));
    CHECK(ip_discrete_step(0.7, 0.0, 0.0, 5.0, 50.0, 0.001) == 0.7);
    CHECK(ip_discrete_step(0.0, 2.0, 1.0, 5.0, 50.0, 0.001) == doctest::Approx(-19.8).epsilon(1e-14));
}

TEST_CASE("gain correspondence") {
    const auto g = gains_from_ip(50.0, 5.0, 0.001);
    CHECK(g.kp == -20.0);
    CHECK(g.ki == 100.0);
    CHECK(gains_from_ip(50.0, 0.0, 0.001).ki == 0.0);
    const auto half = gains_from_ip(50.0, 5.0, 0.0005);
    CHECK(half.kp == doctest::Approx(2.0 * g.kp));
    CHECK(half.ki == doctest::Approx(2.0 * g.ki));
}

TEST_CASE("PI and iP agree on random triples") {
    const NoiseStream rng(11, 0);
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = rng.normal(6 * i), e = rng.normal(6 * i + 1), ep = rng.normal(6 * i + 2);
        const double alpha = 1.0 + 100.0 * rng.uniform(6 * i + 3);
        const double K = 20.0 * rng.uniform(6 * i + 4);
        const double h = 1e-4 + 1e-2 * rng.uniform(6 * i + 5);
        const auto g = gains_from_ip(alpha, K, h);
        const double a = ip_discrete_step(u, e, ep, K, alpha, h);
        const double b = pi_velocity_step(u, e, ep, g.kp, g.ki, h);
        REQUIRE(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(e - ep) / (alpha * h)}));
    }
}

TEST_CASE("synthetic ultra-local plant settles within 6/K") {
    EstimatorConfig filtered;
    EstimatorConfig windowed;
    windowed.variant = EstimatorVariant::windowed;
    for (double f0 : {-100.0, -37.5, 0.0, 12.0, 99.0}) {
        CHECK(synthetic_plant_error_ratio(f0, 50.0, 5.0, kH, filtered, 1.2) < 0.01);
        CHECK(synthetic_plant_error_ratio(f0, 50.0, 5.0, kH, windowed, 1.2) < 0.01);
    }
}

TEST_CASE("synthetic plant is slow with a tiny gain") {
    EstimatorConfig cfg;
    CHECK(synthetic_plant_error_ratio(10.0, 50.0, 0.01, kH, cfg, 1.2) > 0.9);
}
