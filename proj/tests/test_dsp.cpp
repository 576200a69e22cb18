#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "betactl/dsp.hpp"
#include "betactl/rng.hpp"

using namespace betactl;

namespace {

constexpr double kFs = 10000.0;

double sine(double f, double a, std::size_t k) {
    return a * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(k) / kFs);
}

}  // namespace

TEST_CASE("band-pass design") {
    const auto f = design_bandpass(13.0, 30.0, kFs, 2001);
    CHECK(f.size() == 2001);
    CHECK(f.group_delay() == doctest::Approx(0.1));
    const auto t = f.taps();
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == t[t.size() - 1 - i]);
    CHECK(passband_gain(f, 21.5) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(passband_gain(f, 50.0) < 0.05);
    CHECK(passband_gain(f, 0.0) < 0.01);
}

TEST_CASE("bad band edges") {
    CHECK_THROWS_WITH(design_bandpass(30.0, 13.0, kFs, 2001), doctest::Contains("bad band edges"));
    CHECK_THROWS_WITH(design_bandpass(13.0, 6000.0, kFs, 2001), doctest::Contains("bad band edges"));
    CHECK_THROWS_WITH(design_bandpass(0.0, 30.0, kFs, 2001), doctest::Contains("bad band edges"));
    CHECK_THROWS(design_bandpass(13.0, 30.0, kFs, 2000));
}

TEST_CASE("zero input gives zero output") {
    auto f = design_bandpass(13.0, 30.0, kFs, 2001);
    for (int k = 0; k < 5000; ++k) CHECK(f.step(0.0) == 0.0);
}

TEST_CASE("impulse response is the tap sequence") {
    auto f = design_bandpass(13.0, 30.0, kFs, 101);
    const std::vector<double> taps(f.taps().begin(), f.taps().end());
    for (std::size_t k = 0; k < taps.size(); ++k) CHECK(f.step(k == 0 ? 1.0 : 0.0) == taps[k]);
    CHECK(f.step(0.0) == 0.0);
}

TEST_CASE("streaming filter agrees with direct convolution") {
    auto f = design_bandpass(13.0, 30.0, kFs, 101);
    const std::vector<double> taps(f.taps().begin(), f.taps().end());
    const NoiseStream rng(5, 0);
    std::vector<double> xs;
    for (std::uint64_t k = 0; k < 400; ++k) {
        xs.push_back(rng.normal(k));
        const double got = f.step(xs.back());
        double want = 0.0;
        for (std::size_t j = 0; j < taps.size() && j < xs.size(); ++j) want += taps[j] * xs[xs.size() - 1 - j];
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("filter is linear") {
    auto a = design_bandpass(13.0, 30.0, kFs, 201);
    auto b = a;
    auto ab = a;
    const NoiseStream rng(6, 0);
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const double x = rng.normal(2 * k), y = rng.normal(2 * k + 1);
        const double lhs = ab.step(2.0 * x - 3.0 * y);
        const double rhs = 2.0 * a.step(x) - 3.0 * b.step(y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("steady 21.5 Hz tone comes out at the DTFT gain") {
    auto f = design_bandpass(13.0, 30.0, kFs, 2001);
    const double gain = passband_gain(f, 21.5);
    double peak = 0.0;
    for (std::size_t k = 0; k < 3 * 2001; ++k) {
        const double y = f.step(sine(21.5, 1.0, k));
        if (k >= 2 * 2001) peak = std::max(peak, std::abs(y));
    }
    CHECK(peak == doctest::Approx(gain).epsilon(0.01));
}

TEST_CASE("output lags the input by the group delay") {
    auto f = design_bandpass(13.0, 30.0, kFs, 2001);
    std::vector<double> y;
    for (std::size_t k = 0; k < 8000; ++k) y.push_back(f.step(sine(21.5, 1.0, k)));
    const double gain = passband_gain(f, 21.5);
    // after the transient y[k] = gain * x[k - 1000]
    for (std::size_t k = 5000; k < 8000; k += 37) CHECK(y[k] == doctest::Approx(gain * sine(21.5, 1.0, k - 1000)).scale(1.0).epsilon(1e-6));
}

TEST_CASE("DC gain of zero-sum taps") {
    const FirFilter f({1.0, -2.0, 1.0}, kFs);
    CHECK(std::abs(passband_gain(f, 0.0)) <= 1e-12);
}

TEST_CASE("sliding peak-to-peak") {
    SlidingExtrema s(3);
    s.step(1.0);
    s.step(5.0);
    CHECK(s.step(2.0) == 4.0);
    CHECK(s.filled());

    SlidingExtrema c(10);
    for (int k = 0; k < 50; ++k) CHECK(c.step(3.25) == 0.0);
    CHECK_THROWS(SlidingExtrema(0));
}

TEST_CASE("sliding peak-to-peak matches brute force") {
    const NoiseStream rng(77, 0);
    for (std::size_t window : {1u, 2u, 5u, 64u, 769u}) {
        SlidingExtrema s(window);
        std::vector<double> xs;
        for (std::uint64_t k = 0; k < 10000; ++k) {
            xs.push_back(rng.normal(k));
            const double got = s.step(xs.back());
            const auto first = xs.end() - static_cast<std::ptrdiff_t>(std::min(window, xs.size()));
            const auto [lo, hi] = std::minmax_element(first, xs.end());
            REQUIRE(got == *hi - *lo);
        }
    }
}

TEST_CASE("sliding peak-to-peak of a 20 Hz sine") {
    SlidingExtrema s(beta_window_length(kFs));
    CHECK(s.window() == 769);
    double got = 0.0;
    for (std::size_t k = 0; k < 3000; ++k) got = s.step(sine(20.0, 2.5, k));
    CHECK(got == doctest::Approx(5.0).epsilon(0.005));
}

TEST_CASE("pipeline warm-up and amplitude") {
    BetaPipeline p(PipelineConfig{}, kFs);
    CHECK(p.warmup_samples() == 2001 + 769 - 1);
    CHECK(p.compensation() == doctest::Approx(1.0 / passband_gain(p.filter(), 21.5)));
    PipelineSample s;
    for (std::size_t k = 0; k < 10000; ++k) {
        s = p.step(sine(21.5, 3.0, k));
        if (k + 1 < p.warmup_samples()) REQUIRE_FALSE(s.ready);
        if (k + 1 == p.warmup_samples()) CHECK(s.ready);
    }
    CHECK(s.y_cc == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("pipeline rejects a 50 Hz tone relative to mid-band") {
    BetaPipeline p(PipelineConfig{}, kFs);
    CHECK(passband_gain(p.filter(), 21.5) / passband_gain(p.filter(), 50.0) >= 20.0);
    double y = 0.0;
    for (std::size_t k = 0; k < 10000; ++k) y = p.step(sine(50.0, 3.0, k)).y_cc;
    CHECK(y < 6.0 / 20.0);
}

TEST_CASE("pipeline reset restores the initial state") {
    BetaPipeline p(PipelineConfig{}, kFs);
    std::vector<double> first;
    for (std::size_t k = 0; k < 4000; ++k) first.push_back(p.step(sine(21.5, 1.0, k)).y_cc);
    p.reset();
    for (std::size_t k = 0; k < 4000; ++k) REQUIRE(p.step(sine(21.5, 1.0, k)).y_cc == first[k]);
}
