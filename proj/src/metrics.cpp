#include "betactl/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "betactl/error.hpp"

namespace betactl {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex fftw_planner_mutex;

std::vector<double> demeaned(std::span<const double> series) {
    const double m = mean(series);
    std::vector<double> out(series.begin(), series.end());
    for (double& v : out) v -= m;
    return out;
}

void require_span(std::size_t n, double fs, double min_seconds) {
    if (static_cast<double>(n) / fs < min_seconds * (1.0 - 1e-9)) throw Error("span too short");
}

}  // namespace

double mean(std::span<const double> v) {
    if (v.empty()) throw Error("mean of an empty series");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double Periodogram::two_sided_sum() const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const bool self_mirror = k == 0 || (n % 2 == 0 && k == n / 2);
        s += self_mirror ? raw[k] : 2.0 * raw[k];
    }
    return s;
}

double Periodogram::power(std::size_t k) const noexcept {
    const bool self_mirror = k == 0 || (n % 2 == 0 && k == n / 2);
    return (self_mirror ? 1.0 : 2.0) * raw[k] / window_energy;
}

Periodogram periodogram(std::span<const double> series, double fs, Window window) {
    const std::size_t n = series.size();
    if (n < 2) throw Error("periodogram needs at least two samples");
    std::vector<double> x = demeaned(series);

    Periodogram p;
    p.fs = fs;
    p.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == Window::hann) {
            w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
        }
        x[i] *= w;
        p.window_energy += w * w;
    }

    const std::size_t bins = n / 2 + 1;
    auto* spectrum = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins));
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(), spectrum, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    p.raw.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double re = spectrum[k][0];
        const double im = spectrum[k][1];
        p.raw[k] = (re * re + im * im) / static_cast<double>(n);
    }
    {
        std::lock_guard lock(fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(spectrum);
    return p;
}

double tone_power(std::span<const double> series, double fs, double f) {
    if (!(f > 0.0) || !(f < fs / 2.0)) throw Error("tone frequency must lie in (0, fs/2)");
    require_span(series.size(), fs, 10.0 / f);
    const std::vector<double> x = demeaned(series);

    // Goertzel recurrence; the final magnitude equals |DTFT(f)|.
    const double w = 2.0 * std::numbers::pi * f / fs;
    const double coeff = 2.0 * std::cos(w);
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
        const double s0 = v + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    const double mag2 = s1 * s1 + s2 * s2 - coeff * s1 * s2;
    const auto n = static_cast<double>(x.size());
    return 2.0 * mag2 / (n * n);
}

double band_power(std::span<const double> series, double fs, double f_lo, double f_hi) {
    require_span(series.size(), fs, kMinSpectralSpan);
    const Periodogram p = periodogram(series, fs, Window::hann);
    double acc = 0.0;
    for (std::size_t k = 0; k < p.raw.size(); ++k) {
        const double f = p.bin_hz(k);
        if (f >= f_lo && f <= f_hi) acc += p.power(k);
    }
    return acc;
}

double dominant_frequency(std::span<const double> series, double fs) {
    require_span(series.size(), fs, kMinSpectralSpan);
    const Periodogram p = periodogram(series, fs, Window::hann);

    std::size_t peak = 1;
    for (std::size_t k = 1; k < p.raw.size(); ++k) {
        if (p.raw[k] > p.raw[peak]) peak = k;
    }
    const double scale = std::max(1.0, std::abs(mean(series)));
    if (!(p.raw[peak] > 1e-24 * scale * scale * static_cast<double>(p.n))) throw Error("no oscillation");

    double offset = 0.0;
    if (peak + 1 < p.raw.size()) {
        const double a = p.raw[peak - 1], b = p.raw[peak], c = p.raw[peak + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    return (static_cast<double>(peak) + offset) * fs / static_cast<double>(p.n);
}

std::span<const double> slice(const SimResult& r, const std::vector<double>& series, TimeSpan span) {
    if (series.size() != r.t.size()) throw Error("series does not match the time grid");
    constexpr double eps = 1e-9;
    const auto first = std::lower_bound(r.t.begin(), r.t.end(), span.start - eps);
    const auto last = std::upper_bound(r.t.begin(), r.t.end(), span.end + eps);
    if (first >= last) throw Error("analysis span holds no samples");
    const auto offset = static_cast<std::size_t>(first - r.t.begin());
    return {series.data() + offset, static_cast<std::size_t>(last - first)};
}

double suppression_ratio(const SimResult& open, const SimResult& closed, TimeSpan span) {
    if (open.t.size() != closed.t.size()) throw Error("open and closed runs use different grids");
    const double open_mean = mean(slice(open, open.y_cc, span));
    if (open_mean == 0.0) throw Error("no pathological activity to suppress");
    return mean(slice(closed, closed.y_cc, span)) / open_mean;
}

SpectrumReport spectrum_report(const SimResult& r, const std::string& series, TimeSpan span) {
    const std::vector<double>* v = nullptr;
    if (series == "x1") v = &r.x1;
    else if (series == "x2") v = &r.x2;
    else throw Error("unknown series '" + series + "'");

    if (!(r.h > 0.0)) throw Error("result has no step size");
    const double fs = r.sample_rate();
    const auto s = slice(r, *v, span);

    SpectrumReport rep;
    rep.scenario_id = r.scenario_id;
    rep.mode = r.mode;
    rep.series = series;
    rep.span = span;
    try {
        rep.dominant_frequency_hz = dominant_frequency(s, fs);
    } catch (const Error&) {
        rep.dominant_frequency_hz.reset();
    }
    rep.beta_power = band_power(s, fs, 13.0, 30.0);
    rep.tone50_power = tone_power(s, fs, 50.0);
    rep.mean_ycc = mean(slice(r, r.y_cc, span));
    return rep;
}

TimeSpan final_span(const SimResult& r, double length) {
    if (r.t.empty()) throw Error("empty result");
    return {r.t.back() - length, r.t.back()};
}

}  // namespace betactl
