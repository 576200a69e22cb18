#pragma once

// Spectral summaries of simulated series.
//
// Powers are mean-square values in (series unit)^2: a sinusoid of amplitude A
// has tone power A^2 / 2 and, when it falls inside a band, band power ~A^2 / 2.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betactl/scenarios.hpp"

namespace betactl {

enum class Window { rectangular, hann };

/// Mean-removed, windowed periodogram of a real series.
struct Periodogram {
    double fs = 0.0;
    std::size_t n = 0;
    double window_energy = 0.0;  // sum of w[n]^2
    /// raw[k] = |X_w[k]|^2 / n for k = 0..n/2.
    std::vector<double> raw;

    double bin_hz(std::size_t k) const noexcept { return static_cast<double>(k) * fs / static_cast<double>(n); }
    /// Sum of all n two-sided bins, equal to the windowed signal energy.
    double two_sided_sum() const noexcept;
    /// One-sided mean-square power attributed to bin k.
    double power(std::size_t k) const noexcept;
};

Periodogram periodogram(std::span<const double> series, double fs, Window window);

/// Goertzel power of the mean-removed series at f, 2 |X(f)|^2 / N^2.
/// Requires at least 10 periods of f.
double tone_power(std::span<const double> series, double fs, double f);

/// Hann periodogram power over bins with centers in [f_lo, f_hi].
double band_power(std::span<const double> series, double fs, double f_lo, double f_hi);

/// Peak of the Hann periodogram, refined by a parabola through the three
/// bins around it. Throws Error("no oscillation") for a constant series.
double dominant_frequency(std::span<const double> series, double fs);

/// Shortest span accepted by band_power and dominant_frequency.
inline constexpr double kMinSpectralSpan = 0.5;

struct TimeSpan {
    double start = 0.0;
    double end = 0.0;
};

/// Samples of `series` whose grid time lies in [span.start, span.end].
std::span<const double> slice(const SimResult& r, const std::vector<double>& series, TimeSpan span);

double mean(std::span<const double> v);

/// mean(closed y_cc) / mean(open y_cc) over the span. Throws
/// Error("no pathological activity to suppress") for a zero open-loop mean.
double suppression_ratio(const SimResult& open, const SimResult& closed, TimeSpan span);

struct SpectrumReport {
    int scenario_id = 0;
    LoopMode mode = LoopMode::open;
    std::string series;
    TimeSpan span;
    std::optional<double> dominant_frequency_hz;  // empty when the series is flat
    double beta_power = 0.0;
    double tone50_power = 0.0;
    double mean_ycc = 0.0;
    std::optional<double> suppression_ratio;  // closed-loop reports only
};

/// Report for one series ("x1" or "x2") of a run.
SpectrumReport spectrum_report(const SimResult& r, const std::string& series, TimeSpan span);

/// Final `length` seconds of the run.
TimeSpan final_span(const SimResult& r, double length = 0.5);

}  // namespace betactl
