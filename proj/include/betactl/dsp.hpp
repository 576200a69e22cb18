#pragma once

// Beta biomarker extraction: band-pass FIR, scalar gain compensation, and a
// sliding-window peak-to-peak amplitude.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

namespace betactl {

/// Streaming FIR filter. Inputs before the first sample count as zeros.
class FirFilter {
public:
    FirFilter(std::vector<double> taps, double fs);

    double step(double sample) noexcept;
    void reset() noexcept;

    std::span<const double> taps() const noexcept { return taps_; }
    std::size_t size() const noexcept { return taps_.size(); }
    double sample_rate() const noexcept { return fs_; }
    /// Group delay of a symmetric (linear-phase) filter in seconds.
    double group_delay() const noexcept;
    /// True once the delay line holds only real input samples.
    bool filled() const noexcept { return count_ >= taps_.size(); }

private:
    std::vector<double> taps_;
    std::vector<double> line_;  // doubled ring so the newest N samples are contiguous
    std::size_t pos_ = 0;
    std::uint64_t count_ = 0;
    double fs_;
};

/// Hamming-windowed sinc band-pass. Requires 0 < f_lo < f_hi < fs/2 and an
/// odd tap count >= 3; throws Error("bad band edges") otherwise.
FirFilter design_bandpass(double f_lo, double f_hi, double fs, std::size_t taps);

/// |H(f)| of the filter's taps.
double passband_gain(const FirFilter& filter, double f);

/// Running max - min over the trailing `window` samples, amortized O(1).
class SlidingExtrema {
public:
    explicit SlidingExtrema(std::size_t window);

    double step(double sample);
    void reset() noexcept;

    std::size_t window() const noexcept { return window_; }
    bool filled() const noexcept { return count_ >= window_; }

private:
    std::size_t window_;
    std::uint64_t count_ = 0;
    std::deque<std::pair<std::uint64_t, double>> max_;  // values decreasing front to back
    std::deque<std::pair<std::uint64_t, double>> min_;  // values increasing front to back
};

/// round(fs / 13): one period of the slowest beta wave.
std::size_t beta_window_length(double fs);

struct PipelineConfig {
    double f_lo = 13.0;
    double f_hi = 30.0;
    std::size_t taps = 2001;
    double compensation_hz = 21.5;
    double ptp_rate_hz = 13.0;  // window = round(fs / ptp_rate_hz)
};

struct PipelineSample {
    double y_beta = 0.0;  // band-pass output
    double y_cc = 0.0;    // gain-compensated peak-to-peak amplitude
    bool ready = false;
};

/// Band-pass -> gain compensation -> peak-to-peak. Outputs are computed from
/// the first sample but flagged not ready until the peak-to-peak window holds
/// only samples produced by a full FIR delay line.
class BetaPipeline {
public:
    BetaPipeline(const PipelineConfig& cfg, double fs);

    PipelineSample step(double x);
    void reset() noexcept;

    const FirFilter& filter() const noexcept { return filter_; }
    double compensation() const noexcept { return compensation_; }
    std::size_t window() const noexcept { return extrema_.window(); }
    /// Number of samples before the first ready output.
    std::size_t warmup_samples() const noexcept { return filter_.size() + extrema_.window() - 1; }

private:
    FirFilter filter_;
    SlidingExtrema extrema_;
    double compensation_;
    std::uint64_t count_ = 0;
};

}  // namespace betactl
