#include "betactl/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "betactl/error.hpp"

namespace betactl {

namespace {

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

}  // namespace

FirFilter::FirFilter(std::vector<double> taps, double fs)
    : taps_(std::move(taps)), line_(2 * taps_.size(), 0.0), fs_(fs) {
    if (taps_.empty()) throw Error("FIR filter needs at least one tap");
    if (!(fs > 0.0)) throw Error("sampling rate must be positive");
}

double FirFilter::step(double sample) noexcept {
    const std::size_t n = taps_.size();
    pos_ = (pos_ == 0 ? n : pos_) - 1;
    line_[pos_] = sample;
    line_[pos_ + n] = sample;
    ++count_;
    const double* x = line_.data() + pos_;  // x[k] is the input k samples ago
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += taps_[k] * x[k];
    return acc;
}

void FirFilter::reset() noexcept {
    std::fill(line_.begin(), line_.end(), 0.0);
    pos_ = 0;
    count_ = 0;
}

double FirFilter::group_delay() const noexcept {
    return static_cast<double>(taps_.size() - 1) / (2.0 * fs_);
}

FirFilter design_bandpass(double f_lo, double f_hi, double fs, std::size_t taps) {
    if (!(fs > 0.0) || !(f_lo > 0.0) || !(f_lo < f_hi) || !(f_hi < fs / 2.0)) {
        throw Error("bad band edges");
    }
    if (taps < 3 || taps % 2 == 0) throw Error("tap count must be odd and at least 3");

    const std::size_t mid = (taps - 1) / 2;
    const double lo = 2.0 * f_lo / fs;
    const double hi = 2.0 * f_hi / fs;
    std::vector<double> c(taps);
    for (std::size_t n = 0; n <= mid; ++n) {
        const double k = static_cast<double>(mid - n);
        const double window =
            0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                   static_cast<double>(taps - 1));
        const double v = window * (hi * sinc(hi * k) - lo * sinc(lo * k));
        c[n] = v;
        c[taps - 1 - n] = v;
    }
    return FirFilter(std::move(c), fs);
}

double passband_gain(const FirFilter& filter, double f) {
    const double w = 2.0 * std::numbers::pi * f / filter.sample_rate();
    std::complex<double> acc{0.0, 0.0};
    const auto taps = filter.taps();
    for (std::size_t k = 0; k < taps.size(); ++k) {
        acc += taps[k] * std::polar(1.0, -w * static_cast<double>(k));
    }
    return std::abs(acc);
}

SlidingExtrema::SlidingExtrema(std::size_t window) : window_(window) {
    if (window == 0) throw Error("peak-to-peak window must hold at least one sample");
}

double SlidingExtrema::step(double sample) {
    const std::uint64_t idx = count_++;
    while (!max_.empty() && max_.back().second <= sample) max_.pop_back();
    max_.emplace_back(idx, sample);
    while (!min_.empty() && min_.back().second >= sample) min_.pop_back();
    min_.emplace_back(idx, sample);

    // Oldest index still inside the window.
    const std::uint64_t oldest = idx + 1 >= window_ ? idx + 1 - window_ : 0;
    while (max_.front().first < oldest) max_.pop_front();
    while (min_.front().first < oldest) min_.pop_front();
    return max_.front().second - min_.front().second;
}

void SlidingExtrema::reset() noexcept {
    count_ = 0;
    max_.clear();
    min_.clear();
}

std::size_t beta_window_length(double fs) {
    return static_cast<std::size_t>(std::llround(fs / 13.0));
}

BetaPipeline::BetaPipeline(const PipelineConfig& cfg, double fs)
    : filter_(design_bandpass(cfg.f_lo, cfg.f_hi, fs, cfg.taps)),
      extrema_(static_cast<std::size_t>(std::llround(fs / cfg.ptp_rate_hz))),
      compensation_(1.0 / passband_gain(filter_, cfg.compensation_hz)) {}

PipelineSample BetaPipeline::step(double x) {
    ++count_;
    PipelineSample out;
    out.y_beta = filter_.step(x);
    out.y_cc = extrema_.step(compensation_ * out.y_beta);
    out.ready = count_ >= warmup_samples();
    return out;
}

void BetaPipeline::reset() noexcept {
    filter_.reset();
    extrema_.reset();
    count_ = 0;
}

}  // namespace betactl
