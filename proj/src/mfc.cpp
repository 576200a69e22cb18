#include "betactl/mfc.hpp"

#include <algorithm>
#include <cmath>

namespace betactl {

WindowedEstimator::WindowedEstimator(double alpha, double tau, double h)
    : alpha_(alpha), tau_(tau), h_(h) {
    if (alpha == 0.0 || !std::isfinite(alpha)) throw Error("alpha must be finite and nonzero");
    if (!(h > 0.0)) throw Error("step size must be positive");
    if (!(tau >= h)) throw Error("estimator window must span at least one step");

    const auto intervals = static_cast<std::size_t>(std::llround(tau / h));
    points_ = intervals + 1;
    // Integrate over the window actually covered by the samples.
    const double span = static_cast<double>(intervals) * h;
    const double scale = -6.0 / (span * span * span);
    y_.assign(points_, 0.0);
    u_.assign(points_, 0.0);
    ky_.resize(points_);
    ku_.resize(points_);
    for (std::size_t j = 0; j < points_; ++j) {
        const double s = static_cast<double>(j) * h;
        const double w = (j == 0 || j == intervals) ? 0.5 * h : h;
        ky_[j] = scale * w * (span - 2.0 * s);
        ku_[j] = scale * w * alpha * s * (span - s);
    }
}

void WindowedEstimator::push(double y, double u) {
    y_[head_] = y;
    u_[head_] = u;
    head_ = (head_ + 1) % points_;
    ++count_;
}

double WindowedEstimator::estimate() const {
    if (!ready()) throw EstimatorWarmingUp();
    double acc = 0.0;
    for (std::size_t j = 0; j < points_; ++j) {
        const std::size_t slot = (head_ + j) % points_;
        acc += ky_[j] * y_[slot] + ku_[j] * u_[slot];
    }
    return acc;
}

FilteredEstimator::FilteredEstimator(double alpha, double tau, double h, Discretization disc)
    : alpha_(alpha), h_(h) {
    if (alpha == 0.0 || !std::isfinite(alpha)) throw Error("alpha must be finite and nonzero");
    if (!(h > 0.0)) throw Error("step size must be positive");
    if (!(tau > 0.0)) throw Error("filter time constant must be positive");
    gain_ = disc == Discretization::exact ? -std::expm1(-h / tau) : h / tau;
}

double FilteredEstimator::update(double y_prev, double y, double u_prev) noexcept {
    const double raw = (y - y_prev) / h_ - alpha_ * u_prev;
    f_est_ += gain_ * (raw - f_est_);
    return f_est_;
}

double FilteredEstimator::observe(double y, double u_prev) noexcept {
    if (primed_) update(y_prev_, y, u_prev);
    y_prev_ = y;
    primed_ = true;
    return f_est_;
}

UltraLocalEstimator::UltraLocalEstimator(double alpha, double h, const EstimatorConfig& cfg)
    : variant_(cfg.variant),
      windowed_(alpha, cfg.variant == EstimatorVariant::windowed ? cfg.tau_w : h, h),
      filtered_(alpha, cfg.tau_f, h, cfg.discretization) {}

void UltraLocalEstimator::observe(double y, double u_prev) {
    if (variant_ == EstimatorVariant::windowed) {
        windowed_.push(y, u_prev);
    } else {
        filtered_.observe(y, u_prev);
    }
}

bool UltraLocalEstimator::ready() const noexcept {
    return variant_ == EstimatorVariant::windowed ? windowed_.ready() : filtered_.ready();
}

double UltraLocalEstimator::estimate() const {
    if (!ready()) return 0.0;
    return variant_ == EstimatorVariant::windowed ? windowed_.estimate() : filtered_.estimate();
}

void IpController::validate() const {
    if (alpha == 0.0 || !std::isfinite(alpha)) throw Error("alpha must be finite and nonzero");
    if (!(K > 0.0) || !std::isfinite(K)) throw Error("K must be positive");
    if (!(u_min < u_max)) throw Error("u_min must be below u_max");
    if (!std::isfinite(y_star) || !std::isfinite(ydot_star)) throw Error("setpoint must be finite");
}

double IpController::control(double f_est, double y, double t, bool ready) const noexcept {
    if (t <= t_on || !ready) return 0.0;
    const double e = y_star - y;
    const double u = (ydot_star - f_est + K * e) / alpha;
    if (std::isnan(u)) return 0.0;
    return std::clamp(u, u_min, u_max);
}

double pi_velocity_step(double u_prev, double e, double e_prev, double kp, double ki, double h) noexcept {
    return u_prev + kp * (e - e_prev) + ki * h * e;
}

double ip_discrete_step(double u_prev, double e, double e_prev, double K, double alpha, double h) noexcept {
    return u_prev - (e - e_prev) / (h * alpha) + (K / alpha) * e;
}

PiGains gains_from_ip(double alpha, double K, double h) {
    if (alpha == 0.0) throw Error("alpha must be nonzero");
    if (!(h > 0.0)) throw Error("step size must be positive");
    return {-1.0 / (alpha * h), K / (alpha * h)};
}

}  // namespace betactl
