#pragma once

// Model-free control: online estimation of F in the ultra-local model
// y' = F + alpha u, the intelligent proportional (iP) law built on it, and
// the sampled PI <-> iP correspondence.

#include <cstddef>
#include <vector>

#include "betactl/error.hpp"

namespace betactl {

class EstimatorWarmingUp : public Error {
public:
    EstimatorWarmingUp() : Error("estimator warming up") {}
};

/// Integral estimator over a trailing window of length tau:
///
///   F = -(6 / tau^3) * int_0^tau [(tau - 2s) y(s) + alpha s (tau - s) u(s)] ds
///
/// with s measured from the oldest sample of the window. Evaluated with the
/// trapezoidal rule on round(tau / h) + 1 samples.
class WindowedEstimator {
public:
    WindowedEstimator(double alpha, double tau, double h);

    void push(double y, double u);
    bool ready() const noexcept { return count_ >= points_; }
    /// Throws EstimatorWarmingUp until the window has filled.
    double estimate() const;
    double update(double y, double u) {
        push(y, u);
        return estimate();
    }

    std::size_t window_points() const noexcept { return points_; }
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
    double tau_;
    double h_;
    std::size_t points_;
    std::size_t count_ = 0;
    std::size_t head_ = 0;  // slot of the next write == oldest sample when full
    std::vector<double> y_;
    std::vector<double> u_;
    std::vector<double> ky_;  // trapezoid-weighted kernels per window position
    std::vector<double> ku_;
};

enum class Discretization { forward_euler, exact };

/// First-order low-pass of the one-step identity F = (y_k - y_{k-1})/h - alpha u_{k-1}.
class FilteredEstimator {
public:
    FilteredEstimator(double alpha, double tau, double h,
                      Discretization disc = Discretization::forward_euler);

    /// Low-pass update from an explicit previous sample.
    double update(double y_prev, double y, double u_prev) noexcept;
    /// Streaming form: the first call only records y.
    double observe(double y, double u_prev) noexcept;

    bool ready() const noexcept { return primed_; }
    double estimate() const noexcept { return f_est_; }
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
    double h_;
    double gain_;
    double f_est_ = 0.0;
    double y_prev_ = 0.0;
    bool primed_ = false;
};

enum class EstimatorVariant { windowed, filtered };

struct EstimatorConfig {
    EstimatorVariant variant = EstimatorVariant::filtered;
    double tau_f = 0.8;
    double tau_w = 0.8;
    Discretization discretization = Discretization::forward_euler;
};

/// Either estimator behind one streaming interface. `observe` takes the
/// newest output and the input applied over the step that produced it.
class UltraLocalEstimator {
public:
    UltraLocalEstimator(double alpha, double h, const EstimatorConfig& cfg);

    void observe(double y, double u_prev);
    bool ready() const noexcept;
    /// 0 until the estimator is ready.
    double estimate() const;
    EstimatorVariant variant() const noexcept { return variant_; }

private:
    EstimatorVariant variant_;
    WindowedEstimator windowed_;
    FilteredEstimator filtered_;
};

struct IpController {
    double alpha = 50.0;
    double K = 5.0;
    double y_star = 0.1;
    double ydot_star = 0.0;
    double u_min = -30.0;
    double u_max = 30.0;
    double t_on = 0.2;

    /// Throws Error unless alpha != 0, K > 0 and u_min < u_max.
    void validate() const;

    /// u = clamp((ydot* - F_est + K (y* - y)) / alpha), or 0 before onset or
    /// while the measurement is not ready.
    double control(double f_est, double y, double t, bool ready) const noexcept;
};

/// Velocity-form sampled PI: u = u_prev + kp (e - e_prev) + ki h e.
double pi_velocity_step(double u_prev, double e, double e_prev, double kp, double ki, double h) noexcept;

/// Sampled iP with the one-step estimate of F substituted:
/// u = u_prev - (e - e_prev) / (h alpha) + (K / alpha) e.
double ip_discrete_step(double u_prev, double e, double e_prev, double K, double alpha, double h) noexcept;

struct PiGains {
    double kp = 0.0;
    double ki = 0.0;
};

/// PI gains under which the two sampled laws coincide: kp = -1/(alpha h), ki = K/(alpha h).
PiGains gains_from_ip(double alpha, double K, double h);

}  // namespace betactl
