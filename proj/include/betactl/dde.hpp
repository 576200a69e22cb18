#pragma once

// Fixed-step classical RK4 for delay differential equations with constant
// discrete delays. Delayed arguments are read from a uniformly sampled
// history with linear interpolation between grid points.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace betactl {

/// Uniformly sampled state history with a constant prehistory for t < t0.
class HistoryBuffer {
public:
    HistoryBuffer(double t0, double h, std::vector<double> prehistory);

    std::size_t dimension() const noexcept { return prehistory_.size(); }
    std::size_t size() const noexcept { return samples_.size() / dimension(); }
    bool empty() const noexcept { return samples_.empty(); }
    double t0() const noexcept { return t0_; }
    double step() const noexcept { return h_; }
    double time_of(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * h_; }
    /// Time of the newest sample. Requires a non-empty buffer.
    double latest_time() const;

    std::span<const double> prehistory() const noexcept { return prehistory_; }
    std::span<const double> sample(std::size_t k) const;
    std::span<const double> latest() const { return sample(size() - 1); }

    void push(std::span<const double> state);

    /// State at time t. Exact on grid points, linear in between, the
    /// prehistory constant for t < t0. Throws FutureLookup past the newest sample.
    void at(double t, std::span<double> out) const;
    std::vector<double> at(double t) const;

private:
    double t0_;
    double h_;
    std::vector<double> prehistory_;
    std::vector<double> samples_;  // row-major, one row per grid point
};

/// A system of DDEs x'(t) = f(t, x(t), x(t - d_0), ..., x(t - d_{m-1}), inputs).
struct DelaySystem {
    /// delayed holds the full state at each delay, row i = x(t - delays[i]).
    using Derivative = std::function<void(double t, std::span<const double> state,
                                          std::span<const double> delayed,
                                          std::span<const double> inputs,
                                          std::span<double> dxdt)>;

    std::size_t dimension = 0;
    std::vector<double> delays;
    Derivative derivative;

    double max_delay() const noexcept;
    /// Throws Error unless dimension > 0, every delay is finite and >= 0, and
    /// the derivative is set.
    void validate() const;
};

/// One RK4 step from the newest sample in buffer (at time t) to t + h.
/// Inputs are held constant over the step. A nonzero delay must be at least
/// h so that every delayed lookup falls on already stored history.
std::vector<double> rk4_delay_step(const DelaySystem& system, const HistoryBuffer& buffer,
                                   double t, double h, std::span<const double> inputs);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;  // row-major, dimension columns
    std::size_t dimension = 0;

    std::size_t size() const noexcept { return times.size(); }
    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * dimension, dimension};
    }
};

/// Inputs for the step that starts at grid index `step` (time t).
using InputFunction = std::function<std::vector<double>(double t, std::size_t step)>;
/// Called once per grid point, including the initial one, before the next
/// step's inputs are requested. This is where feedback is computed.
using StepObserver = std::function<void(double t, std::size_t step, std::span<const double> state)>;

/// Advances the buffer by round(duration / h) steps from its newest sample.
/// The buffer must hold at least the initial state. Returns every grid point
/// visited, the initial one included.
Trajectory run(const DelaySystem& system, HistoryBuffer& buffer, double duration, double h,
               const InputFunction& input_fn, const StepObserver& observer = {});

}  // namespace betactl
