#include "betactl/dde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "betactl/error.hpp"

namespace betactl {

namespace {

// Queries within this fraction of a step from a grid point snap onto it, so
// that times built as t0 + k*h hit stored samples exactly.
constexpr double kGridSnap = 1e-7;

std::string format_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", t);
    return buf;
}

}  // namespace

FutureLookup::FutureLookup(double t)
    : Error("future lookup at t = " + format_time(t)), time_(t) {}

NumericalBlowUp::NumericalBlowUp(double t)
    : Error("numerical blow-up at t = " + format_time(t)), time_(t) {}

HistoryBuffer::HistoryBuffer(double t0, double h, std::vector<double> prehistory)
    : t0_(t0), h_(h), prehistory_(std::move(prehistory)) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("history step must be positive");
    if (prehistory_.empty()) throw Error("history dimension must be positive");
}

double HistoryBuffer::latest_time() const {
    if (empty()) throw Error("history buffer is empty");
    return time_of(size() - 1);
}

std::span<const double> HistoryBuffer::sample(std::size_t k) const {
    if (k >= size()) throw Error("history sample index out of range");
    return {samples_.data() + k * dimension(), dimension()};
}

void HistoryBuffer::push(std::span<const double> state) {
    if (state.size() != dimension()) throw Error("history state has wrong dimension");
    samples_.insert(samples_.end(), state.begin(), state.end());
}

void HistoryBuffer::at(double t, std::span<double> out) const {
    const std::size_t dim = dimension();
    const double s = (t - t0_) / h_;
    const double nearest = std::nearbyint(s);
    const bool on_grid = std::abs(s - nearest) <= kGridSnap;

    if ((on_grid && nearest < 0.0) || (!on_grid && s < 0.0)) {
        std::copy(prehistory_.begin(), prehistory_.end(), out.begin());
        return;
    }
    const auto n = static_cast<double>(size());
    if (on_grid) {
        if (nearest > n - 1.0) throw FutureLookup(t);
        auto row = sample(static_cast<std::size_t>(nearest));
        std::copy(row.begin(), row.end(), out.begin());
        return;
    }
    const double lower = std::floor(s);
    if (lower + 1.0 > n - 1.0) throw FutureLookup(t);
    const double frac = s - lower;
    const double* a = samples_.data() + static_cast<std::size_t>(lower) * dim;
    const double* b = a + dim;
    for (std::size_t j = 0; j < dim; ++j) out[j] = a[j] + frac * (b[j] - a[j]);
}

std::vector<double> HistoryBuffer::at(double t) const {
    std::vector<double> out(dimension());
    at(t, out);
    return out;
}

double DelaySystem::max_delay() const noexcept {
    return delays.empty() ? 0.0 : *std::max_element(delays.begin(), delays.end());
}

void DelaySystem::validate() const {
    if (dimension == 0) throw Error("system dimension must be positive");
    for (double d : delays) {
        if (!std::isfinite(d) || d < 0.0) throw Error("delays must be finite and non-negative");
    }
    if (!derivative) throw Error("system has no derivative map");
}

std::vector<double> rk4_delay_step(const DelaySystem& system, const HistoryBuffer& buffer,
                                   double t, double h, std::span<const double> inputs) {
    if (!(h > 0.0)) throw Error("step size must be positive");
    if (buffer.dimension() != system.dimension) throw Error("history and system dimensions differ");
    for (double d : system.delays) {
        if (d != 0.0 && d < h * (1.0 - 1e-9)) {
            throw Error("nonzero delay " + format_time(d) + " s is shorter than the step");
        }
    }

    const std::size_t dim = system.dimension;
    const std::size_t ndelay = system.delays.size();
    std::vector<double> x0 = buffer.at(t);
    std::vector<double> stage(dim), delayed(ndelay * dim);
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim);

    auto eval = [&](double ts, std::span<const double> xs, std::span<double> k) {
        for (std::size_t i = 0; i < ndelay; ++i) {
            std::span<double> row(delayed.data() + i * dim, dim);
            const double d = system.delays[i];
            if (d == 0.0) {
                std::copy(xs.begin(), xs.end(), row.begin());
            } else {
                buffer.at(ts - d, row);
            }
        }
        system.derivative(ts, xs, delayed, inputs, k);
    };

    eval(t, x0, k1);
    for (std::size_t j = 0; j < dim; ++j) stage[j] = x0[j] + 0.5 * h * k1[j];
    eval(t + 0.5 * h, stage, k2);
    for (std::size_t j = 0; j < dim; ++j) stage[j] = x0[j] + 0.5 * h * k2[j];
    eval(t + 0.5 * h, stage, k3);
    for (std::size_t j = 0; j < dim; ++j) stage[j] = x0[j] + h * k3[j];
    eval(t + h, stage, k4);

    std::vector<double> next(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        next[j] = x0[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (!std::isfinite(next[j])) throw NumericalBlowUp(t + h);
    }
    return next;
}

Trajectory run(const DelaySystem& system, HistoryBuffer& buffer, double duration, double h,
               const InputFunction& input_fn, const StepObserver& observer) {
    system.validate();
    if (!(duration > 0.0)) throw Error("duration must be positive");
    if (!(h > 0.0)) throw Error("step size must be positive");
    if (std::abs(h - buffer.step()) > 1e-12 * h) throw Error("step size differs from history spacing");
    if (buffer.empty()) throw Error("history must contain the initial state");
    if (!input_fn) throw Error("input function is required");

    const auto steps = static_cast<std::size_t>(std::llround(duration / h));
    const std::size_t first = buffer.size() - 1;

    Trajectory traj;
    traj.dimension = system.dimension;
    traj.times.reserve(steps + 1);
    traj.states.reserve((steps + 1) * system.dimension);

    auto record = [&](std::size_t k) {
        const double t = buffer.time_of(first + k);
        auto state = buffer.latest();
        traj.times.push_back(t);
        traj.states.insert(traj.states.end(), state.begin(), state.end());
        if (observer) observer(t, k, state);
    };

    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = buffer.time_of(first + k);
        const std::vector<double> inputs = input_fn(t, k);
        buffer.push(rk4_delay_step(system, buffer, t, h, inputs));
        record(k + 1);
    }
    return traj;
}

}  // namespace betactl
