#include "betactl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include "betactl/dsp.hpp"
#include "betactl/metrics.hpp"
#include "betactl/rng.hpp"

namespace betactl {

namespace {

// ---------------------------------------------------------------------------
// Polynomials for the method-of-steps reference solution.

using Poly = std::vector<double>;  // coefficients, lowest degree first

double eval(const Poly& p, double t) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * t + *it;
    return acc;
}

// q(s) = p(s - d)
Poly shift(const Poly& p, double d) {
    Poly q(p.size(), 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) {
        double binom = 1.0;  // C(n, k)
        for (std::size_t k = 0; k <= n; ++k) {
            q[k] += p[n] * binom * std::pow(-d, static_cast<double>(n - k));
            binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
        }
    }
    return q;
}

Poly antiderivative(const Poly& p) {
    Poly q(p.size() + 1, 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) q[n + 1] = p[n] / static_cast<double>(n + 1);
    return q;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v, int precision = 4) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x, precision);
    return s;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Global error at t_end of x' = -x(t - delay) integrated with step h.
double delayed_decay_error(double h, double delay, double t_end) {
    DelaySystem sys;
    sys.dimension = 1;
    sys.delays = {delay};
    sys.derivative = [](double, std::span<const double>, std::span<const double> d, std::span<const double>,
                        std::span<double> dx) { dx[0] = -d[0]; };
    HistoryBuffer buf(0.0, h, {1.0});
    buf.push(std::vector<double>{1.0});
    const auto traj = run(sys, buf, t_end, h, [](double, std::size_t) { return std::vector<double>{}; });
    return std::abs(traj.states.back() - delayed_decay_exact(t_end, delay));
}

double decay_error(double h) {
    DelaySystem sys;
    sys.dimension = 1;
    sys.derivative = [](double, std::span<const double> x, std::span<const double>, std::span<const double>,
                        std::span<double> dx) { dx[0] = -x[0]; };
    HistoryBuffer buf(0.0, h, {1.0});
    buf.push(std::vector<double>{1.0});
    const auto traj = run(sys, buf, 1.0, h, [](double, std::size_t) { return std::vector<double>{}; });
    return std::abs(traj.states.back() - std::exp(-1.0));
}

}  // namespace

double delayed_decay_exact(double t, double delay) {
    if (t <= 0.0) return 1.0;
    Poly piece{1.0};  // prehistory on (-delay, 0]
    double start = 0.0;
    double value = 1.0;
    while (true) {
        // x(t) = value - int_start^t piece(s - delay) ds on [start, start + delay]
        const Poly integral = antiderivative(shift(piece, delay));
        Poly next = integral;
        for (double& c : next) c = -c;
        next[0] += value + eval(integral, start);
        if (t <= start + delay) return eval(next, t);
        value = eval(next, start + delay);
        start += delay;
        piece = next;
    }
}

double synthetic_plant_error_ratio(double f0, double alpha, double K, double h, const EstimatorConfig& est,
                                   double settle) {
    UltraLocalEstimator estimator(alpha, h, est);
    double y = 0.0;
    double u_prev = 0.0;

    const double warm_seconds = est.variant == EstimatorVariant::filtered ? 10.0 * est.tau_f : est.tau_w + 10.0 * h;
    const auto warm_steps = static_cast<std::size_t>(std::ceil(warm_seconds / h));
    for (std::size_t k = 0; k < warm_steps; ++k) {
        estimator.observe(y, u_prev);
        u_prev = 0.0;
        y += h * f0;
    }

    IpController ctrl;
    ctrl.alpha = alpha;
    ctrl.K = K;
    ctrl.y_star = y + 10.0;
    ctrl.u_min = -1e9;
    ctrl.u_max = 1e9;
    ctrl.t_on = -1.0;
    const double e0 = ctrl.y_star - y;

    double worst = 0.0;
    const auto steps = static_cast<std::size_t>(std::llround((settle + 0.5) / h));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * h;
        estimator.observe(y, u_prev);
        const double u = ctrl.control(estimator.estimate(), y, t, estimator.ready());
        if (t >= settle - 1e-12) worst = std::max(worst, std::abs(ctrl.y_star - y) / std::abs(e0));
        y += h * (f0 + alpha * u);
        u_prev = u;
    }
    return worst;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream* info) {
    const RunConfig& cfg = opts.config;
    const SimConfig& sim = cfg.sim;
    const TimeSpan tail{1.0, 1.5};
    std::vector<CriterionResult> out;

    auto launch = [&sim](Scenario sc, LoopMode mode) {
        return std::async(std::launch::async, [sc, mode, &sim] { return run_scenario(sc, mode, sim); });
    };

    // Criterion 1 is timed on its own before the batch starts.
    const Scenario s1 = cfg.scenario(1);
    const auto t_start = std::chrono::steady_clock::now();
    const SimResult s1_open = run_scenario(s1, LoopMode::open, sim);
    const double s1_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    Scenario s1_rest = s1;
    s1_rest.p_high = s1_rest.p_low;
    auto f_s1_closed = launch(s1, LoopMode::closed);
    auto f_s1_rest = launch(s1_rest, LoopMode::open);
    const Scenario s2 = cfg.scenario(2);
    auto f_s2_open = launch(s2, LoopMode::open);
    auto f_s2_closed = launch(s2, LoopMode::closed);
    std::vector<std::future<SimResult>> f_s3_open, f_s3_closed;
    for (auto seed : opts.noise_seeds) {
        Scenario s3 = cfg.scenario(3);
        s3.seed = seed;
        f_s3_open.push_back(launch(s3, LoopMode::open));
        f_s3_closed.push_back(launch(s3, LoopMode::closed));
    }
    Scenario s3_repeat = cfg.scenario(3);
    s3_repeat.seed = opts.noise_seeds.empty() ? cfg.seed : opts.noise_seeds.front();
    auto f_s3_repeat = launch(s3_repeat, LoopMode::closed);

    const SimResult s1_closed = f_s1_closed.get();
    const SimResult s1_rest_open = f_s1_rest.get();
    const SimResult s2_open = f_s2_open.get();
    const SimResult s2_closed = f_s2_closed.get();
    std::vector<SimResult> s3_open, s3_closed;
    for (auto& f : f_s3_open) s3_open.push_back(f.get());
    for (auto& f : f_s3_closed) s3_closed.push_back(f.get());
    const SimResult s3_repeat_run = f_s3_repeat.get();
    const double fs = 1.0 / sim.h;

    // 1. Beta genesis.
    {
        CriterionResult c{1, "beta genesis (scenario 1, open loop)", false, {}};
        const double f = dominant_frequency(slice(s1_open, s1_open.x1, {0.7, 1.5}), fs);
        const double late = mean(slice(s1_open, s1_open.y_cc, {1.0, 1.5}));
        const double early = mean(slice(s1_open, s1_open.y_cc, {0.7, 1.2}));
        const double drift = std::abs(late - early) / early;
        c.passed = f >= 13.0 && f <= 30.0 && drift <= 0.10 && s1_seconds < 5.0;
        c.detail = "dominant " + fmt(f) + " Hz in [13, 30]; y_cc drift " + fmt(100 * drift, 3) +
                   "% <= 10%; runtime " + fmt(s1_seconds, 3) + " s < 5 s";
        out.push_back(c);
    }

    // 2. Damped sub-threshold regime.
    {
        CriterionResult c{2, "damped regime at p = 27", false, {}};
        const double y_end = s1_rest_open.y_cc.back();
        c.passed = y_end < 1.0;
        c.detail = "y_cc(" + fmt(s1_rest_open.t.back()) + " s) = " + fmt(y_end) + " < 1";
        out.push_back(c);
    }

    // 3. Beta suppression.
    {
        CriterionResult c{3, "beta suppression", false, {}};
        const double r1 = suppression_ratio(s1_open, s1_closed, tail);
        const double r2 = suppression_ratio(s2_open, s2_closed, tail);
        std::vector<double> r3;
        for (std::size_t i = 0; i < s3_open.size(); ++i) r3.push_back(suppression_ratio(s3_open[i], s3_closed[i], tail));
        const bool ok3 = std::all_of(r3.begin(), r3.end(), [](double r) { return r <= 0.25; });
        c.passed = r1 <= 0.10 && r2 <= 0.10 && ok3 && !r3.empty();
        c.detail = "S1 " + fmt(r1) + " <= 0.10; S2 " + fmt(r2) + " <= 0.10; S3 [" + join(r3) + "] <= 0.25";
        out.push_back(c);
    }

    // 4. Setpoint tracking.
    {
        CriterionResult c{4, "setpoint tracking", false, {}};
        const double d1 = std::abs(mean(slice(s1_closed, s1_closed.y_cc, tail)) - s1_closed.y_star);
        const double d2 = std::abs(mean(slice(s2_closed, s2_closed.y_cc, tail)) - s2_closed.y_star);
        std::vector<double> d3;
        for (const auto& r : s3_closed) d3.push_back(std::abs(mean(slice(r, r.y_cc, tail)) - r.y_star));
        const bool ok3 = std::all_of(d3.begin(), d3.end(), [](double d) { return d <= 2.5; });
        c.passed = d1 <= 0.5 && d2 <= 0.5 && ok3 && !d3.empty();
        c.detail = "|mean y_cc - y*|: S1 " + fmt(d1) + " <= 0.5; S2 " + fmt(d2) + " <= 0.5; S3 [" + join(d3) +
                   "] <= 2.5";
        out.push_back(c);
    }

    // 5. Gamma preservation.
    {
        CriterionResult c{5, "gamma preservation (scenario 2, x2)", false, {}};
        const auto open_x2 = slice(s2_open, s2_open.x2, tail);
        const auto closed_x2 = slice(s2_closed, s2_closed.x2, tail);
        const double tone_open = tone_power(open_x2, fs, 50.0);
        const double tone_closed = tone_power(closed_x2, fs, 50.0);
        const double beta_closed = band_power(closed_x2, fs, 13.0, 30.0);
        c.passed = tone_closed >= 0.5 * tone_open && tone_closed > 10.0 * beta_closed;
        c.detail = "tone50 closed/open " + fmt(tone_closed / tone_open) + " >= 0.5; tone50/beta closed " +
                   fmt(tone_closed / beta_closed) + " > 10";
        out.push_back(c);
    }

    // 6. Control onset.
    {
        CriterionResult c{6, "control onset", false, {}};
        double worst = 0.0;
        std::vector<const SimResult*> closed_runs{&s1_closed, &s2_closed, &s3_repeat_run};
        for (const auto& r : s3_closed) closed_runs.push_back(&r);
        for (const SimResult* r : closed_runs) worst = std::max(worst, max_abs(slice(*r, r->u1, {0.0, sim.control.t_on})));
        c.passed = worst == 0.0;
        c.detail = "max |u1| on [0, " + fmt(sim.control.t_on) + "] s over " + std::to_string(closed_runs.size()) +
                   " closed runs = " + fmt(worst);
        out.push_back(c);
    }

    // 7. PI / iP equivalence.
    {
        CriterionResult c{7, "sampled PI / iP equivalence", false, {}};
        const NoiseStream rng(2024, 7);
        double worst = 0.0;
        std::uint64_t i = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const double u_prev = rng.normal(i++) * 10.0;
            const double e = rng.normal(i++) * 10.0;
            const double e_prev = rng.normal(i++) * 10.0;
            double alpha = rng.normal(i++) * 50.0;
            if (std::abs(alpha) < 1e-3) alpha = 1.0;
            const double K = rng.uniform(i++) * 20.0;
            const double h = 1e-5 + rng.uniform(i++) * 1e-2;
            const PiGains g = gains_from_ip(alpha, K, h);
            const double a = ip_discrete_step(u_prev, e, e_prev, K, alpha, h);
            const double b = pi_velocity_step(u_prev, e, e_prev, g.kp, g.ki, h);
            const double scale = std::max({std::abs(a), std::abs(b), std::abs(u_prev),
                                           std::abs(e - e_prev) / std::abs(alpha * h), 1e-300});
            worst = std::max(worst, std::abs(a - b) / scale);
        }
        const PiGains g = gains_from_ip(50.0, 5.0, 0.001);
        c.passed = worst <= 1e-12 && g.kp == -20.0 && g.ki == 100.0;
        c.detail = "max relative gap " + fmt(worst, 3) + " <= 1e-12; gains_from_ip(50, 5, 0.001) = (" + fmt(g.kp, 17) +
                   ", " + fmt(g.ki, 17) + ")";
        out.push_back(c);
    }

    // 8. Windowed estimator oracles.
    {
        CriterionResult c{8, "windowed estimator oracles", false, {}};
        const double alpha = sim.control.alpha, h = sim.h, tau = sim.estimator.tau_w;
        WindowedEstimator constant(alpha, tau, h), ramp(alpha, tau, h), input(alpha, tau, h);
        const double v = 3.7, cu = 0.8;
        for (std::size_t k = 0; k < constant.window_points(); ++k) {
            const double t = static_cast<double>(k) * h;
            constant.push(12.5, 0.0);
            ramp.push(v * t, 0.0);
            input.push(4.0, cu);
        }
        const double f_const = constant.estimate();
        const double f_ramp = ramp.estimate();
        const double f_input = input.estimate();
        c.passed = std::abs(f_const) <= 1e-9 && std::abs(f_ramp - v) <= 1e-6 * v &&
                   std::abs(f_input + alpha * cu) <= 1e-6 * std::abs(alpha * cu);
        c.detail = "constant " + fmt(f_const, 3) + "; ramp " + fmt(f_ramp, 12) + " vs " + fmt(v) + "; input " +
                   fmt(f_input, 12) + " vs " + fmt(-alpha * cu);
        out.push_back(c);
    }

    // 9. Synthetic ultra-local plant.
    {
        CriterionResult c{9, "synthetic ultra-local plant", false, {}};
        const double alpha = 50.0, K = 5.0, settle = 6.0 / K;
        const NoiseStream rng(99, 9);
        double worst_filtered = 0.0, worst_windowed = 0.0;
        for (std::uint64_t i = 0; i < 6; ++i) {
            const double f0 = -100.0 + 200.0 * rng.uniform(i);
            EstimatorConfig filtered = sim.estimator;
            filtered.variant = EstimatorVariant::filtered;
            EstimatorConfig windowed = sim.estimator;
            windowed.variant = EstimatorVariant::windowed;
            worst_filtered = std::max(worst_filtered, synthetic_plant_error_ratio(f0, alpha, K, sim.h, filtered, settle));
            worst_windowed = std::max(worst_windowed, synthetic_plant_error_ratio(f0, alpha, K, sim.h, windowed, settle));
        }
        c.passed = worst_filtered < 0.01 && worst_windowed < 0.01;
        c.detail = "max |e|/|e0| after " + fmt(settle) + " s: filtered " + fmt(worst_filtered, 3) + ", windowed " +
                   fmt(worst_windowed, 3) + " < 0.01";
        out.push_back(c);
    }

    // 10. Numerics.
    {
        CriterionResult c{10, "integrator order and determinism", false, {}};
        const double rk4_ratio = decay_error(0.1) / decay_error(0.05);
        const double dde_ratio = delayed_decay_error(0.01, 0.1, 0.3) / delayed_decay_error(0.005, 0.1, 0.3);
        const bool same = s3_repeat_run.x1 == s3_closed.front().x1 && s3_repeat_run.x2 == s3_closed.front().x2 &&
                          s3_repeat_run.y_cc == s3_closed.front().y_cc && s3_repeat_run.u1 == s3_closed.front().u1 &&
                          s3_repeat_run.f_est == s3_closed.front().f_est;
        c.passed = rk4_ratio >= 14.0 && rk4_ratio <= 18.0 && dde_ratio >= 3.8 && same;
        c.detail = "RK4 ratio " + fmt(rk4_ratio) + " in [14, 18]; delayed ratio " + fmt(dde_ratio) +
                   " >= 3.8; rerun " + (same ? "bit-identical" : "DIFFERS");
        out.push_back(c);
    }

    // 11. DSP oracles.
    {
        CriterionResult c{11, "biomarker pipeline oracles", false, {}};
        const NoiseStream rng(31337, 11);
        std::uint64_t draw = 0;
        bool ptp_ok = true;
        for (std::size_t window : {1u, 7u, 769u, 2500u}) {
            SlidingExtrema tracker(window);
            std::vector<double> xs;
            for (int k = 0; k < 10000 && ptp_ok; ++k) {
                xs.push_back(rng.normal(draw++));
                const double got = tracker.step(xs.back());
                const std::size_t from = xs.size() > window ? xs.size() - window : 0;
                const auto [lo, hi] = std::minmax_element(xs.begin() + static_cast<std::ptrdiff_t>(from), xs.end());
                ptp_ok = got == *hi - *lo;
            }
        }

        BetaPipeline pipeline(sim.dsp, fs);
        const double amplitude = 3.0;
        double y_cc = 0.0;
        const auto n = static_cast<std::size_t>(std::llround(1.0 * fs));
        for (std::size_t k = 0; k < n; ++k) {
            y_cc = pipeline.step(amplitude * std::sin(2.0 * std::numbers::pi * 21.5 * static_cast<double>(k) / fs)).y_cc;
        }
        const double amp_err = std::abs(y_cc - 2.0 * amplitude) / (2.0 * amplitude);
        const double rejection = passband_gain(pipeline.filter(), 21.5) / passband_gain(pipeline.filter(), 50.0);
        c.passed = ptp_ok && amp_err <= 0.02 && rejection >= 20.0;
        c.detail = std::string("streaming peak-to-peak ") + (ptp_ok ? "matches" : "DIFFERS from") +
                   " brute force; 21.5 Hz tone y_cc error " + fmt(100 * amp_err, 3) + "% <= 2%; 50 Hz rejection " +
                   fmt(rejection) + "x >= 20x";
        out.push_back(c);
    }

    if (opts.extended_report && info) {
        *info << "INFO  longer runs (" << fmt(opts.extended_duration) << " s), final 0.5 s, not gating:\n";
        for (int id = 1; id <= 3; ++id) {
            Scenario sc = cfg.scenario(id);
            if (id == 3 && !opts.noise_seeds.empty()) sc.seed = opts.noise_seeds.front();
            sc.duration = opts.extended_duration;
            auto fo = launch(sc, LoopMode::open);
            auto fc = launch(sc, LoopMode::closed);
            const SimResult o = fo.get(), cl = fc.get();
            const TimeSpan span = final_span(o);
            *info << "INFO    scenario " << id << ": suppression ratio " << fmt(suppression_ratio(o, cl, span))
                  << ", mean y_cc " << fmt(mean(slice(cl, cl.y_cc, span))) << " (y* = " << fmt(sc.y_star)
                  << "), mean u1 " << fmt(mean(slice(cl, cl.u1, span))) << "\n";
        }
    }
    return out;
}

bool print_results(const std::vector<CriterionResult>& results, std::ostream& out) {
    bool all = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << "\n";
        all = all && r.passed;
    }
    out << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
    return all;
}

}  // namespace betactl
