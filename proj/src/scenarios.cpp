#include "betactl/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "betactl/error.hpp"
#include "betactl/rng.hpp"

namespace betactl {

double NoiseStream::normal(std::uint64_t k) const noexcept {
    const double u1 = 1.0 - uniform(2 * k);  // (0, 1]
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

constexpr std::uint64_t kStreamP = 0;
constexpr std::uint64_t kStreamU2 = 1;

}  // namespace

std::vector<Scenario> default_scenarios() {
    Scenario s1;
    s1.id = 1;

    Scenario s2;
    s2.id = 2;
    s2.p_high = 80.0;
    s2.tone_amplitude = 2.0;

    Scenario s3 = s2;
    s3.id = 3;
    s3.noise = true;
    s3.y_star = 5.0;

    return {s1, s2, s3};
}

Scenario scenario_by_id(int id) {
    if (id < 1 || id > 3) throw Error("scenario id must be 1, 2 or 3");
    return default_scenarios()[static_cast<std::size_t>(id - 1)];
}

std::string_view to_string(LoopMode mode) noexcept {
    return mode == LoopMode::open ? "open" : "closed";
}

LoopMode parse_loop_mode(std::string_view text) {
    if (text == "open") return LoopMode::open;
    if (text == "closed") return LoopMode::closed;
    throw Error("mode must be 'open' or 'closed', got '" + std::string(text) + "'");
}

ExogenousInputs scenario_inputs(const Scenario& sc, double t, std::uint64_t step) {
    ExogenousInputs in;
    in.p = t <= sc.t_switch ? sc.p_low : sc.p_high;
    in.u2 = sc.u2_base;
    if (sc.tone_amplitude != 0.0) {
        in.u2 += sc.tone_amplitude * std::sin(2.0 * std::numbers::pi * sc.tone_hz * t);
    }
    if (sc.noise) {
        in.p += NoiseStream(sc.seed, kStreamP).normal(step);
        in.u2 += NoiseStream(sc.seed, kStreamU2).normal(step);
    }
    return in;
}

SimResult run_scenario(const Scenario& sc, LoopMode mode, const SimConfig& cfg) {
    if (!(sc.duration > 0.0)) throw Error("scenario duration must be positive");
    IpController ctrl = cfg.control;
    ctrl.y_star = sc.y_star;
    if (mode == LoopMode::closed) ctrl.validate();

    const PlantParams& pp = cfg.plant;
    const DelaySystem system = make_plant_system(pp);
    const PlantState rest = equilibrium_search(cfg.prehistory_p, sc.u2_base, pp);
    std::vector<double> x0{rest.x1 + cfg.prehistory_offset_x1, rest.x2 + cfg.prehistory_offset_x2};

    HistoryBuffer history(0.0, cfg.h, x0);
    history.push(x0);

    const double fs = 1.0 / cfg.h;
    BetaPipeline pipeline(cfg.dsp, fs);
    UltraLocalEstimator estimator(ctrl.alpha, cfg.h, cfg.estimator);

    SimResult res;
    res.scenario_id = sc.id;
    res.mode = mode;
    res.y_star = sc.y_star;
    res.h = cfg.h;
    const auto n = static_cast<std::size_t>(std::llround(sc.duration / cfg.h)) + 1;
    for (auto* v : {&res.t, &res.x1, &res.x2, &res.y_beta, &res.y_cc, &res.u1, &res.f_est}) {
        v->reserve(n);
    }

    double u_next = 0.0;  // u1 for the step starting at the current grid point

    auto inputs = [&](double t, std::size_t step) {
        const ExogenousInputs ex = scenario_inputs(sc, t, step);
        return std::vector<double>{ex.p, u_next, ex.u2};
    };

    auto observer = [&](double t, std::size_t, std::span<const double> x) {
        if (!(x[0] >= 0.0 && x[0] <= pp.m1 && x[1] >= 0.0 && x[1] <= pp.m2)) {
            throw Error("state left [0, m1] x [0, m2] at t = " + std::to_string(t));
        }
        const double u_applied = u_next;  // drove the step that ended here
        const PipelineSample s = pipeline.step(x[0]);
        if (s.ready) estimator.observe(s.y_cc, u_applied);
        const bool ready = s.ready && estimator.ready();
        const double f_est = estimator.estimate();

        u_next = mode == LoopMode::closed ? ctrl.control(f_est, s.y_cc, t, ready) : 0.0;

        res.t.push_back(t);
        res.x1.push_back(x[0]);
        res.x2.push_back(x[1]);
        res.y_beta.push_back(s.y_beta);
        res.y_cc.push_back(s.y_cc);
        res.u1.push_back(u_next);
        res.f_est.push_back(f_est);
    };

    run(system, history, sc.duration, cfg.h, inputs, observer);
    return res;
}

}  // namespace betactl
