#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "betactl/dsp.hpp"
#include "betactl/mfc.hpp"
#include "betactl/plant.hpp"

namespace betactl {

/// Exogenous drive of one experiment. p steps from p_low to p_high after
/// t_switch; u2 is a constant plus an optional sine tone; scenario noise adds
/// one N(0,1) draw to p and one to u2 per grid step.
struct Scenario {
    int id = 1;
    double p_low = 27.0;
    double p_high = 42.0;
    double t_switch = 0.5;
    double u2_base = 60.0 / 139.4;
    double tone_amplitude = 0.0;
    double tone_hz = 50.0;
    bool noise = false;
    std::uint64_t seed = 42;
    double y_star = 0.1;
    double duration = 1.5;
};

/// Scenarios 1-3 (1.5 s each, setpoints 0.1, 0.1 and 5).
std::vector<Scenario> default_scenarios();
/// Throws Error for ids outside 1..3.
Scenario scenario_by_id(int id);

enum class LoopMode { open, closed };

std::string_view to_string(LoopMode mode) noexcept;
/// Accepts "open" and "closed".
LoopMode parse_loop_mode(std::string_view text);

struct ExogenousInputs {
    double p = 0.0;
    double u2 = 0.0;
};

/// Inputs at time t; `step` is the grid index that selects the noise draw.
ExogenousInputs scenario_inputs(const Scenario& sc, double t, std::uint64_t step);

/// Everything needed to run one scenario besides the scenario itself.
struct SimConfig {
    PlantParams plant;
    PipelineConfig dsp;
    IpController control;  // y_star is taken from the scenario
    EstimatorConfig estimator;
    double h = 1e-4;
    double prehistory_p = 27.0;
    double prehistory_offset_x1 = 10.0;
    double prehistory_offset_x2 = 10.0;
};

struct SimResult {
    int scenario_id = 0;
    LoopMode mode = LoopMode::open;
    double y_star = 0.0;
    double h = 0.0;
    std::vector<double> t;
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> y_beta;
    std::vector<double> y_cc;
    std::vector<double> u1;  // input applied over [t_k, t_k + h)
    std::vector<double> f_est;

    std::size_t size() const noexcept { return t.size(); }
    double sample_rate() const noexcept { return 1.0 / h; }
};

/// Integrates the plant over sc.duration. At each grid point the STN rate
/// feeds the biomarker pipeline, the estimator sees (y_cc, previous u1), and
/// in closed mode the iP law sets u1 for the following step.
SimResult run_scenario(const Scenario& sc, LoopMode mode, const SimConfig& cfg);

}  // namespace betactl
