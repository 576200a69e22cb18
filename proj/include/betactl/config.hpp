#pragma once

// Run configuration. Every field defaults to the reference experiment, so an
// empty file reproduces it. Files use a TOML subset:
//
//   # comment
//   mode = "closed"
//   scenario.seed = 7        # dotted keys are relative to the current table
//   [control]
//   K = 5
//   alpha = 50.0
//
// Values are numbers, booleans or double-quoted strings. Unknown keys are
// rejected by name.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "betactl/error.hpp"
#include "betactl/scenarios.hpp"

namespace betactl {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    SimConfig sim;
    std::optional<double> y_star;  // overrides the scenario setpoint
    int scenario_id = 1;
    std::uint64_t seed = 42;
    std::optional<double> duration;  // overrides the scenario duration
    LoopMode mode = LoopMode::open;
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_svg = true;
    bool write_metrics = true;

    /// The selected scenario with seed, duration and setpoint overrides applied.
    Scenario scenario() const { return scenario(scenario_id); }
    Scenario scenario(int id) const;
};

/// Defaults overlaid with the settings in `text`. Errors name the offending
/// key or line.
RunConfig parse_config_text(std::string_view text);

/// Throws ConfigError if the file is missing or invalid.
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace betactl
