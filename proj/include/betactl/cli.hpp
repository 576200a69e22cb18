#pragma once

// Command implementations behind the `betactl` executable.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "betactl/config.hpp"

namespace betactl {

/// Output directory: explicit flag, then $BETACTL_OUT, then the config.
std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::optional<std::string>& flag);

/// Runs the configured scenario and writes `s<id>_<mode>.csv`, the metrics
/// files and, once both loop modes are present, `s<id>.svg`. Closed-loop runs
/// also simulate the open loop to report the suppression ratio.
/// Returns the process exit status; errors go to `err`.
int cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

int cmd_plot(const std::filesystem::path& in_dir, std::ostream& out, std::ostream& err);

/// 0 iff every acceptance criterion passes.
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace betactl
