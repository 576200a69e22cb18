#pragma once

// Result interchange: CSV time series, metrics reports, SVG figures.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "betactl/metrics.hpp"
#include "betactl/scenarios.hpp"

namespace betactl {

inline constexpr std::string_view kCsvHeader = "t,x1,x2,y_beta,y_cc,u1,F_est,y_star";

/// `s<id>_<mode>.csv`
std::string csv_file_name(int scenario_id, LoopMode mode);

/// One row per grid point, every value with 17 significant digits.
void write_csv(const SimResult& r, std::ostream& out);
void write_csv(const SimResult& r, const std::filesystem::path& path);

/// Parses a CSV written by write_csv. Scenario id and mode are not stored in
/// the file and are left at their defaults. Errors carry the line number or
/// the missing column name.
SimResult read_csv(std::istream& in);
SimResult read_csv(const std::filesystem::path& path);

std::string metrics_json(const std::vector<SpectrumReport>& reports);
std::string metrics_text(const std::vector<SpectrumReport>& reports);

/// Six-panel figure: open loop on top (states, filtered output, y_cc),
/// closed loop below (states, control input, setpoint and y_cc).
std::string render_svg(const SimResult& open, const SimResult& closed);

/// Renders `s<id>.svg` for every scenario with both CSVs present in `dir`.
/// Returns the files written; throws Error if there is no complete pair.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir);

}  // namespace betactl
