#pragma once

// End-to-end acceptance checks shared by `betactl verify` and the
// acceptance test binary.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "betactl/config.hpp"

namespace betactl {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOptions {
    RunConfig config;
    std::vector<std::uint64_t> noise_seeds{1, 2, 3, 4, 5};
    /// Also print non-gating suppression figures from longer runs.
    bool extended_report = true;
    double extended_duration = 6.0;
};

/// Runs criteria 1-11. The scenario runs execute concurrently.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream* info = nullptr);

/// One "PASS|FAIL [id] name: detail" line per criterion. Returns true iff all pass.
bool print_results(const std::vector<CriterionResult>& results, std::ostream& out);

// Independent reference solutions used by the numeric checks.

/// Exact solution of x'(t) = -x(t - delay) with x = 1 for t <= 0, by the
/// method of steps on piecewise polynomials.
double delayed_decay_exact(double t, double delay);

/// Largest |e(t)| / |e(0)| seen after `settle` seconds when the iP loop with
/// the given estimator drives y' = f0 + alpha u from a warmed-up estimator
/// toward a setpoint step of 10.
double synthetic_plant_error_ratio(double f0, double alpha, double K, double h, const EstimatorConfig& est,
                                   double settle);

}  // namespace betactl
