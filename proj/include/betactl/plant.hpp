#pragma once

// Delayed STN-GPe firing-rate model.
//
//   tau1 x1' = -x1 + S1(c11 x1(t-d11) - c12 x2(t-d12) + b1 (p + u1))
//   tau2 x2' = -x2 + S2(c21 x1(t-d21) - c22 x2(t-d22) + s2 b2 u2)
//
// with S(x) = m B / (B + exp(-4x/m) (m - B)). Internal time unit is seconds.
//
// s2 is the polarity of the striatal afferent. Striato-pallidal projections
// are GABAergic, and only s2 = -1 yields a stable rest at p = 27 together
// with a beta limit cycle at p = 42; s2 = +1 moves the Hopf onset to p ~ 54.

#include "betactl/dde.hpp"

namespace betactl {

struct PlantParams {
    double c11 = 0.0;
    double c12 = 3.0;
    double c21 = 10.0;
    double c22 = 0.9;
    double b1 = 5.0;    // input gain, STN
    double b2 = 139.4;  // input gain, GPe
    double tau1 = 0.006;
    double tau2 = 0.014;
    double d11 = 0.004;
    double d12 = 0.006;
    double d21 = 0.006;
    double d22 = 0.004;
    double m1 = 300.0;  // activation ceilings (spk/s)
    double m2 = 400.0;
    double B1 = 17.0;   // activation baselines (spk/s)
    double B2 = 75.0;
    double u2_sign = -1.0;  // +1 excitatory, -1 inhibitory striatal input

    /// Throws Error naming the first violated constraint.
    void validate() const;
};

struct PlantState {
    double x1 = 0.0;  // STN rate (spk/s)
    double x2 = 0.0;  // GPe rate (spk/s)
};

struct DelayedRates {
    double x1_d11 = 0.0;
    double x2_d12 = 0.0;
    double x1_d21 = 0.0;
    double x2_d22 = 0.0;
};

struct PlantInputs {
    double p = 0.0;   // cortical drive
    double u1 = 0.0;  // stimulation (control)
    double u2 = 0.0;  // striatal drive
};

/// Sigmoid with lower asymptote 0, upper asymptote m, and S(0) = B.
double activation(double x, double m, double B) noexcept;

PlantState plant_derivs(const PlantState& x, const DelayedRates& delayed, const PlantInputs& in,
                        const PlantParams& params) noexcept;

/// Delay system with state (x1, x2), delays (d11, d12, d21, d22) and
/// inputs (p, u1, u2).
DelaySystem make_plant_system(const PlantParams& params);

struct EquilibriumOptions {
    double relaxation = 0.05;
    std::size_t max_iterations = 100000;
    double tolerance = 1e-9;  // on |x'| with delayed rates equal to current ones
};

/// Damped fixed-point iteration from (B1, B2). Throws Error("no equilibrium
/// found") when it does not converge.
PlantState equilibrium_search(double p, double u2, const PlantParams& params,
                              const EquilibriumOptions& opts = {});

}  // namespace betactl
