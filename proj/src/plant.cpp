#include "betactl/plant.hpp"

#include <cmath>

#include "betactl/error.hpp"

namespace betactl {

void PlantParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(what);
    };
    for (double v : {c11, c12, c21, c22, b1, b2, d11, d12, d21, d22}) {
        require(std::isfinite(v) && v >= 0.0, "plant gains and delays must be finite and non-negative");
    }
    require(std::isfinite(tau1) && tau1 > 0.0, "tau1 must be positive");
    require(std::isfinite(tau2) && tau2 > 0.0, "tau2 must be positive");
    require(B1 > 0.0 && B1 < m1, "activation baseline B1 must lie in (0, m1)");
    require(B2 > 0.0 && B2 < m2, "activation baseline B2 must lie in (0, m2)");
    require(u2_sign == 1.0 || u2_sign == -1.0, "u2_sign must be +1 or -1");
}

double activation(double x, double m, double B) noexcept {
    // exp() overflowing to +inf drives the result to 0, underflow to m.
    return m * B / (B + std::exp(-4.0 * x / m) * (m - B));
}

PlantState plant_derivs(const PlantState& x, const DelayedRates& d, const PlantInputs& in,
                        const PlantParams& pp) noexcept {
    const double drive1 = pp.c11 * d.x1_d11 - pp.c12 * d.x2_d12 + pp.b1 * (in.p + in.u1);
    const double drive2 = pp.c21 * d.x1_d21 - pp.c22 * d.x2_d22 + pp.u2_sign * pp.b2 * in.u2;
    return {(-x.x1 + activation(drive1, pp.m1, pp.B1)) / pp.tau1,
            (-x.x2 + activation(drive2, pp.m2, pp.B2)) / pp.tau2};
}

DelaySystem make_plant_system(const PlantParams& params) {
    params.validate();
    DelaySystem sys;
    sys.dimension = 2;
    sys.delays = {params.d11, params.d12, params.d21, params.d22};
    sys.derivative = [params](double, std::span<const double> x, std::span<const double> delayed,
                              std::span<const double> inputs, std::span<double> dxdt) {
        // delayed rows: x(t-d11), x(t-d12), x(t-d21), x(t-d22)
        const DelayedRates d{delayed[0], delayed[3], delayed[4], delayed[7]};
        const PlantInputs in{inputs[0], inputs[1], inputs[2]};
        const PlantState r = plant_derivs({x[0], x[1]}, d, in, params);
        dxdt[0] = r.x1;
        dxdt[1] = r.x2;
    };
    return sys;
}

PlantState equilibrium_search(double p, double u2, const PlantParams& params,
                              const EquilibriumOptions& opts) {
    params.validate();
    PlantState x{params.B1, params.B2};
    const PlantInputs in{p, 0.0, u2};
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        const DelayedRates d{x.x1, x.x2, x.x1, x.x2};
        const PlantState r = plant_derivs(x, d, in, params);
        if (!std::isfinite(r.x1) || !std::isfinite(r.x2)) break;
        if (std::abs(r.x1) < opts.tolerance && std::abs(r.x2) < opts.tolerance) return x;
        // Step toward S(x) rather than along x' so both populations relax at the same rate.
        x.x1 += opts.relaxation * r.x1 * params.tau1;
        x.x2 += opts.relaxation * r.x2 * params.tau2;
    }
    throw Error("no equilibrium found");
}

}  // namespace betactl
