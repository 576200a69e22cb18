// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

#include <iostream>

#include "betactl/acceptance.hpp"

int main() {
    betactl::AcceptanceOptions opts;
    const auto results = betactl::run_acceptance(opts, &std::cout);
    return betactl::print_results(results, std::cout) ? 0 : 1;
}
