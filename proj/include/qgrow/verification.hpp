#pragma once

#include <cstdint>
#include <string>

namespace qgrow {

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;
    double worst = 0.0; // largest deviation or residual observed
    std::string first_failure;
    bool passed() const { return checks > 0 && failures == 0; }
};

/// Random (model, strategy, seed) triples at <=2 qubits and <=9 blocks;
/// every grow event must keep the probe-grid residual below 1e-10.
SuiteResult preservation_suite(int n_triples, std::uint64_t seed);

/// Random (model, x) pairs; every theta/psi partial must match central
/// finite differences (h=1e-5) within 1e-6 and every order-2 input
/// derivative a 3-point stencil (h=1e-4) within 1e-4.
SuiteResult gradient_suite(int n_pairs, std::uint64_t seed);

/// K = 2L+1 for the single-qubit psi=1 ladder, L in 1..6, plus Fourier
/// energy outside the accessible set below 1e-9 for random integer-psi
/// models.
SuiteResult spectrum_suite(int n_random_models, std::uint64_t seed);

} // namespace qgrow
