#pragma once

#include "qgrow/model.hpp"

#include <span>
#include <vector>

namespace qgrow {

/// Partials of <Z> with respect to the trainable slots, split by class
/// so a grow event (which appends slots to both arrays) never shifts
/// existing entries. psi stays empty when the psi class is frozen.
struct GradientVector {
    std::vector<double> theta;
    std::vector<double> psi;
};

struct DerivativeRequest {
    int dim = 0;
    int order = 1; // 1 or 2
};

/// Exact rotation-gate derivatives of forward(model, x), two-point shift
/// rule values: theta slots get the gate-angle shift, psi slots the
/// gate-angle shift scaled by x[dim] (chain rule through angle = psi*x).
/// Throws std::runtime_error on non-finite results.
GradientVector parameter_shift_gradient(const ReuploaderModel& model,
                                        std::span<const double> x);

/// d^order f / d x[dim]^order. A dim with no feature-map gate returns
/// exactly 0. order 2 applies the shift recursion across all encoding
/// gate pairs on the dim. Throws std::invalid_argument for order
/// outside {1, 2}.
double input_derivative(const ReuploaderModel& model, std::span<const double> x,
                        const DerivativeRequest& req);

// Serial reference implementations: literal two-point shift rule by
// whole-circuit re-evaluation, one gate at a time, with ordered gate
// pairs for second derivatives. Kept as the independent slow path for
// tests and benchmarks.
namespace reference {

double forward(const ReuploaderModel& model, std::span<const double> x);
GradientVector parameter_shift_gradient(const ReuploaderModel& model,
                                        std::span<const double> x);
double input_derivative(const ReuploaderModel& model, std::span<const double> x,
                        const DerivativeRequest& req);

} // namespace reference

} // namespace qgrow
