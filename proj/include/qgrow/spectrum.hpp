#pragma once

#include "qgrow/model.hpp"

#include <complex>
#include <map>
#include <vector>

namespace qgrow {

/// Accessible frequency set for one input dimension: sorted, distinct
/// within 1e-9, symmetric about 0, always containing 0.
struct OmegaSet {
    std::vector<double> frequencies;
    std::size_t K() const { return frequencies.size(); }
};

/// Frequencies reachable by the model output along each input dimension:
/// all sums sum_g s_g * psi_g over that dimension's encoding gates with
/// s_g in {-1, 0, +1} (the eigenvalue gaps of the cumulative generator
/// across every feature-map repetition). Throws std::invalid_argument
/// when the model has no feature-map block, or when enumeration of a
/// non-collapsing spectrum would exceed the desk-scale cap.
std::vector<OmegaSet> accessible_spectrum(const ReuploaderModel& model);
OmegaSet accessible_spectrum(const ReuploaderModel& model, int dim);

/// Discrete Fourier fit of x[dim] -> forward(model, x) over a uniform
/// grid on [0, 2pi), other dimensions held at `fixed` (which must have
/// model.input_dim entries; entry `dim` is ignored). Requires every psi
/// on the dimension to be an integer within 1e-9 and
/// grid_points >= 2*max|Omega| + 1; throws std::invalid_argument
/// otherwise. Keys are integer frequencies in (-grid_points/2,
/// grid_points/2].
std::map<long long, std::complex<double>> fourier_coefficients(
    const ReuploaderModel& model, int dim, int grid_points,
    const std::vector<double>& fixed = {});

} // namespace qgrow
