#include "qgrow/spectrum.hpp"

#include "qgrow/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qgrow {

namespace {

constexpr double kFreqTol = 1e-9;
constexpr std::size_t kEnumCap = 1 << 22;

std::vector<double> dedup_sorted(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (out.empty() || v - out.back() > kFreqTol) out.push_back(v);
    }
    return out;
}

std::vector<double> psi_scales_on_dim(const ReuploaderModel& model, int dim) {
    std::vector<double> scales;
    for (const auto& block : model.blocks) {
        for (const auto& g : block.gates) {
            if (g.pclass == ParamClass::PSI && g.input_dim == dim)
                scales.push_back(model.params.psi[g.slot]);
        }
    }
    return scales;
}

} // namespace

std::vector<OmegaSet> accessible_spectrum(const ReuploaderModel& model) {
    if (model.feature_map_block_count() == 0)
        throw std::invalid_argument("accessible_spectrum: model has no feature-map blocks");

    std::vector<OmegaSet> result;
    for (int dim = 0; dim < model.input_dim; ++dim) {
        const auto scales = psi_scales_on_dim(model, dim);
        std::vector<double> sums{0.0};
        for (double s : scales) {
            if (sums.size() * 3 > kEnumCap)
                throw std::invalid_argument(
                    "accessible_spectrum: enumeration exceeds desk-scale cap");
            std::vector<double> next;
            next.reserve(sums.size() * 3);
            for (double v : sums) {
                next.push_back(v - s);
                next.push_back(v);
                next.push_back(v + s);
            }
            sums = dedup_sorted(std::move(next));
        }
        OmegaSet omega;
        omega.frequencies = std::move(sums);
        result.push_back(std::move(omega));
    }
    return result;
}

OmegaSet accessible_spectrum(const ReuploaderModel& model, int dim) {
    if (dim < 0 || dim >= model.input_dim)
        throw std::invalid_argument("accessible_spectrum: dim out of range");
    return accessible_spectrum(model)[std::size_t(dim)];
}

std::map<long long, std::complex<double>> fourier_coefficients(
    const ReuploaderModel& model, int dim, int grid_points,
    const std::vector<double>& fixed) {
    if (dim < 0 || dim >= model.input_dim)
        throw std::invalid_argument("fourier_coefficients: dim out of range");
    if (grid_points < 2)
        throw std::invalid_argument("fourier_coefficients: grid_points must be >= 2");

    const auto scales = psi_scales_on_dim(model, dim);
    long long max_freq = 0;
    for (double s : scales) {
        const double rounded = std::round(s);
        if (std::abs(s - rounded) > kFreqTol)
            throw std::invalid_argument(
                "fourier_coefficients: non-integer psi makes the spectrum aperiodic on "
                "[0, 2pi)");
        max_freq += std::llabs(static_cast<long long>(rounded));
    }
    if (grid_points < 2 * max_freq + 1)
        throw std::invalid_argument("fourier_coefficients: grid too small, frequencies up to " +
                                    std::to_string(max_freq) + " would alias");

    std::vector<double> x(std::size_t(model.input_dim), 0.0);
    if (!fixed.empty()) {
        if (int(fixed.size()) != model.input_dim)
            throw std::invalid_argument("fourier_coefficients: fixed values dimension mismatch");
        x = fixed;
    }

    const int n = grid_points;
    std::vector<double> samples(std::size_t(n));
    engine::Workspace ws;
    for (int j = 0; j < n; ++j) {
        x[std::size_t(dim)] = 2.0 * std::numbers::pi * j / n;
        samples[std::size_t(j)] = engine::run_forward(engine::flatten(model, x), ws);
    }

    std::map<long long, std::complex<double>> coeffs;
    for (int bin = 0; bin < n; ++bin) {
        const long long k = (bin <= n / 2) ? bin : bin - n;
        std::complex<double> c(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const double phase = -2.0 * std::numbers::pi * double(bin) * double(j) / n;
            c += samples[std::size_t(j)] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        coeffs[k] = c / double(n);
    }
    return coeffs;
}

} // namespace qgrow
