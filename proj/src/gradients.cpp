#include "qgrow/gradients.hpp"

#include "qgrow/engine.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qgrow {

GradientVector parameter_shift_gradient(const ReuploaderModel& model,
                                        std::span<const double> x) {
    engine::FlatCircuit flat = engine::flatten(model, x);
    engine::Workspace ws;
    engine::run_gradient(flat, {}, ws);

    GradientVector grad;
    grad.theta.assign(model.params.theta.size(), 0.0);
    if (model.params.psi_trainable) grad.psi.assign(model.params.psi.size(), 0.0);
    engine::accumulate_slot_gradient(flat, ws.dangle, 1.0, grad.theta, grad.psi);
    return grad;
}

double input_derivative(const ReuploaderModel& model, std::span<const double> x,
                        const DerivativeRequest& req) {
    if (req.order != 1 && req.order != 2)
        throw std::invalid_argument("input_derivative: order must be 1 or 2");
    if (req.dim < 0 || req.dim >= model.input_dim)
        throw std::invalid_argument("input_derivative: dim out of range");

    engine::FlatCircuit flat = engine::flatten(model, x);
    const auto& group = flat.enc_groups[req.dim];
    if (group.empty()) return 0.0; // constant in this dim

    engine::Workspace ws;
    constexpr double half_pi = std::numbers::pi / 2.0;

    if (req.order == 1) {
        engine::run_gradient(flat, {}, ws);
        double d = 0.0;
        for (int g : group) d += flat.gates[g].enc_scale * ws.dangle[g];
        return d;
    }

    // order 2: sum_j s_j^2 [f(+pi) - 2f + f(-pi)]/4
    //        + sum_{j<k} (s_j s_k / 2) [f(++) - f(+-) - f(-+) + f(--)]
    const double base = engine::run_forward(flat, ws);
    double d2 = 0.0;
    for (std::size_t j = 0; j < group.size(); ++j) {
        const int gj = group[j];
        const double sj = flat.gates[gj].enc_scale;
        engine::AngleShift plus{gj, std::numbers::pi};
        engine::AngleShift minus{gj, -std::numbers::pi};
        const double fp = engine::run_forward(flat, std::span(&plus, 1), ws);
        const double fm = engine::run_forward(flat, std::span(&minus, 1), ws);
        d2 += sj * sj * (fp - 2.0 * base + fm) * 0.25;

        for (std::size_t k = j + 1; k < group.size(); ++k) {
            const int gk = group[k];
            const double sk = flat.gates[gk].enc_scale;
            double accum = 0.0;
            for (int sgn_j : {+1, -1}) {
                for (int sgn_k : {+1, -1}) {
                    engine::AngleShift shifts[2] = {{gj, sgn_j * half_pi}, {gk, sgn_k * half_pi}};
                    const double f = engine::run_forward(flat, std::span(shifts, 2), ws);
                    accum += (sgn_j * sgn_k > 0 ? f : -f);
                }
            }
            d2 += sj * sk * 0.5 * accum;
        }
    }
    if (!std::isfinite(d2)) throw std::runtime_error("input_derivative: non-finite result");
    return d2;
}

} // namespace qgrow
