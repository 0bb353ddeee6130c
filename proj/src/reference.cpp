#include "qgrow/gradients.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qgrow::reference {

namespace {

struct ResolvedGate {
    GateOp op;
    ParamClass pclass = ParamClass::NONE;
    int slot = -1;
    double psi_scale = 0.0;
    double x_value = 0.0;
    int input_dim = -1;
};

std::vector<ResolvedGate> resolve(const ReuploaderModel& model, std::span<const double> x) {
    if (int(x.size()) != model.input_dim)
        throw std::invalid_argument("reference: input dimension mismatch");
    std::vector<ResolvedGate> gates;
    for (const auto& block : model.blocks) {
        for (const auto& g : block.gates) {
            ResolvedGate r;
            r.pclass = g.pclass;
            r.slot = g.slot;
            r.input_dim = g.input_dim;
            if (g.kind == GateKind::CNOT) {
                r.op = GateOp::cnot(g.control, g.qubit);
            } else {
                double angle = 0.0;
                if (g.pclass == ParamClass::THETA) {
                    angle = model.params.theta[g.slot];
                } else {
                    r.psi_scale = model.params.psi[g.slot];
                    r.x_value = x[g.input_dim];
                    angle = r.psi_scale * r.x_value;
                }
                r.op = (g.kind == GateKind::RX) ? GateOp::rx(g.qubit, angle)
                                                : GateOp::ry(g.qubit, angle);
            }
            gates.push_back(r);
        }
    }
    return gates;
}

// whole-circuit re-evaluation through the public value-semantics gate op
double eval(const std::vector<ResolvedGate>& gates, int n_qubits, int measured,
            int shift_a = -1, double delta_a = 0.0, int shift_b = -1, double delta_b = 0.0) {
    StateVector state = zero_state(n_qubits);
    for (std::size_t i = 0; i < gates.size(); ++i) {
        GateOp op = gates[i].op;
        if (int(i) == shift_a) op.angle += delta_a;
        if (int(i) == shift_b) op.angle += delta_b;
        state = apply_gate(state, op);
    }
    return expectation_pauli_z(state, measured);
}

} // namespace

double forward(const ReuploaderModel& model, std::span<const double> x) {
    auto gates = resolve(model, x);
    return eval(gates, model.n_qubits, model.measured_qubit);
}

GradientVector parameter_shift_gradient(const ReuploaderModel& model,
                                        std::span<const double> x) {
    auto gates = resolve(model, x);
    constexpr double half_pi = std::numbers::pi / 2.0;

    GradientVector grad;
    grad.theta.assign(model.params.theta.size(), 0.0);
    if (model.params.psi_trainable) grad.psi.assign(model.params.psi.size(), 0.0);

    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto& g = gates[i];
        if (g.pclass == ParamClass::NONE) continue;
        if (g.pclass == ParamClass::PSI && !model.params.psi_trainable) continue;
        const double fp = eval(gates, model.n_qubits, model.measured_qubit, int(i), half_pi);
        const double fm = eval(gates, model.n_qubits, model.measured_qubit, int(i), -half_pi);
        const double gate_shift = 0.5 * (fp - fm);
        if (g.pclass == ParamClass::THETA) {
            grad.theta[g.slot] += gate_shift;
        } else {
            grad.psi[g.slot] += g.x_value * gate_shift;
        }
    }
    return grad;
}

double input_derivative(const ReuploaderModel& model, std::span<const double> x,
                        const DerivativeRequest& req) {
    if (req.order != 1 && req.order != 2)
        throw std::invalid_argument("reference::input_derivative: order must be 1 or 2");
    auto gates = resolve(model, x);
    constexpr double pi = std::numbers::pi;
    constexpr double half_pi = pi / 2.0;

    std::vector<int> enc;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (gates[i].pclass == ParamClass::PSI && gates[i].input_dim == req.dim)
            enc.push_back(int(i));
    }
    if (enc.empty()) return 0.0;

    if (req.order == 1) {
        double d = 0.0;
        for (int i : enc) {
            const double fp = eval(gates, model.n_qubits, model.measured_qubit, i, half_pi);
            const double fm = eval(gates, model.n_qubits, model.measured_qubit, i, -half_pi);
            d += gates[i].psi_scale * 0.5 * (fp - fm);
        }
        return d;
    }

    // ordered pair enumeration: D_g D_h f for every (g, h), same-gate pairs
    // composing the two half shifts into full shifts
    const double base = eval(gates, model.n_qubits, model.measured_qubit);
    double d2 = 0.0;
    for (int g : enc) {
        for (int h : enc) {
            const double w = gates[g].psi_scale * gates[h].psi_scale;
            if (g == h) {
                const double fp = eval(gates, model.n_qubits, model.measured_qubit, g, pi);
                const double fm = eval(gates, model.n_qubits, model.measured_qubit, g, -pi);
                d2 += w * 0.25 * (fp - 2.0 * base + fm);
            } else {
                const double fpp =
                    eval(gates, model.n_qubits, model.measured_qubit, g, half_pi, h, half_pi);
                const double fpm =
                    eval(gates, model.n_qubits, model.measured_qubit, g, half_pi, h, -half_pi);
                const double fmp =
                    eval(gates, model.n_qubits, model.measured_qubit, g, -half_pi, h, half_pi);
                const double fmm =
                    eval(gates, model.n_qubits, model.measured_qubit, g, -half_pi, h, -half_pi);
                d2 += w * 0.25 * (fpp - fpm - fmp + fmm);
            }
        }
    }
    return d2;
}

} // namespace qgrow::reference
