#include "qgrow/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qgrow {

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const cd& a : amplitudes) s += std::norm(a);
    return s;
}

StateVector zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 20) {
        throw std::invalid_argument("zero_state: n_qubits must be in [1, 20], got " +
                                    std::to_string(n_qubits));
    }
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t(1) << n_qubits, cd(0.0, 0.0));
    s.amplitudes[0] = cd(1.0, 0.0);
    return s;
}

namespace detail {

void apply_rx_inplace(cd* amp, std::size_t dim, int qubit, double angle) {
    const double c = std::cos(angle * 0.5);
    const double s = std::sin(angle * 0.5);
    const cd ms(0.0, -s); // -i sin(a/2)
    const std::size_t mask = std::size_t(1) << qubit;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & mask) == 0) {
            const cd a0 = amp[i];
            const cd a1 = amp[i | mask];
            amp[i] = c * a0 + ms * a1;
            amp[i | mask] = ms * a0 + c * a1;
        }
    }
}

void apply_ry_inplace(cd* amp, std::size_t dim, int qubit, double angle) {
    const double c = std::cos(angle * 0.5);
    const double s = std::sin(angle * 0.5);
    const std::size_t mask = std::size_t(1) << qubit;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & mask) == 0) {
            const cd a0 = amp[i];
            const cd a1 = amp[i | mask];
            amp[i] = c * a0 - s * a1;
            amp[i | mask] = s * a0 + c * a1;
        }
    }
}

void apply_cnot_inplace(cd* amp, std::size_t dim, int control, int target) {
    const std::size_t cmask = std::size_t(1) << control;
    const std::size_t tmask = std::size_t(1) << target;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amp[i], amp[i | tmask]);
        }
    }
}

void apply_gate_inplace(cd* amp, std::size_t dim, const GateOp& gate) {
    switch (gate.kind) {
    case GateKind::RX: apply_rx_inplace(amp, dim, gate.qubit, gate.angle); break;
    case GateKind::RY: apply_ry_inplace(amp, dim, gate.qubit, gate.angle); break;
    case GateKind::CNOT: apply_cnot_inplace(amp, dim, gate.control, gate.qubit); break;
    }
}

double expectation_z(const cd* amp, std::size_t dim, int qubit) {
    const std::size_t mask = std::size_t(1) << qubit;
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double p = std::norm(amp[i]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

} // namespace detail

static void check_qubit(const StateVector& state, int qubit, const char* who) {
    if (qubit < 0 || qubit >= state.n_qubits) {
        throw std::out_of_range(std::string(who) + ": qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(state.n_qubits) + " qubits");
    }
}

StateVector apply_gate(const StateVector& state, const GateOp& gate) {
    check_qubit(state, gate.qubit, "apply_gate");
    if (gate.kind == GateKind::CNOT) {
        check_qubit(state, gate.control, "apply_gate");
        if (gate.control == gate.qubit) {
            throw std::invalid_argument("apply_gate: CNOT control equals target");
        }
    }
    StateVector out = state;
    detail::apply_gate_inplace(out.amplitudes.data(), out.dim(), gate);
    return out;
}

double expectation_pauli_z(const StateVector& state, int qubit) {
    check_qubit(state, qubit, "expectation_pauli_z");
    return detail::expectation_z(state.amplitudes.data(), state.dim(), qubit);
}

} // namespace qgrow
