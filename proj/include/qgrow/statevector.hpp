#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qgrow {

using cd = std::complex<double>;

/// Dense complex amplitude vector over the 2^n computational basis states.
/// Qubit 0 is the least significant bit of the basis-state index.
struct StateVector {
    int n_qubits = 0;
    std::vector<cd> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }
    double norm_sq() const;
};

enum class GateKind { RX, RY, CNOT };

/// Single gate application request. `angle` is ignored for CNOT;
/// `control` is only meaningful for CNOT.
/// RX(a) = exp(-i a X/2), RY(a) = exp(-i a Y/2).
struct GateOp {
    GateKind kind = GateKind::RX;
    int qubit = 0;
    int control = -1;
    double angle = 0.0;

    static GateOp rx(int qubit, double angle) { return {GateKind::RX, qubit, -1, angle}; }
    static GateOp ry(int qubit, double angle) { return {GateKind::RY, qubit, -1, angle}; }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }
};

/// |0...0> on n_qubits. Throws std::invalid_argument outside 1..20.
StateVector zero_state(int n_qubits);

/// Returns the transformed state; the input is left untouched.
/// Throws std::out_of_range for invalid qubit indices and
/// std::invalid_argument for CNOT with control == target.
StateVector apply_gate(const StateVector& state, const GateOp& gate);

/// <Z_qubit> = sum over basis states of (+|a|^2 if bit clear, -|a|^2 if set).
double expectation_pauli_z(const StateVector& state, int qubit);

namespace detail {
// In-place kernels used by the evaluation engine; callers guarantee
// index validity.
void apply_rx_inplace(cd* amp, std::size_t dim, int qubit, double angle);
void apply_ry_inplace(cd* amp, std::size_t dim, int qubit, double angle);
void apply_cnot_inplace(cd* amp, std::size_t dim, int control, int target);
void apply_gate_inplace(cd* amp, std::size_t dim, const GateOp& gate);
double expectation_z(const cd* amp, std::size_t dim, int qubit);
} // namespace detail

} // namespace qgrow
