#pragma once

#include "qgrow/model.hpp"

#include <span>
#include <vector>

namespace qgrow::engine {

/// Parameter slot feeding a flattened rotation. dangle is the derivative
/// of the resolved gate angle with respect to the stored value: 1 for
/// theta slots, x[input_dim] for psi slots.
struct SlotRef {
    ParamClass pclass = ParamClass::NONE;
    int slot = -1;
    double dangle = 1.0;
};

/// Rotation with all wire-adjacent same-axis rotations merged into one
/// angle. Same-axis rotations on a qubit commute, so the merge is exact;
/// every contributing parameter keeps its own SlotRef. A fused encoding
/// gate carries the summed frequency scale of its members.
struct FlatGate {
    GateKind kind = GateKind::RX;
    int qubit = 0;
    int control = -1;
    double angle = 0.0;
    std::vector<SlotRef> slots;
    int enc_dim = -1;
    double enc_scale = 0.0;
};

struct FlatCircuit {
    int n_qubits = 0;
    int measured_qubit = 0;
    std::size_t dim = 0;
    std::vector<FlatGate> gates;
    std::size_t n_theta = 0;
    std::size_t n_psi = 0;
    bool psi_trainable = true;
    std::vector<std::vector<int>> enc_groups; // per input dim, gate indices
};

/// Additive offset on one flattened gate's angle. Entries addressing the
/// same gate accumulate.
struct AngleShift {
    int gate = 0;
    double delta = 0.0;
};

/// Reusable scratch buffers so hot loops avoid per-call allocation.
struct Workspace {
    std::vector<cd> phi;
    std::vector<cd> lam;
    std::vector<double> dangle;
};

FlatCircuit flatten(const ReuploaderModel& model, std::span<const double> x);

double run_forward(const FlatCircuit& circuit, std::span<const AngleShift> shifts,
                   Workspace& ws);
double run_forward(const FlatCircuit& circuit, Workspace& ws);

/// <Z> value plus d<Z>/d(angle) for every flattened gate (0 for CNOT),
/// written to ws.dangle. One forward pass and one reverse sweep; values
/// are the exact rotation-gate derivatives, identical to the two-point
/// shift rule. Throws std::runtime_error on non-finite results.
double run_gradient(const FlatCircuit& circuit, std::span<const AngleShift> shifts,
                    Workspace& ws);

/// Scatter per-gate angle derivatives into per-slot parameter partials:
/// theta_out[slot] += scale * dangle, psi_out[slot] += scale * x_d * dangle.
/// psi_out may be empty when the psi class is frozen.
void accumulate_slot_gradient(const FlatCircuit& circuit, std::span<const double> dangle,
                              double scale, std::span<double> theta_out,
                              std::span<double> psi_out);

} // namespace qgrow::engine
