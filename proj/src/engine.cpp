#include "qgrow/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace qgrow::engine {

FlatCircuit flatten(const ReuploaderModel& model, std::span<const double> x) {
    if (int(x.size()) != model.input_dim) {
        throw std::invalid_argument("flatten: input has " + std::to_string(x.size()) +
                                    " dims, model expects " + std::to_string(model.input_dim));
    }
    FlatCircuit flat;
    flat.n_qubits = model.n_qubits;
    flat.measured_qubit = model.measured_qubit;
    flat.dim = std::size_t(1) << model.n_qubits;
    flat.n_theta = model.params.theta.size();
    flat.n_psi = model.params.psi.size();
    flat.psi_trainable = model.params.psi_trainable;
    flat.enc_groups.assign(std::size_t(model.input_dim), {});

    // last flattened gate touching each wire, -1 when blocked
    std::vector<int> wire_tail(std::size_t(model.n_qubits), -1);

    for (const auto& block : model.blocks) {
        for (const auto& g : block.gates) {
            if (g.kind == GateKind::CNOT) {
                FlatGate fg;
                fg.kind = GateKind::CNOT;
                fg.qubit = g.qubit;
                fg.control = g.control;
                flat.gates.push_back(std::move(fg));
                wire_tail[g.qubit] = -1;
                wire_tail[g.control] = -1;
                continue;
            }

            double angle = 0.0;
            SlotRef ref;
            ref.pclass = g.pclass;
            ref.slot = g.slot;
            double scale = 0.0;
            if (g.pclass == ParamClass::THETA) {
                angle = model.params.theta[g.slot];
                ref.dangle = 1.0;
            } else {
                scale = model.params.psi[g.slot];
                angle = scale * x[g.input_dim];
                ref.dangle = x[g.input_dim];
            }

            const int tail = wire_tail[g.qubit];
            if (tail >= 0 && flat.gates[tail].kind == g.kind &&
                flat.gates[tail].enc_dim == g.input_dim) {
                FlatGate& fg = flat.gates[tail];
                fg.angle += angle;
                fg.enc_scale += scale;
                fg.slots.push_back(ref);
            } else {
                FlatGate fg;
                fg.kind = g.kind;
                fg.qubit = g.qubit;
                fg.angle = angle;
                fg.enc_dim = g.input_dim;
                fg.enc_scale = scale;
                fg.slots.push_back(ref);
                const int idx = int(flat.gates.size());
                flat.gates.push_back(std::move(fg));
                wire_tail[g.qubit] = idx;
                if (g.input_dim >= 0) flat.enc_groups[g.input_dim].push_back(idx);
            }
        }
    }
    return flat;
}

static inline double shifted_angle(const FlatGate& g, int idx,
                                   std::span<const AngleShift> shifts) {
    double a = g.angle;
    for (const auto& s : shifts) {
        if (s.gate == idx) a += s.delta;
    }
    return a;
}

static void forward_into(const FlatCircuit& c, std::span<const AngleShift> shifts,
                         std::vector<cd>& phi) {
    phi.assign(c.dim, cd(0.0, 0.0));
    phi[0] = cd(1.0, 0.0);
    cd* amp = phi.data();
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        const FlatGate& gate = c.gates[g];
        switch (gate.kind) {
        case GateKind::RX:
            detail::apply_rx_inplace(amp, c.dim, gate.qubit, shifted_angle(gate, int(g), shifts));
            break;
        case GateKind::RY:
            detail::apply_ry_inplace(amp, c.dim, gate.qubit, shifted_angle(gate, int(g), shifts));
            break;
        case GateKind::CNOT:
            detail::apply_cnot_inplace(amp, c.dim, gate.control, gate.qubit);
            break;
        }
    }
}

double run_forward(const FlatCircuit& circuit, std::span<const AngleShift> shifts,
                   Workspace& ws) {
    forward_into(circuit, shifts, ws.phi);
    const double value =
        detail::expectation_z(ws.phi.data(), circuit.dim, circuit.measured_qubit);
    if (!std::isfinite(value)) throw std::runtime_error("run_forward: non-finite value");
    return value;
}

double run_forward(const FlatCircuit& circuit, Workspace& ws) {
    return run_forward(circuit, std::span<const AngleShift>{}, ws);
}

// Im(<lam|X_q|phi>) without building X|phi>
static inline double gen_term_x(const cd* lam, const cd* phi, std::size_t dimension, int qubit) {
    const std::size_t mask = std::size_t(1) << qubit;
    double im = 0.0;
    for (std::size_t i = 0; i < dimension; ++i) {
        if ((i & mask) == 0) {
            const cd t = std::conj(lam[i]) * phi[i | mask] + std::conj(lam[i | mask]) * phi[i];
            im += t.imag();
        }
    }
    return im;
}

// Im(<lam|Y_q|phi>) = Re(conj(lam1)*phi0 - conj(lam0)*phi1) summed over pairs
static inline double gen_term_y(const cd* lam, const cd* phi, std::size_t dimension, int qubit) {
    const std::size_t mask = std::size_t(1) << qubit;
    double re = 0.0;
    for (std::size_t i = 0; i < dimension; ++i) {
        if ((i & mask) == 0) {
            const cd t = std::conj(lam[i | mask]) * phi[i] - std::conj(lam[i]) * phi[i | mask];
            re += t.real();
        }
    }
    return re;
}

double run_gradient(const FlatCircuit& circuit, std::span<const AngleShift> shifts,
                    Workspace& ws) {
    forward_into(circuit, shifts, ws.phi);
    const std::size_t dimension = circuit.dim;
    cd* phi = ws.phi.data();

    const double value = detail::expectation_z(phi, dimension, circuit.measured_qubit);

    // lam = Z|phi>
    ws.lam.assign(dimension, cd(0.0, 0.0));
    cd* lam = ws.lam.data();
    const std::size_t zmask = std::size_t(1) << circuit.measured_qubit;
    for (std::size_t i = 0; i < dimension; ++i) lam[i] = (i & zmask) ? -phi[i] : phi[i];

    ws.dangle.assign(circuit.gates.size(), 0.0);

    for (int g = int(circuit.gates.size()) - 1; g >= 0; --g) {
        const FlatGate& gate = circuit.gates[g];
        if (gate.kind == GateKind::CNOT) {
            detail::apply_cnot_inplace(phi, dimension, gate.control, gate.qubit);
            detail::apply_cnot_inplace(lam, dimension, gate.control, gate.qubit);
            continue;
        }
        // d<Z>/d(angle_g) = 2 Re <lam_g| (-i P/2) |phi_g> = Im <lam|P|phi>
        ws.dangle[g] = (gate.kind == GateKind::RX)
                           ? gen_term_x(lam, phi, dimension, gate.qubit)
                           : gen_term_y(lam, phi, dimension, gate.qubit);
        const double a = shifted_angle(gate, g, shifts);
        if (gate.kind == GateKind::RX) {
            detail::apply_rx_inplace(phi, dimension, gate.qubit, -a);
            detail::apply_rx_inplace(lam, dimension, gate.qubit, -a);
        } else {
            detail::apply_ry_inplace(phi, dimension, gate.qubit, -a);
            detail::apply_ry_inplace(lam, dimension, gate.qubit, -a);
        }
    }

    if (!std::isfinite(value)) throw std::runtime_error("run_gradient: non-finite value");
    for (double d : ws.dangle) {
        if (!std::isfinite(d)) throw std::runtime_error("run_gradient: non-finite partial");
    }
    return value;
}

void accumulate_slot_gradient(const FlatCircuit& circuit, std::span<const double> dangle,
                              double scale, std::span<double> theta_out,
                              std::span<double> psi_out) {
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const double d = dangle[g];
        if (d == 0.0) continue;
        for (const SlotRef& ref : circuit.gates[g].slots) {
            if (ref.pclass == ParamClass::THETA) {
                theta_out[ref.slot] += scale * ref.dangle * d;
            } else if (!psi_out.empty()) {
                psi_out[ref.slot] += scale * ref.dangle * d;
            }
        }
    }
}

} // namespace qgrow::engine
