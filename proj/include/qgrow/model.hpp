#pragma once

#include "qgrow/statevector.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qgrow {

enum class BlockRole { ANSATZ, FEATURE_MAP };
enum class ParamClass { NONE, THETA, PSI };

/// One gate slot inside a built model. ANSATZ rotations read their angle
/// from theta[slot]; FEATURE_MAP rotations use psi[slot] * x[input_dim].
/// pair_slot records the partner created by identity-pair initialization
/// (informational after construction; both members train independently).
struct GateSpec {
    GateKind kind = GateKind::RX;
    int qubit = 0;
    int control = -1;
    ParamClass pclass = ParamClass::NONE;
    int slot = -1;
    int pair_slot = -1;
    int input_dim = -1;
};

struct BlockSpec {
    BlockRole role = BlockRole::ANSATZ;
    std::vector<GateSpec> gates;
};

/// theta: ansatz angles (radians). psi: feature-map frequency scales.
/// gamma is fixed at 1 and not stored. psi_trainable freezes the whole
/// psi class when false (fixed-frequency ablations).
struct ParameterStore {
    std::vector<double> theta;
    std::vector<double> psi;
    std::vector<int> theta_pair; // partner slot or -1, aligned with theta
    std::vector<int> psi_pair;
    bool psi_trainable = true;

    std::size_t trainable_count() const {
        return theta.size() + (psi_trainable ? psi.size() : 0);
    }
};

struct ReuploaderModel {
    int n_qubits = 0;
    int input_dim = 1;
    int measured_qubit = 0;
    std::vector<BlockSpec> blocks;
    ParameterStore params;

    int feature_map_block_count() const;
    int ansatz_block_count() const;
};

// ---- layout templates (slot-free description fed to build_reuploader) ----

struct GateTemplate {
    GateKind kind = GateKind::RX;
    int qubit = 0;
    int control = -1;
    ParamClass pclass = ParamClass::NONE;
    int input_dim = -1;
    int pair_group = -1; // two gates sharing a group form an identity pair
};

struct BlockTemplate {
    BlockRole role = BlockRole::ANSATZ;
    std::vector<GateTemplate> gates;
};

struct LayoutSpec {
    int n_qubits = 1;
    int input_dim = 1;
    int measured_qubit = 0;
    std::vector<BlockTemplate> blocks;
};

/// Parameter initialization. RANDOM draws every slot independently from
/// its class range. IDENTITY_PAIRS draws the first member of each pair
/// from the class range and negates it for the second member, so every
/// pair composes to the identity at creation; unpaired slots start at 0.
struct InitSpec {
    enum class Mode { RANDOM, IDENTITY_PAIRS };
    Mode mode = Mode::IDENTITY_PAIRS;
    double theta_lo = 0.0, theta_hi = 0.0;
    double psi_lo = 0.0, psi_hi = 0.0;

    static InitSpec random(double theta_lo, double theta_hi, double psi_lo, double psi_hi) {
        return {Mode::RANDOM, theta_lo, theta_hi, psi_lo, psi_hi};
    }
    static InitSpec random(double lo, double hi) { return random(lo, hi, lo, hi); }
    static InitSpec identity_pairs(double theta_hi, double psi_hi) {
        return {Mode::IDENTITY_PAIRS, 0.0, theta_hi, 0.0, psi_hi};
    }
};

// Identity-pair draw ranges used by every preset and by growth insertions:
// ansatz first members from uniform[0, 0.1], feature-map first members from
// uniform[0, pi/9].
InitSpec default_identity_init();

/// Deterministic for a fixed (layout, init, seed). Throws
/// std::invalid_argument on malformed layouts (empty, bad qubit index,
/// feature-map input_dim out of range, pair groups that are not exactly
/// two same-kind gates).
ReuploaderModel build_reuploader(const LayoutSpec& layout, const InitSpec& init,
                                 std::uint64_t seed);

/// f(x, theta, psi) = <Z_measured> of the composed circuit on |0...0>.
/// Throws std::invalid_argument when x.size() != input_dim.
double forward(const ReuploaderModel& model, std::span<const double> x);

// ---- experiment layouts ----

/// Leading ansatz block followed by n_layers repetitions of
/// (feature map, ansatz). Ansatz: one RY pair per qubit plus a CNOT
/// entangler (control = measured qubit) on multi-qubit models. Feature
/// map: one RX pair per qubit, qubit q encoding input dimension q.
LayoutSpec student_teacher_layout(int n_qubits, int n_layers);

/// Full ansatz stack of n_ansatz blocks with feature-map blocks only in
/// the listed gaps (gap g sits between ansatz blocks g and g+1). Used by
/// the feature-map growth strategies, which pre-allocate all ansatz
/// blocks and fill gaps during training.
LayoutSpec gapped_student_teacher_layout(int n_qubits, int n_ansatz,
                                         const std::vector<int>& fm_gaps);

/// Two-qubit PDE variant: ansatz blocks carry an RY pair and an RX pair
/// per qubit (plus CNOT); feature maps encode x on qubit 0 and y on
/// qubit 1.
LayoutSpec laplace_layout(int n_layers);
LayoutSpec gapped_laplace_layout(int n_ansatz, const std::vector<int>& fm_gaps);

/// Minimal single-rotation reuploader (one RY per qubit per ansatz block,
/// one RX per qubit per feature map, all qubits sharing input dimension
/// 0). Spectrum analysis helper.
LayoutSpec angle_encoding_layout(int n_qubits, int n_layers);

// ---- layout serialization (JSON document, round-trips parameters
//      bit-exactly) ----

std::string model_to_json(const ReuploaderModel& model);
ReuploaderModel model_from_json(const std::string& text);

} // namespace qgrow
