#include "qgrow/model.hpp"

#include "qgrow/engine.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace qgrow {

int ReuploaderModel::feature_map_block_count() const {
    int n = 0;
    for (const auto& b : blocks) n += (b.role == BlockRole::FEATURE_MAP) ? 1 : 0;
    return n;
}

int ReuploaderModel::ansatz_block_count() const {
    int n = 0;
    for (const auto& b : blocks) n += (b.role == BlockRole::ANSATZ) ? 1 : 0;
    return n;
}

InitSpec default_identity_init() {
    return InitSpec::identity_pairs(0.1, std::numbers::pi / 9.0);
}

static void validate_layout(const LayoutSpec& layout) {
    if (layout.blocks.empty()) throw std::invalid_argument("build_reuploader: empty layout");
    if (layout.n_qubits < 1 || layout.n_qubits > 20)
        throw std::invalid_argument("build_reuploader: n_qubits out of range");
    if (layout.input_dim < 1)
        throw std::invalid_argument("build_reuploader: input_dim must be >= 1");
    if (layout.measured_qubit < 0 || layout.measured_qubit >= layout.n_qubits)
        throw std::invalid_argument("build_reuploader: measured_qubit out of range");

    std::unordered_map<long, int> pair_sizes;
    long block_idx = 0;
    for (const auto& block : layout.blocks) {
        for (const auto& g : block.gates) {
            if (g.qubit < 0 || g.qubit >= layout.n_qubits)
                throw std::invalid_argument("build_reuploader: gate qubit out of range");
            if (g.kind == GateKind::CNOT) {
                if (g.control < 0 || g.control >= layout.n_qubits || g.control == g.qubit)
                    throw std::invalid_argument("build_reuploader: bad CNOT wiring");
                if (g.pclass != ParamClass::NONE)
                    throw std::invalid_argument("build_reuploader: CNOT cannot carry a parameter");
                continue;
            }
            if (block.role == BlockRole::FEATURE_MAP) {
                if (g.pclass != ParamClass::PSI || g.kind != GateKind::RX)
                    throw std::invalid_argument(
                        "build_reuploader: feature-map gates must be psi-scaled RX");
                if (g.input_dim < 0 || g.input_dim >= layout.input_dim)
                    throw std::invalid_argument("build_reuploader: feature-map input_dim " +
                                                std::to_string(g.input_dim) +
                                                " out of range for input_dim " +
                                                std::to_string(layout.input_dim));
            } else {
                if (g.pclass != ParamClass::THETA)
                    throw std::invalid_argument(
                        "build_reuploader: ansatz rotations must be theta-parameterized");
            }
            if (g.pair_group >= 0) pair_sizes[block_idx * 100000 + g.pair_group]++;
        }
        ++block_idx;
    }
    for (const auto& [key, count] : pair_sizes) {
        if (count != 2)
            throw std::invalid_argument("build_reuploader: pair groups must have exactly 2 gates");
    }
}

namespace {
struct SlotAssigner {
    ParameterStore& store;
    std::mt19937_64& rng;
    const InitSpec& init;
    // pair bookkeeping: (block, group) -> first slot assigned
    std::unordered_map<long, std::pair<int, ParamClass>> open_pairs;

    double draw(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    int assign(long block_idx, const GateTemplate& g) {
        const bool is_theta = g.pclass == ParamClass::THETA;
        auto& values = is_theta ? store.theta : store.psi;
        auto& pairs = is_theta ? store.theta_pair : store.psi_pair;
        const double lo = is_theta ? init.theta_lo : init.psi_lo;
        const double hi = is_theta ? init.theta_hi : init.psi_hi;

        const int slot = int(values.size());
        double value = 0.0;
        int partner = -1;
        if (init.mode == InitSpec::Mode::RANDOM) {
            value = draw(lo, hi);
        } else if (g.pair_group >= 0) {
            const long key = block_idx * 100000 + g.pair_group;
            auto it = open_pairs.find(key);
            if (it == open_pairs.end()) {
                value = draw(lo, hi);
                open_pairs.emplace(key, std::make_pair(slot, g.pclass));
            } else {
                if (it->second.second != g.pclass)
                    throw std::invalid_argument(
                        "build_reuploader: pair group mixes parameter classes");
                partner = it->second.first;
                value = -values[partner];
                pairs[partner] = slot;
            }
        }
        values.push_back(value);
        pairs.push_back(partner);
        return slot;
    }
};
} // namespace

ReuploaderModel build_reuploader(const LayoutSpec& layout, const InitSpec& init,
                                 std::uint64_t seed) {
    validate_layout(layout);

    ReuploaderModel model;
    model.n_qubits = layout.n_qubits;
    model.input_dim = layout.input_dim;
    model.measured_qubit = layout.measured_qubit;

    std::mt19937_64 rng(seed);
    SlotAssigner assigner{model.params, rng, init, {}};

    long block_idx = 0;
    for (const auto& bt : layout.blocks) {
        BlockSpec block;
        block.role = bt.role;
        for (const auto& gt : bt.gates) {
            GateSpec gate;
            gate.kind = gt.kind;
            gate.qubit = gt.qubit;
            gate.control = gt.control;
            gate.pclass = gt.pclass;
            gate.input_dim = gt.input_dim;
            if (gt.pclass != ParamClass::NONE) gate.slot = assigner.assign(block_idx, gt);
            block.gates.push_back(gate);
        }
        model.blocks.push_back(std::move(block));
        ++block_idx;
    }

    // close out pair partner links (second member recorded on first above)
    for (auto& block : model.blocks) {
        for (auto& gate : block.gates) {
            if (gate.pclass == ParamClass::THETA && gate.slot >= 0)
                gate.pair_slot = model.params.theta_pair[gate.slot];
            else if (gate.pclass == ParamClass::PSI && gate.slot >= 0)
                gate.pair_slot = model.params.psi_pair[gate.slot];
        }
    }
    return model;
}

double forward(const ReuploaderModel& model, std::span<const double> x) {
    engine::FlatCircuit flat = engine::flatten(model, x);
    return engine::run_forward(flat);
}

// ---- layouts ----

static BlockTemplate st_ansatz_block(int n_qubits, int measured) {
    BlockTemplate b;
    b.role = BlockRole::ANSATZ;
    for (int q = 0; q < n_qubits; ++q) {
        b.gates.push_back({GateKind::RY, q, -1, ParamClass::THETA, -1, 2 * q});
        b.gates.push_back({GateKind::RY, q, -1, ParamClass::THETA, -1, 2 * q});
    }
    if (n_qubits >= 2)
        b.gates.push_back({GateKind::CNOT, (measured + 1) % n_qubits, measured,
                           ParamClass::NONE, -1, -1});
    return b;
}

static BlockTemplate st_fm_block(int n_qubits) {
    BlockTemplate b;
    b.role = BlockRole::FEATURE_MAP;
    for (int q = 0; q < n_qubits; ++q) {
        b.gates.push_back({GateKind::RX, q, -1, ParamClass::PSI, q, 2 * q});
        b.gates.push_back({GateKind::RX, q, -1, ParamClass::PSI, q, 2 * q});
    }
    return b;
}

LayoutSpec gapped_student_teacher_layout(int n_qubits, int n_ansatz,
                                         const std::vector<int>& fm_gaps) {
    LayoutSpec layout;
    layout.n_qubits = n_qubits;
    layout.input_dim = n_qubits;
    layout.measured_qubit = 0;
    std::vector<bool> occupied(std::size_t(std::max(0, n_ansatz - 1)), false);
    for (int g : fm_gaps) {
        if (g < 0 || g >= n_ansatz - 1)
            throw std::invalid_argument("layout: feature-map gap out of range");
        occupied[g] = true;
    }
    for (int a = 0; a < n_ansatz; ++a) {
        layout.blocks.push_back(st_ansatz_block(n_qubits, 0));
        if (a < n_ansatz - 1 && occupied[a])
            layout.blocks.push_back(st_fm_block(n_qubits));
    }
    return layout;
}

LayoutSpec student_teacher_layout(int n_qubits, int n_layers) {
    std::vector<int> gaps(n_layers);
    for (int i = 0; i < n_layers; ++i) gaps[i] = i;
    return gapped_student_teacher_layout(n_qubits, n_layers + 1, gaps);
}

static BlockTemplate laplace_ansatz_block() {
    BlockTemplate b;
    b.role = BlockRole::ANSATZ;
    for (int q = 0; q < 2; ++q) {
        b.gates.push_back({GateKind::RY, q, -1, ParamClass::THETA, -1, 4 * q});
        b.gates.push_back({GateKind::RY, q, -1, ParamClass::THETA, -1, 4 * q});
        b.gates.push_back({GateKind::RX, q, -1, ParamClass::THETA, -1, 4 * q + 1});
        b.gates.push_back({GateKind::RX, q, -1, ParamClass::THETA, -1, 4 * q + 1});
    }
    b.gates.push_back({GateKind::CNOT, 1, 0, ParamClass::NONE, -1, -1});
    return b;
}

LayoutSpec gapped_laplace_layout(int n_ansatz, const std::vector<int>& fm_gaps) {
    LayoutSpec layout;
    layout.n_qubits = 2;
    layout.input_dim = 2;
    layout.measured_qubit = 0;
    std::vector<bool> occupied(std::size_t(std::max(0, n_ansatz - 1)), false);
    for (int g : fm_gaps) {
        if (g < 0 || g >= n_ansatz - 1)
            throw std::invalid_argument("layout: feature-map gap out of range");
        occupied[g] = true;
    }
    for (int a = 0; a < n_ansatz; ++a) {
        layout.blocks.push_back(laplace_ansatz_block());
        if (a < n_ansatz - 1 && occupied[a]) layout.blocks.push_back(st_fm_block(2));
    }
    return layout;
}

LayoutSpec laplace_layout(int n_layers) {
    std::vector<int> gaps(n_layers);
    for (int i = 0; i < n_layers; ++i) gaps[i] = i;
    return gapped_laplace_layout(n_layers + 1, gaps);
}

LayoutSpec angle_encoding_layout(int n_qubits, int n_layers) {
    LayoutSpec layout;
    layout.n_qubits = n_qubits;
    layout.input_dim = 1;
    layout.measured_qubit = 0;
    auto ansatz = [&] {
        BlockTemplate b;
        b.role = BlockRole::ANSATZ;
        for (int q = 0; q < n_qubits; ++q)
            b.gates.push_back({GateKind::RY, q, -1, ParamClass::THETA, -1, -1});
        return b;
    };
    layout.blocks.push_back(ansatz());
    for (int l = 0; l < n_layers; ++l) {
        BlockTemplate fm;
        fm.role = BlockRole::FEATURE_MAP;
        for (int q = 0; q < n_qubits; ++q)
            fm.gates.push_back({GateKind::RX, q, -1, ParamClass::PSI, 0, -1});
        layout.blocks.push_back(fm);
        layout.blocks.push_back(ansatz());
    }
    return layout;
}

// ---- JSON serialization ----

using nlohmann::json;

static const char* role_name(BlockRole role) {
    return role == BlockRole::ANSATZ ? "ansatz" : "feature_map";
}
static const char* kind_name(GateKind kind) {
    switch (kind) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    default: return "cnot";
    }
}
static const char* pclass_name(ParamClass c) {
    switch (c) {
    case ParamClass::THETA: return "theta";
    case ParamClass::PSI: return "psi";
    default: return "none";
    }
}

std::string model_to_json(const ReuploaderModel& model) {
    json doc;
    doc["schema"] = 1;
    doc["n_qubits"] = model.n_qubits;
    doc["input_dim"] = model.input_dim;
    doc["measured_qubit"] = model.measured_qubit;
    json blocks = json::array();
    for (const auto& block : model.blocks) {
        json jb;
        jb["role"] = role_name(block.role);
        json gates = json::array();
        for (const auto& g : block.gates) {
            json jg;
            jg["kind"] = kind_name(g.kind);
            jg["qubit"] = g.qubit;
            if (g.kind == GateKind::CNOT) jg["control"] = g.control;
            if (g.pclass != ParamClass::NONE) {
                jg["param"] = pclass_name(g.pclass);
                jg["slot"] = g.slot;
                if (g.pair_slot >= 0) jg["pair"] = g.pair_slot;
                if (g.input_dim >= 0) jg["input_dim"] = g.input_dim;
            }
            gates.push_back(std::move(jg));
        }
        jb["gates"] = std::move(gates);
        blocks.push_back(std::move(jb));
    }
    doc["blocks"] = std::move(blocks);
    doc["theta"] = model.params.theta;
    doc["psi"] = model.params.psi;
    doc["psi_trainable"] = model.params.psi_trainable;
    return doc.dump(2);
}

ReuploaderModel model_from_json(const std::string& text) {
    json doc = json::parse(text);
    ReuploaderModel model;
    model.n_qubits = doc.at("n_qubits").get<int>();
    model.input_dim = doc.at("input_dim").get<int>();
    model.measured_qubit = doc.at("measured_qubit").get<int>();
    model.params.theta = doc.at("theta").get<std::vector<double>>();
    model.params.psi = doc.at("psi").get<std::vector<double>>();
    model.params.psi_trainable = doc.at("psi_trainable").get<bool>();
    model.params.theta_pair.assign(model.params.theta.size(), -1);
    model.params.psi_pair.assign(model.params.psi.size(), -1);

    for (const auto& jb : doc.at("blocks")) {
        BlockSpec block;
        const std::string role = jb.at("role").get<std::string>();
        block.role = role == "ansatz" ? BlockRole::ANSATZ : BlockRole::FEATURE_MAP;
        for (const auto& jg : jb.at("gates")) {
            GateSpec g;
            const std::string kind = jg.at("kind").get<std::string>();
            g.kind = kind == "rx" ? GateKind::RX : (kind == "ry" ? GateKind::RY : GateKind::CNOT);
            g.qubit = jg.at("qubit").get<int>();
            g.control = jg.value("control", -1);
            const std::string pclass = jg.value("param", "none");
            g.pclass = pclass == "theta" ? ParamClass::THETA
                      : pclass == "psi" ? ParamClass::PSI
                                        : ParamClass::NONE;
            g.slot = jg.value("slot", -1);
            g.pair_slot = jg.value("pair", -1);
            g.input_dim = jg.value("input_dim", -1);
            if (g.pclass == ParamClass::THETA && g.pair_slot >= 0)
                model.params.theta_pair[g.slot] = g.pair_slot;
            if (g.pclass == ParamClass::PSI && g.pair_slot >= 0)
                model.params.psi_pair[g.slot] = g.pair_slot;
            block.gates.push_back(g);
        }
        model.blocks.push_back(std::move(block));
    }
    return model;
}

} // namespace qgrow
