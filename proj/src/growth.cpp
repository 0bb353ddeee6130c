#include "qgrow/growth.hpp"

#include "qgrow/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace qgrow {

bool should_grow(const GrowthSchedule& schedule, int epoch,
                 std::span<const double> test_loss_history, int current_fm_blocks) {
    if (current_fm_blocks >= schedule.max_feature_map_blocks) return false;

    if (schedule.trigger == GrowthTrigger::FIXED_INTERVAL) {
        return epoch > 0 && schedule.interval_epochs > 0 &&
               epoch % schedule.interval_epochs == 0;
    }

    // PLATEAU: count entries since the last relative improvement of the
    // best loss seen in this history window
    if (int(test_loss_history.size()) < schedule.patience + 1) return false;
    double best = std::numeric_limits<double>::infinity();
    int last_improvement = 0;
    for (int i = 0; i < int(test_loss_history.size()); ++i) {
        const double loss = test_loss_history[std::size_t(i)];
        if (loss < best * (1.0 - schedule.min_improvement) || !std::isfinite(best)) {
            last_improvement = i;
        }
        best = std::min(best, loss);
    }
    return int(test_loss_history.size()) - 1 - last_improvement >= schedule.patience;
}

std::vector<int> middle_out_order(int n_gaps) {
    std::vector<int> order(std::size_t(std::max(0, n_gaps)));
    for (int i = 0; i < n_gaps; ++i) order[std::size_t(i)] = i;
    std::stable_sort(order.begin(), order.end(), [n_gaps](int a, int b) {
        const int da = std::abs(2 * a - (n_gaps - 1));
        const int db = std::abs(2 * b - (n_gaps - 1));
        if (da != db) return da < db;
        return a < b;
    });
    return order;
}

std::vector<bool> gap_occupancy(const ReuploaderModel& model) {
    const int n_ansatz = model.ansatz_block_count();
    std::vector<bool> occupied(std::size_t(std::max(0, n_ansatz - 1)), false);
    int ansatz_seen = 0;
    for (const auto& block : model.blocks) {
        if (block.role == BlockRole::ANSATZ) {
            ++ansatz_seen;
        } else if (ansatz_seen >= 1 && ansatz_seen <= n_ansatz - 1) {
            occupied[std::size_t(ansatz_seen - 1)] = true;
        }
    }
    return occupied;
}

std::vector<std::vector<double>> make_probe_grid(
    const std::vector<std::pair<double, double>>& domain, int points_per_dim) {
    std::vector<std::vector<double>> probes;
    const std::size_t dims = domain.size();
    std::vector<int> idx(dims, 0);
    const long long total = [&] {
        long long t = 1;
        for (std::size_t d = 0; d < dims; ++d) t *= points_per_dim;
        return t;
    }();
    probes.reserve(std::size_t(total));
    for (long long n = 0; n < total; ++n) {
        std::vector<double> point(dims);
        long long rem = n;
        for (std::size_t d = 0; d < dims; ++d) {
            const int i = int(rem % points_per_dim);
            rem /= points_per_dim;
            const auto [lo, hi] = domain[d];
            point[d] = (points_per_dim == 1) ? lo : lo + (hi - lo) * i / (points_per_dim - 1);
        }
        probes.push_back(std::move(point));
    }
    return probes;
}

double verify_preservation(const ReuploaderModel& before, const ReuploaderModel& after,
                           const std::vector<std::vector<double>>& probes, double /*tol*/) {
    if (before.input_dim != after.input_dim)
        throw std::invalid_argument("verify_preservation: input_dim mismatch");
    engine::Workspace ws;
    double residual = 0.0;
    for (const auto& x : probes) {
        const double fb = engine::run_forward(engine::flatten(before, x), ws);
        const double fa = engine::run_forward(engine::flatten(after, x), ws);
        residual = std::max(residual, std::abs(fa - fb));
    }
    return residual;
}

namespace {

constexpr double kAnsatzPairHi = 0.1;
const double kFmPairHi = std::numbers::pi / 9.0;

// Instantiate a template as concrete gates with freshly appended slots,
// identity-pair initialized.
BlockSpec instantiate_identity_block(const BlockTemplate& bt, ParameterStore& params,
                                     std::mt19937_64& rng) {
    BlockSpec block;
    block.role = bt.role;
    std::unordered_map<int, int> first_of_pair; // pair_group -> slot
    for (const auto& gt : bt.gates) {
        GateSpec g;
        g.kind = gt.kind;
        g.qubit = gt.qubit;
        g.control = gt.control;
        g.pclass = gt.pclass;
        g.input_dim = gt.input_dim;
        if (gt.pclass != ParamClass::NONE) {
            const bool is_theta = gt.pclass == ParamClass::THETA;
            auto& values = is_theta ? params.theta : params.psi;
            auto& pairs = is_theta ? params.theta_pair : params.psi_pair;
            const int slot = int(values.size());
            double value = 0.0;
            int partner = -1;
            if (gt.pair_group >= 0) {
                auto it = first_of_pair.find(gt.pair_group);
                if (it == first_of_pair.end()) {
                    const double hi = is_theta ? kAnsatzPairHi : kFmPairHi;
                    value = std::uniform_real_distribution<double>(0.0, hi)(rng);
                    first_of_pair.emplace(gt.pair_group, slot);
                } else {
                    partner = it->second;
                    value = -values[std::size_t(partner)];
                    pairs[std::size_t(partner)] = slot;
                }
            }
            values.push_back(value);
            pairs.push_back(partner);
            g.slot = slot;
            g.pair_slot = partner;
        }
        block.gates.push_back(g);
    }
    // backfill first members' pair links
    for (auto& g : block.gates) {
        if (g.pclass == ParamClass::THETA && g.slot >= 0)
            g.pair_slot = params.theta_pair[std::size_t(g.slot)];
        else if (g.pclass == ParamClass::PSI && g.slot >= 0)
            g.pair_slot = params.psi_pair[std::size_t(g.slot)];
    }
    return block;
}

// block-vector insertion index for gap g: right after the g-th ansatz block
std::size_t insertion_index_for_gap(const ReuploaderModel& model, int gap) {
    int ansatz_seen = 0;
    for (std::size_t i = 0; i < model.blocks.size(); ++i) {
        if (model.blocks[i].role == BlockRole::ANSATZ) {
            ++ansatz_seen;
            if (ansatz_seen == gap + 1) return i + 1;
        }
    }
    throw std::logic_error("grow: gap index beyond ansatz stack");
}

} // namespace

std::pair<ReuploaderModel, GrowthEvent> grow(const ReuploaderModel& model,
                                             const GrowthSchedule& schedule,
                                             std::uint64_t seed, int epoch) {
    const int ell = schedule.blocks_per_event;
    if (ell < 1) throw std::invalid_argument("grow: blocks_per_event must be >= 1");

    GrowthEvent event;
    event.epoch = epoch;
    event.strategy = schedule.strategy;

    ReuploaderModel grown = model;
    std::mt19937_64 rng(seed);

    if (schedule.strategy == GrowthKind::BLOCK) {
        if (model.feature_map_block_count() + ell > schedule.max_feature_map_blocks)
            throw std::runtime_error("grow: block growth saturated at max depth");
        if (schedule.fm_template.gates.empty() || schedule.ansatz_template.gates.empty())
            throw std::invalid_argument("grow: BLOCK strategy needs fm and ansatz templates");
        for (int i = 0; i < ell; ++i) {
            event.positions.push_back(int(grown.blocks.size()));
            grown.blocks.push_back(
                instantiate_identity_block(schedule.fm_template, grown.params, rng));
            grown.blocks.push_back(
                instantiate_identity_block(schedule.ansatz_template, grown.params, rng));
        }
        event.blocks_added = 2 * ell;
    } else {
        if (schedule.fm_template.gates.empty())
            throw std::invalid_argument("grow: FM strategy needs a feature-map template");
        auto occupied = gap_occupancy(grown);
        std::vector<int> fill_order;
        if (schedule.strategy == GrowthKind::SEQ_FM) {
            fill_order.resize(occupied.size());
            for (std::size_t i = 0; i < occupied.size(); ++i) fill_order[i] = int(i);
        } else {
            fill_order = middle_out_order(int(occupied.size()));
        }
        int empty_gaps = 0;
        for (bool occ : occupied) empty_gaps += occ ? 0 : 1;
        if (empty_gaps < ell)
            throw std::runtime_error("grow: feature-map growth saturated, no empty gap left");
        if (model.feature_map_block_count() + ell > schedule.max_feature_map_blocks)
            throw std::runtime_error("grow: feature-map growth saturated at max depth");

        for (int i = 0; i < ell; ++i) {
            int gap = -1;
            for (int candidate : fill_order) {
                if (!occupied[std::size_t(candidate)]) {
                    gap = candidate;
                    break;
                }
            }
            occupied[std::size_t(gap)] = true;
            event.positions.push_back(gap);
            BlockSpec block = instantiate_identity_block(schedule.fm_template, grown.params, rng);
            grown.blocks.insert(grown.blocks.begin() +
                                    std::ptrdiff_t(insertion_index_for_gap(grown, gap)),
                                std::move(block));
        }
        event.blocks_added = ell;
    }

    std::vector<std::pair<double, double>> domain = schedule.probe_domain;
    if (domain.empty())
        domain.assign(std::size_t(model.input_dim), {0.0, 2.0 * std::numbers::pi});
    event.preservation_residual =
        verify_preservation(model, grown, make_probe_grid(domain, 64), 1e-10);

    return {std::move(grown), std::move(event)};
}

} // namespace qgrow
