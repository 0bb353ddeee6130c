#pragma once

#include "qgrow/model.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qgrow {

enum class GrowthKind { BLOCK, SEQ_FM, INT_FM };
enum class GrowthTrigger { FIXED_INTERVAL, PLATEAU };

/// When and how the circuit grows. For BLOCK growth both templates are
/// appended; the feature-map strategies only use fm_template. Templates
/// normally come from the same layout family the model was built from.
struct GrowthSchedule {
    GrowthKind strategy = GrowthKind::BLOCK;
    GrowthTrigger trigger = GrowthTrigger::FIXED_INTERVAL;
    int interval_epochs = 100;
    int patience = 50;
    double min_improvement = 1e-3; // relative, PLATEAU
    int blocks_per_event = 1;      // ell
    int max_feature_map_blocks = 5;
    BlockTemplate fm_template;
    BlockTemplate ansatz_template;
    // probe grid domain for the preservation audit, per input dim;
    // defaults to [0, 2pi] on every dim when empty
    std::vector<std::pair<double, double>> probe_domain;
};

struct GrowthEvent {
    int epoch = -1;
    GrowthKind strategy = GrowthKind::BLOCK;
    int blocks_added = 0;
    std::vector<int> positions; // gap indices (FM strategies) or block indices (BLOCK)
    double preservation_residual = 0.0;
};

/// Pure trigger predicate. FIXED_INTERVAL fires on positive multiples of
/// the interval; PLATEAU fires when the best loss in the supplied history
/// has not improved by min_improvement (relative) for `patience`
/// consecutive entries. Both require current_fm_blocks < max. Callers
/// that grow repeatedly should pass the history recorded since the last
/// growth event so one plateau does not re-trigger every epoch.
bool should_grow(const GrowthSchedule& schedule, int epoch,
                 std::span<const double> test_loss_history, int current_fm_blocks);

/// Applies one growth event (ell block insertions or appends) and audits
/// that the represented function is unchanged on the probe grid. New
/// rotation pairs are identity-initialized (ansatz first members from
/// uniform[0, 0.1], feature-map from uniform[0, pi/9]); existing slots
/// keep their indices and values. Throws std::runtime_error when the
/// strategy is saturated (no empty gap / max depth reached).
std::pair<ReuploaderModel, GrowthEvent> grow(const ReuploaderModel& model,
                                             const GrowthSchedule& schedule,
                                             std::uint64_t seed, int epoch = -1);

/// Max |forward(after, x) - forward(before, x)| over the probes.
double verify_preservation(const ReuploaderModel& before, const ReuploaderModel& after,
                           const std::vector<std::vector<double>>& probes, double tol);

/// Deterministic middle-out gap permutation: center first, ties broken
/// left before right. Exposed so the fill order is testable directly.
std::vector<int> middle_out_order(int n_gaps);

/// Gap occupancy scan: entry g tells whether the gap between ansatz
/// blocks g and g+1 already holds a feature-map block.
std::vector<bool> gap_occupancy(const ReuploaderModel& model);

/// Uniform Cartesian probe grid, points_per_dim samples per input dim,
/// endpoints included.
std::vector<std::vector<double>> make_probe_grid(
    const std::vector<std::pair<double, double>>& domain, int points_per_dim = 64);

} // namespace qgrow
