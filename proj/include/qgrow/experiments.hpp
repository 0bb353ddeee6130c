#pragma once

#include "qgrow/training.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qgrow {

enum class Experiment { STUDENT_TEACHER_1Q, STUDENT_TEACHER_2Q, NOISY_ST, LAPLACE, SPECTRUM };

/// The seven trained-model labels from the regression studies. "matched"
/// CDL depth equals the growth target, "deep" exceeds it.
enum class Variant {
    BLOCK_GROWTH,
    SEQ_FM,
    INT_FM,
    CDL_RAND_MATCHED,
    CDL_RAND_DEEP,
    CDL_ID_MATCHED,
    CDL_ID_DEEP,
};

std::string experiment_name(Experiment e);
std::string variant_name(Variant v);
Experiment experiment_from_name(const std::string& name); // throws with choices listed
Variant variant_from_name(const std::string& name);       // throws with choices listed

struct ExperimentConfig {
    int schema_version = 1;
    Experiment experiment = Experiment::STUDENT_TEACHER_1Q;
    Variant variant = Variant::BLOCK_GROWTH;
    std::vector<std::uint64_t> seeds;
    int epochs = 1000;
    double lr = 0.1;
    int blocks_per_event = 1;
    int growth_interval = 0; // 0 resolves to epochs / (growth events + 1)
    GrowthTrigger trigger = GrowthTrigger::FIXED_INTERVAL;
    int patience = 50;
    double min_improvement = 1e-3;
    int target_layers = 5;     // matched CDL depth and fixed-interval growth target
    int deep_layers = 20;      // deep CDL depth
    int max_growth_layers = 0; // growth ceiling; 0 resolves to target_layers
    int n_train = 500;
    int n_test = 500;
    double noise_sigma = 0.0;
    std::uint64_t teacher_seed = 1234;
    LaplaceProblem laplace;
    int jobs = 1;
    std::string out_dir = "out";
};

/// Preset defaults for each experiment (seed count, epochs, learning
/// rate, depths, data sizes).
ExperimentConfig default_config(Experiment experiment);

/// Resolved growth interval (auto rule when growth_interval == 0).
int resolved_growth_interval(const ExperimentConfig& config);

/// Number of feature-map blocks the variant's model starts with.
int initial_fm_blocks(const ExperimentConfig& config);

/// Teacher circuit for the student-teacher experiments, drawn from the
/// experiment's published ranges with the teacher seed.
ReuploaderModel build_teacher(const ExperimentConfig& config);

/// Dataset shared by every seed of the sweep (the per-run seed only
/// controls the student).
Dataset build_dataset(const ExperimentConfig& config);

/// Student model + training config for one sweep seed.
struct PreparedRun {
    ReuploaderModel model;
    TrainConfig train;
};
PreparedRun prepare_run(const ExperimentConfig& config, std::uint64_t seed);

/// Full single-seed run (regression or Laplace per the experiment).
TrainReport run_single_seed(const ExperimentConfig& config, std::uint64_t seed);

struct SweepResult {
    std::vector<TrainReport> reports; // empty report for failed seeds
    SweepSummary summary;
};

/// Runs every seed (config.jobs in parallel), collects per-seed best
/// losses, and aggregates them. Failed seeds are recorded and excluded
/// from the statistics. The result does not depend on execution order.
SweepResult seed_sweep(const ExperimentConfig& config);
SweepResult seed_sweep(const ExperimentConfig& config,
                       const std::vector<std::uint64_t>& seeds);

/// The identity-pair-initialized student models of the preset catalog
/// (used by the constant-output property check).
std::vector<ReuploaderModel> identity_preset_models(std::uint64_t seed);

} // namespace qgrow
