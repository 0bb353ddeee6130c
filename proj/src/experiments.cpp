#include "qgrow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace qgrow {

namespace {
constexpr double kPi = std::numbers::pi;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

std::string experiment_name(Experiment e) {
    switch (e) {
    case Experiment::STUDENT_TEACHER_1Q: return "STUDENT_TEACHER_1Q";
    case Experiment::STUDENT_TEACHER_2Q: return "STUDENT_TEACHER_2Q";
    case Experiment::NOISY_ST: return "NOISY_ST";
    case Experiment::LAPLACE: return "LAPLACE";
    default: return "SPECTRUM";
    }
}

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::BLOCK_GROWTH: return "block-growth";
    case Variant::SEQ_FM: return "seq-fm";
    case Variant::INT_FM: return "int-fm";
    case Variant::CDL_RAND_MATCHED: return "cdl-rand-matched";
    case Variant::CDL_RAND_DEEP: return "cdl-rand-deep";
    case Variant::CDL_ID_MATCHED: return "cdl-id-matched";
    default: return "cdl-id-deep";
    }
}

Experiment experiment_from_name(const std::string& name) {
    for (Experiment e : {Experiment::STUDENT_TEACHER_1Q, Experiment::STUDENT_TEACHER_2Q,
                         Experiment::NOISY_ST, Experiment::LAPLACE, Experiment::SPECTRUM}) {
        if (experiment_name(e) == name) return e;
    }
    throw std::invalid_argument(
        "unknown experiment '" + name +
        "'; choices: STUDENT_TEACHER_1Q, STUDENT_TEACHER_2Q, NOISY_ST, LAPLACE, SPECTRUM");
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::BLOCK_GROWTH, Variant::SEQ_FM, Variant::INT_FM,
                      Variant::CDL_RAND_MATCHED, Variant::CDL_RAND_DEEP,
                      Variant::CDL_ID_MATCHED, Variant::CDL_ID_DEEP}) {
        if (variant_name(v) == name) return v;
    }
    throw std::invalid_argument(
        "unknown variant '" + name +
        "'; choices: block-growth, seq-fm, int-fm, cdl-rand-matched, cdl-rand-deep, "
        "cdl-id-matched, cdl-id-deep");
}

ExperimentConfig default_config(Experiment experiment) {
    ExperimentConfig config;
    config.experiment = experiment;
    config.seeds.resize(50);
    for (std::size_t i = 0; i < config.seeds.size(); ++i) config.seeds[i] = i;

    switch (experiment) {
    case Experiment::STUDENT_TEACHER_1Q:
        break;
    case Experiment::STUDENT_TEACHER_2Q:
        config.deep_layers = 9;
        break;
    case Experiment::NOISY_ST:
        config.n_train = 20;
        config.n_test = 80;
        config.noise_sigma = 0.5;
        config.trigger = GrowthTrigger::PLATEAU;
        config.variant = Variant::BLOCK_GROWTH;
        config.deep_layers = 20;
        config.max_growth_layers = 20; // plateau growth may run up to the deep ceiling
        break;
    case Experiment::LAPLACE:
        config.epochs = 2000;
        config.lr = 0.02;
        config.target_layers = 9;
        config.deep_layers = 9;
        config.variant = Variant::BLOCK_GROWTH;
        break;
    case Experiment::SPECTRUM:
        break;
    }
    return config;
}

namespace {

bool is_growth_variant(Variant v) {
    return v == Variant::BLOCK_GROWTH || v == Variant::SEQ_FM || v == Variant::INT_FM;
}

int laplace_initial_layers(const ExperimentConfig&) { return 5; }

void validate_variant(const ExperimentConfig& config) {
    if (config.experiment == Experiment::LAPLACE &&
        (config.variant == Variant::CDL_RAND_MATCHED ||
         config.variant == Variant::CDL_RAND_DEEP)) {
        throw std::invalid_argument(
            "variant '" + variant_name(config.variant) +
            "' is not defined for LAPLACE; choices: block-growth, seq-fm, int-fm, "
            "cdl-id-matched, cdl-id-deep");
    }
}

} // namespace

int initial_fm_blocks(const ExperimentConfig& config) {
    if (!is_growth_variant(config.variant)) {
        const bool deep = config.variant == Variant::CDL_RAND_DEEP ||
                          config.variant == Variant::CDL_ID_DEEP;
        return deep ? config.deep_layers : config.target_layers;
    }
    if (config.experiment == Experiment::LAPLACE) return laplace_initial_layers(config);
    return 1;
}

static int growth_ceiling(const ExperimentConfig& config) {
    return config.max_growth_layers > 0 ? config.max_growth_layers : config.target_layers;
}

int resolved_growth_interval(const ExperimentConfig& config) {
    if (config.growth_interval > 0) return config.growth_interval;
    const int events = std::max(1, config.target_layers - initial_fm_blocks(config));
    return std::max(1, config.epochs / (events + 1));
}

ReuploaderModel build_teacher(const ExperimentConfig& config) {
    const bool two_q = config.experiment == Experiment::STUDENT_TEACHER_2Q;
    const int nq = two_q ? 2 : 1;
    const InitSpec init = two_q ? InitSpec::random(0.0, kPi / 5.0)
                                : InitSpec::random(0.0, 0.1, 0.0, kPi / 9.0);
    return build_reuploader(student_teacher_layout(nq, 5), init, config.teacher_seed);
}

Dataset build_dataset(const ExperimentConfig& config) {
    const ReuploaderModel teacher = build_teacher(config);
    std::vector<std::pair<double, double>> domain(std::size_t(teacher.input_dim),
                                                  {0.0, 2.0 * kPi});
    return make_teacher_dataset(teacher, config.n_train, config.n_test, domain,
                                config.noise_sigma, mix(config.teacher_seed, 0x64617461ULL));
}

namespace {

// gaps the strategy fills first, used to place the initial feature maps
std::vector<int> initial_gaps(Variant variant, int n_gaps, int count) {
    std::vector<int> order;
    if (variant == Variant::INT_FM) {
        order = middle_out_order(n_gaps);
    } else {
        order.resize(std::size_t(n_gaps));
        for (int i = 0; i < n_gaps; ++i) order[std::size_t(i)] = i;
    }
    order.resize(std::size_t(std::min(count, n_gaps)));
    return order;
}

} // namespace

PreparedRun prepare_run(const ExperimentConfig& config, std::uint64_t seed) {
    validate_variant(config);
    const bool laplace = config.experiment == Experiment::LAPLACE;
    const int nq = config.experiment == Experiment::STUDENT_TEACHER_2Q || laplace ? 2 : 1;
    const int initial = initial_fm_blocks(config);

    LayoutSpec layout;
    if (is_growth_variant(config.variant) && config.variant != Variant::BLOCK_GROWTH) {
        // sequential / interleave: the full ansatz stack is present from the
        // start, feature maps occupy the first gaps of the strategy's order
        const int n_ansatz = growth_ceiling(config) + 1;
        const auto gaps = initial_gaps(config.variant, n_ansatz - 1, initial);
        layout = laplace ? gapped_laplace_layout(n_ansatz, gaps)
                         : gapped_student_teacher_layout(nq, n_ansatz, gaps);
    } else {
        layout = laplace ? laplace_layout(initial) : student_teacher_layout(nq, initial);
    }

    const bool random_init = config.variant == Variant::CDL_RAND_MATCHED ||
                             config.variant == Variant::CDL_RAND_DEEP;
    const InitSpec init = random_init ? InitSpec::random(0.0, kPi) : default_identity_init();

    PreparedRun run;
    run.model = build_reuploader(layout, init, seed);

    run.train.epochs = config.epochs;
    run.train.lr = config.lr;
    run.train.seed = seed;
    run.train.grow_enabled = is_growth_variant(config.variant);
    if (run.train.grow_enabled) {
        GrowthSchedule& schedule = run.train.growth;
        schedule.strategy = config.variant == Variant::BLOCK_GROWTH ? GrowthKind::BLOCK
                           : config.variant == Variant::SEQ_FM      ? GrowthKind::SEQ_FM
                                                                    : GrowthKind::INT_FM;
        schedule.trigger = config.trigger;
        schedule.interval_epochs = resolved_growth_interval(config);
        schedule.patience = config.patience;
        schedule.min_improvement = config.min_improvement;
        schedule.blocks_per_event = config.blocks_per_event;
        schedule.max_feature_map_blocks = growth_ceiling(config);
        if (laplace) {
            schedule.fm_template = gapped_laplace_layout(2, {0}).blocks[1];
            schedule.ansatz_template = gapped_laplace_layout(2, {0}).blocks[0];
            schedule.probe_domain.assign(2, {0.0, 1.0});
        } else {
            LayoutSpec family = student_teacher_layout(nq, 1);
            schedule.ansatz_template = family.blocks[0];
            schedule.fm_template = family.blocks[1];
            schedule.probe_domain.assign(std::size_t(nq), {0.0, 2.0 * kPi});
        }
    }
    return run;
}

TrainReport run_single_seed(const ExperimentConfig& config, std::uint64_t seed) {
    PreparedRun run = prepare_run(config, seed);
    if (config.experiment == Experiment::LAPLACE) {
        return train_laplace(std::move(run.model), config.laplace, run.train);
    }
    const Dataset data = build_dataset(config);
    return train_regression(std::move(run.model), data, run.train);
}

SweepResult seed_sweep(const ExperimentConfig& config) {
    return seed_sweep(config, config.seeds);
}

SweepResult seed_sweep(const ExperimentConfig& config,
                       const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("seed_sweep: no seeds");
    const std::size_t n = seeds.size();

    SweepResult result;
    result.reports.resize(n);
    std::vector<double> bests(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> errors(n);

    // regression sweeps share one dataset; build it once outside the loop
    Dataset shared_data;
    const bool laplace = config.experiment == Experiment::LAPLACE;
    if (!laplace) shared_data = build_dataset(config);

    const int jobs = std::max(1, config.jobs);
#if defined(_OPENMP)
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1) if (jobs > 1)
#endif
    for (long i = 0; i < long(n); ++i) {
        const std::size_t u = std::size_t(i);
        try {
            PreparedRun run = prepare_run(config, seeds[u]);
            TrainReport report =
                laplace ? train_laplace(std::move(run.model), config.laplace, run.train)
                        : train_regression(std::move(run.model), shared_data, run.train);
            bests[u] = report.best_test_loss;
            result.reports[u] = std::move(report);
        } catch (const std::exception& e) {
            errors[u] = e.what();
        }
    }

    result.summary = summarize_sweep(seeds, bests, errors);
    return result;
}

std::vector<ReuploaderModel> identity_preset_models(std::uint64_t seed) {
    std::vector<ReuploaderModel> models;
    for (Experiment e : {Experiment::STUDENT_TEACHER_1Q, Experiment::STUDENT_TEACHER_2Q,
                         Experiment::NOISY_ST, Experiment::LAPLACE}) {
        ExperimentConfig config = default_config(e);
        for (Variant v : {Variant::BLOCK_GROWTH, Variant::SEQ_FM, Variant::INT_FM,
                          Variant::CDL_ID_MATCHED, Variant::CDL_ID_DEEP}) {
            config.variant = v;
            models.push_back(prepare_run(config, seed).model);
        }
    }
    return models;
}

} // namespace qgrow
