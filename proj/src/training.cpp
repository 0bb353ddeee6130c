#include "qgrow/training.hpp"

#include "qgrow/gradients.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qgrow {

namespace {

// splitmix64-style stream derivation so per-epoch and per-event draws
// never collide across seeds
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Dataset make_teacher_dataset(const ReuploaderModel& teacher, int n_train, int n_test,
                             const std::vector<std::pair<double, double>>& domain,
                             double noise_sigma, std::uint64_t seed) {
    if (noise_sigma < 0.0)
        throw std::invalid_argument("make_teacher_dataset: noise_sigma must be >= 0");
    if (int(domain.size()) != teacher.input_dim)
        throw std::invalid_argument("make_teacher_dataset: domain dims != teacher input_dim");
    if (n_train < 1 || n_test < 0)
        throw std::invalid_argument("make_teacher_dataset: bad split sizes");

    std::mt19937_64 rng(seed);
    auto draw_points = [&](int n) {
        std::vector<std::vector<double>> pts(std::size_t(n));
        for (auto& p : pts) {
            p.resize(domain.size());
            for (std::size_t d = 0; d < domain.size(); ++d) {
                p[d] = std::uniform_real_distribution<double>(domain[d].first,
                                                              domain[d].second)(rng);
            }
        }
        return pts;
    };

    Dataset data;
    data.x_train = draw_points(n_train);
    data.x_test = draw_points(n_test);
    data.y_train = batch_forward(teacher, data.x_train);
    data.y_test = batch_forward(teacher, data.x_test);
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (double& y : data.y_train) y += noise(rng);
    }
    return data;
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw std::invalid_argument("mse_loss: mismatched or empty inputs");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - targets[i];
        acc += r * r;
    }
    return acc / double(predictions.size());
}

AdamState AdamState::init(const ReuploaderModel& model, double lr) {
    AdamState state;
    state.lr = lr;
    state.m_theta.assign(model.params.theta.size(), 0.0);
    state.v_theta.assign(model.params.theta.size(), 0.0);
    if (model.params.psi_trainable) {
        state.m_psi.assign(model.params.psi.size(), 0.0);
        state.v_psi.assign(model.params.psi.size(), 0.0);
    }
    return state;
}

void AdamState::extend_for(const ReuploaderModel& model) {
    m_theta.resize(model.params.theta.size(), 0.0);
    v_theta.resize(model.params.theta.size(), 0.0);
    if (model.params.psi_trainable) {
        m_psi.resize(model.params.psi.size(), 0.0);
        v_psi.resize(model.params.psi.size(), 0.0);
    }
}

void adam_update(AdamState& state, ParameterStore& params, const GradientVector& grad) {
    if (grad.theta.size() != params.theta.size() ||
        grad.theta.size() != state.m_theta.size())
        throw std::invalid_argument("adam_update: theta gradient misaligned");
    const bool with_psi = params.psi_trainable && !state.m_psi.empty();
    if (with_psi && (grad.psi.size() != params.psi.size() || grad.psi.size() != state.m_psi.size()))
        throw std::invalid_argument("adam_update: psi gradient misaligned");

    for (double g : grad.theta)
        if (!std::isfinite(g)) throw std::runtime_error("adam_update: non-finite gradient");
    for (double g : grad.psi)
        if (!std::isfinite(g)) throw std::runtime_error("adam_update: non-finite gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));

    auto update = [&](std::vector<double>& values, std::vector<double>& m,
                      std::vector<double>& v, const std::vector<double>& g) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            values[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    };
    update(params.theta, state.m_theta, state.v_theta, grad.theta);
    if (with_psi) update(params.psi, state.m_psi, state.v_psi, grad.psi);
}

namespace {

// shared Algorithm-1 loop; loss_and_gradient supplies the per-epoch
// training objective, test_loss the evaluation metric
TrainReport run_training_loop(
    ReuploaderModel model, const TrainConfig& config,
    const std::function<LossAndGradient(const ReuploaderModel&, int)>& loss_and_gradient,
    const std::function<double(const ReuploaderModel&, int)>& test_loss) {
    const auto t0 = std::chrono::steady_clock::now();

    TrainReport report;
    report.train_loss.reserve(std::size_t(config.epochs));
    report.test_loss.reserve(std::size_t(config.epochs));
    report.fm_blocks_per_epoch.reserve(std::size_t(config.epochs));

    AdamState adam = AdamState::init(model, config.lr);
    int plateau_window_start = 0;
    int grow_events = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        try {
            const LossAndGradient lg = loss_and_gradient(model, epoch);
            report.train_loss.push_back(lg.loss);
            adam_update(adam, model.params, lg.grad);
            report.test_loss.push_back(test_loss ? test_loss(model, epoch) : lg.loss);
            report.fm_blocks_per_epoch.push_back(model.feature_map_block_count());

            if (config.grow_enabled) {
                const std::span<const double> window(
                    report.test_loss.data() + plateau_window_start,
                    report.test_loss.size() - std::size_t(plateau_window_start));
                if (should_grow(config.growth, epoch, window,
                                model.feature_map_block_count())) {
                    auto [grown, event] = grow(model, config.growth,
                                               mix_seed(config.seed, 0x67726f77ULL + grow_events),
                                               epoch);
                    model = std::move(grown);
                    adam.extend_for(model);
                    report.growth_events.push_back(std::move(event));
                    plateau_window_start = int(report.test_loss.size());
                    ++grow_events;
                }
            }
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }

    auto best_it = std::min_element(report.test_loss.begin(), report.test_loss.end());
    report.best_test_loss = *best_it;
    report.best_epoch = int(best_it - report.test_loss.begin()) + 1;
    report.final_model = std::move(model);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace

TrainReport train_regression(ReuploaderModel model, const Dataset& data,
                             const TrainConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("train_regression: epochs must be >= 1");
    if (data.x_train.empty() || data.x_test.empty())
        throw std::invalid_argument("train_regression: empty dataset");

    return run_training_loop(
        std::move(model), config,
        [&data](const ReuploaderModel& m, int) {
            return mse_loss_gradient(m, data.x_train, data.y_train);
        },
        [&data](const ReuploaderModel& m, int) {
            const auto preds = batch_forward(m, data.x_test);
            return mse_loss(preds, data.y_test);
        });
}

// ---- Laplace ----

double laplace_boundary_value(double x, double y) {
    if (x == 0.0) return std::sin(std::numbers::pi * y);
    return 0.0;
}

double laplace_exact_solution(double x, double y) {
    return std::exp(-std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

double laplace_residual(const ReuploaderModel& model, const std::vector<double>& point) {
    if (model.input_dim != 2)
        throw std::invalid_argument("laplace_residual: model must take 2 inputs");
    return input_derivative(model, point, {0, 2}) + input_derivative(model, point, {1, 2});
}

LaplaceSample sample_laplace_points(const LaplaceProblem& problem, std::uint64_t seed,
                                    int epoch) {
    std::mt19937_64 rng(mix_seed(seed, 0x6c61706cULL + std::uint64_t(epoch)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    LaplaceSample sample;
    sample.interior.reserve(std::size_t(problem.n_collocation));
    for (int i = 0; i < problem.n_collocation; ++i) {
        const double x = unit(rng);
        const double y = unit(rng);
        sample.interior.push_back({x, y});
    }
    sample.boundary.reserve(std::size_t(problem.n_boundary));
    sample.boundary_targets.reserve(std::size_t(problem.n_boundary));
    for (int i = 0; i < problem.n_boundary; ++i) {
        const double t = std::uniform_real_distribution<double>(0.0, 4.0)(rng);
        const int edge = std::min(3, int(t));
        const double c = t - edge;
        double x = 0.0, y = 0.0;
        switch (edge) {
        case 0: x = 0.0; y = c; break;
        case 1: x = c; y = 0.0; break;
        case 2: x = 1.0; y = c; break;
        default: x = c; y = 1.0; break;
        }
        sample.boundary.push_back({x, y});
        sample.boundary_targets.push_back(laplace_boundary_value(x, y));
    }
    return sample;
}

double laplace_loss(const ReuploaderModel& model, const LaplaceProblem& problem,
                    std::uint64_t seed, int epoch) {
    const LaplaceSample sample = sample_laplace_points(problem, seed, epoch);
    double loss = 0.0;
    if (!sample.interior.empty()) {
        double acc = 0.0;
        for (const auto& p : sample.interior) {
            const double r = laplace_residual(model, p);
            acc += r * r;
        }
        loss += acc / double(sample.interior.size());
    }
    if (!sample.boundary.empty()) {
        const auto values = batch_forward(model, sample.boundary);
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double e = values[i] - sample.boundary_targets[i];
            acc += e * e;
        }
        loss += acc / double(values.size());
    }
    return loss;
}

double laplace_loss(const Field& field, const LaplaceProblem& problem, std::uint64_t seed,
                    int epoch) {
    const LaplaceSample sample = sample_laplace_points(problem, seed, epoch);
    double loss = 0.0;
    if (!sample.interior.empty()) {
        double acc = 0.0;
        for (const auto& p : sample.interior) {
            const double r = field.laplacian(p[0], p[1]);
            acc += r * r;
        }
        loss += acc / double(sample.interior.size());
    }
    if (!sample.boundary.empty()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < sample.boundary.size(); ++i) {
            const double e = field.value(sample.boundary[i][0], sample.boundary[i][1]) -
                             sample.boundary_targets[i];
            acc += e * e;
        }
        loss += acc / double(sample.boundary.size());
    }
    return loss;
}

namespace {

double l2_relative_error_impl(const std::function<double(double, double)>& value,
                              int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("l2_relative_error: grid_size must be >= 2");
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double x = double(i) / (grid_size - 1);
        for (int j = 0; j < grid_size; ++j) {
            const double y = double(j) / (grid_size - 1);
            const double exact = laplace_exact_solution(x, y);
            const double diff = value(x, y) - exact;
            num += diff * diff;
            den += exact * exact;
        }
    }
    return std::sqrt(num) / std::sqrt(den);
}

} // namespace

double l2_relative_error(const ReuploaderModel& model, int grid_size) {
    if (model.input_dim != 2)
        throw std::invalid_argument("l2_relative_error: model must take 2 inputs");
    if (grid_size < 2) throw std::invalid_argument("l2_relative_error: grid_size must be >= 2");
    // evaluate row-by-row through the batch kernel
    std::vector<std::vector<double>> points;
    points.reserve(std::size_t(grid_size) * std::size_t(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        const double x = double(i) / (grid_size - 1);
        for (int j = 0; j < grid_size; ++j) {
            const double y = double(j) / (grid_size - 1);
            points.push_back({x, y});
        }
    }
    const auto values = batch_forward(model, points);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double exact = laplace_exact_solution(points[k][0], points[k][1]);
        const double diff = values[k] - exact;
        num += diff * diff;
        den += exact * exact;
    }
    return std::sqrt(num) / std::sqrt(den);
}

double l2_relative_error(const Field& field, int grid_size) {
    return l2_relative_error_impl(field.value, grid_size);
}

TrainReport train_laplace(ReuploaderModel model, const LaplaceProblem& problem,
                          const TrainConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("train_laplace: epochs must be >= 1");
    if (model.input_dim != 2)
        throw std::invalid_argument("train_laplace: model must take 2 inputs");

    const std::uint64_t seed = config.seed;
    // no held-out set: the objective doubles as the tracked metric
    TrainReport report = run_training_loop(
        std::move(model), config,
        [&problem, seed](const ReuploaderModel& m, int epoch) {
            const LaplaceSample sample = sample_laplace_points(problem, seed, epoch);
            return laplace_loss_gradient(m, sample.interior, sample.boundary,
                                         sample.boundary_targets);
        },
        nullptr);

    report.final_l2_relative_error = l2_relative_error(report.final_model, problem.eval_grid);
    return report;
}

SweepSummary summarize_sweep(const std::vector<std::uint64_t>& seeds,
                             const std::vector<double>& per_seed_best,
                             const std::vector<std::string>& errors) {
    if (seeds.size() != per_seed_best.size() || seeds.size() != errors.size())
        throw std::invalid_argument("summarize_sweep: misaligned inputs");
    SweepSummary summary;
    summary.seeds = seeds;
    summary.per_seed_best = per_seed_best;
    summary.errors = errors;

    std::vector<double> ok;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (errors[i].empty() && std::isfinite(per_seed_best[i])) {
            ok.push_back(per_seed_best[i]);
        } else {
            ++summary.warning_count;
        }
    }
    if (ok.empty()) {
        summary.mean = summary.std_error = summary.best = summary.worst =
            std::numeric_limits<double>::quiet_NaN();
        return summary;
    }
    double sum = 0.0;
    for (double v : ok) sum += v;
    summary.mean = sum / double(ok.size());
    summary.best = *std::min_element(ok.begin(), ok.end());
    summary.worst = *std::max_element(ok.begin(), ok.end());
    if (ok.size() > 1) {
        double ss = 0.0;
        for (double v : ok) ss += (v - summary.mean) * (v - summary.mean);
        const double stddev = std::sqrt(ss / double(ok.size() - 1));
        summary.std_error = stddev / std::sqrt(double(ok.size()));
    }
    return summary;
}

} // namespace qgrow
