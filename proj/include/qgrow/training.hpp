#pragma once

#include "qgrow/batch.hpp"
#include "qgrow/growth.hpp"
#include "qgrow/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qgrow {

struct Dataset {
    std::vector<std::vector<double>> x_train;
    std::vector<double> y_train;
    std::vector<std::vector<double>> x_test;
    std::vector<double> y_test;
};

/// Inputs drawn uniformly over the domain (one interval per input dim);
/// train targets get Normal(0, sigma) noise when sigma > 0, test targets
/// stay noise-free and serve as the generalization reference.
/// Deterministic per seed. Throws std::invalid_argument for sigma < 0.
Dataset make_teacher_dataset(const ReuploaderModel& teacher, int n_train, int n_test,
                             const std::vector<std::pair<double, double>>& domain,
                             double noise_sigma, std::uint64_t seed);

/// Mean of squared residuals. Throws std::invalid_argument on length
/// mismatch or empty input.
double mse_loss(std::span<const double> predictions, std::span<const double> targets);

/// Bias-corrected Adam with moments split by parameter class, so a grow
/// event can append zero-initialized entries without disturbing existing
/// slots. The step count is global (bias correction for late-added slots
/// continues from the current step).
struct AdamState {
    double lr = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<double> m_theta, v_theta;
    std::vector<double> m_psi, v_psi;

    static AdamState init(const ReuploaderModel& model, double lr);
    /// Zero-append moment entries for slots added by growth.
    void extend_for(const ReuploaderModel& model);
};

/// One in-place Adam step on the trainable slots. Throws
/// std::invalid_argument on misaligned sizes and std::runtime_error on
/// non-finite gradients.
void adam_update(AdamState& state, ParameterStore& params, const GradientVector& grad);

struct TrainConfig {
    int epochs = 1000;
    double lr = 0.1;
    std::uint64_t seed = 0;
    bool grow_enabled = false; // complete-depth learning when false
    GrowthSchedule growth;
};

struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> test_loss;
    std::vector<int> fm_blocks_per_epoch;
    std::vector<GrowthEvent> growth_events;
    double best_test_loss = 0.0;
    int best_epoch = 0; // 1-based
    double final_l2_relative_error = -1.0; // Laplace runs only
    ReuploaderModel final_model;
    double wall_time_seconds = 0.0;
};

/// One forward/loss/update/evaluate cycle per epoch with the growth check
/// after evaluation; optimizer moments of pre-existing slots survive
/// every grow event untouched. Numeric failures rethrow with epoch
/// context.
TrainReport train_regression(ReuploaderModel model, const Dataset& data,
                             const TrainConfig& config);

// ---- 2D Laplace problem on the unit square ----
// Dirichlet data: u(0,y) = sin(pi y), u(x,0) = u(1,y) = u(x,1) = 0.

struct LaplaceProblem {
    int n_collocation = 250;
    int n_boundary = 250;
    int eval_grid = 250;
};

/// Scalar field with an analytic Laplacian; lets the loss and error
/// pipelines run on closed-form surrogates as well as circuit models.
struct Field {
    std::function<double(double, double)> value;
    std::function<double(double, double)> laplacian;
};

double laplace_boundary_value(double x, double y);
double laplace_exact_solution(double x, double y); // e^{-pi x} sin(pi y)

/// d2u/dx2 + d2u/dy2 at one point, via the second input derivatives.
double laplace_residual(const ReuploaderModel& model, const std::vector<double>& point);

struct LaplaceSample {
    std::vector<std::vector<double>> interior;
    std::vector<std::vector<double>> boundary;
    std::vector<double> boundary_targets;
};
/// Fresh uniform collocation and boundary points, deterministic per
/// (seed, epoch).
LaplaceSample sample_laplace_points(const LaplaceProblem& problem, std::uint64_t seed,
                                    int epoch);

/// Mean squared PDE residual over fresh interior points plus mean squared
/// boundary mismatch (weight 1 each).
double laplace_loss(const ReuploaderModel& model, const LaplaceProblem& problem,
                    std::uint64_t seed, int epoch);
double laplace_loss(const Field& field, const LaplaceProblem& problem, std::uint64_t seed,
                    int epoch);

/// ||u - u_exact||_2 / ||u_exact||_2 over a uniform grid_size x grid_size
/// grid on [0,1]^2 (endpoints included).
double l2_relative_error(const ReuploaderModel& model, int grid_size);
double l2_relative_error(const Field& field, int grid_size);

/// Physics-informed training: resamples the loss points every epoch; the
/// recorded per-epoch loss is the training objective (no test set exists,
/// the test column mirrors it) and the final L2 relative error against
/// the exact solution is evaluated once at the end.
TrainReport train_laplace(ReuploaderModel model, const LaplaceProblem& problem,
                          const TrainConfig& config);

// ---- sweep statistics ----

struct SweepSummary {
    std::vector<std::uint64_t> seeds;
    std::vector<double> per_seed_best;   // NaN for failed seeds
    std::vector<std::string> errors;     // empty string for successes
    double mean = 0.0;
    double std_error = 0.0; // sample stddev / sqrt(n)
    double best = 0.0;
    double worst = 0.0;
    int warning_count = 0; // failed seeds excluded from the stats
};

SweepSummary summarize_sweep(const std::vector<std::uint64_t>& seeds,
                             const std::vector<double>& per_seed_best,
                             const std::vector<std::string>& errors);

} // namespace qgrow
