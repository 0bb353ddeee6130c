#pragma once

#include "qgrow/gradients.hpp"
#include "qgrow/model.hpp"

#include <vector>

namespace qgrow {

struct LossAndGradient {
    double loss = 0.0;
    GradientVector grad;
};

/// Batch kernels used by the training loops. Evaluations run in parallel
/// (OpenMP, one point per slot), reductions run serially in point order,
/// so results are bit-identical for every thread count.

std::vector<double> batch_forward(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& points);

/// Mean squared error over the batch and its gradient with respect to
/// every trainable slot: grad = (2/N) sum_i (f(x_i) - y_i) * grad f(x_i).
LossAndGradient mse_loss_gradient(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& xs,
                                  const std::vector<double>& ys);

/// PDE residual at one interior point, sum over both input dims of the
/// second input derivative, plus its parameter gradient (including the
/// product-rule terms through the trainable frequency scales).
struct ResidualAndGradient {
    double residual = 0.0;
    GradientVector grad;
};
ResidualAndGradient laplace_residual_gradient(const ReuploaderModel& model,
                                              const std::vector<double>& point);

/// Mean squared PDE residual over the interior points plus mean squared
/// boundary mismatch (weight 1 each), with the full parameter gradient.
LossAndGradient laplace_loss_gradient(const ReuploaderModel& model,
                                      const std::vector<std::vector<double>>& interior,
                                      const std::vector<std::vector<double>>& boundary,
                                      const std::vector<double>& boundary_targets);

// Serial reference kernels for tests and the benchmark. batch_forward and
// mse_loss_gradient walk the literal shift rule through whole-circuit
// re-evaluation; laplace_loss_gradient differentiates the exactly
// evaluated loss by central finite differences (h) instead of shifts,
// giving an independent oracle for the production path.
namespace reference {

std::vector<double> batch_forward(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& points);
LossAndGradient mse_loss_gradient(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& xs,
                                  const std::vector<double>& ys);
double laplace_loss(const ReuploaderModel& model,
                    const std::vector<std::vector<double>>& interior,
                    const std::vector<std::vector<double>>& boundary,
                    const std::vector<double>& boundary_targets);
LossAndGradient laplace_loss_gradient(const ReuploaderModel& model,
                                      const std::vector<std::vector<double>>& interior,
                                      const std::vector<std::vector<double>>& boundary,
                                      const std::vector<double>& boundary_targets,
                                      double h = 1e-5);

} // namespace reference

} // namespace qgrow
