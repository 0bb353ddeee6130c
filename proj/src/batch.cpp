#include "qgrow/batch.hpp"

#include "qgrow/engine.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qgrow {

std::vector<double> batch_forward(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& points) {
    std::vector<double> out(points.size(), 0.0);
#pragma omp parallel
    {
        engine::Workspace ws;
#pragma omp for schedule(static)
        for (long i = 0; i < long(points.size()); ++i) {
            out[std::size_t(i)] =
                engine::run_forward(engine::flatten(model, points[std::size_t(i)]), ws);
        }
    }
    return out;
}

LossAndGradient mse_loss_gradient(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& xs,
                                  const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("mse_loss_gradient: mismatched or empty batch");
    const std::size_t n = xs.size();
    const std::size_t n_theta = model.params.theta.size();
    const std::size_t n_psi = model.params.psi_trainable ? model.params.psi.size() : 0;

    std::vector<double> residuals(n, 0.0);
    std::vector<double> point_theta(n * n_theta, 0.0);
    std::vector<double> point_psi(n * n_psi, 0.0);

#pragma omp parallel
    {
        engine::Workspace ws;
#pragma omp for schedule(static)
        for (long i = 0; i < long(n); ++i) {
            const std::size_t u = std::size_t(i);
            engine::FlatCircuit flat = engine::flatten(model, xs[u]);
            const double value = engine::run_gradient(flat, {}, ws);
            residuals[u] = value - ys[u];
            engine::accumulate_slot_gradient(
                flat, ws.dangle, 1.0,
                std::span<double>(point_theta.data() + u * n_theta, n_theta),
                std::span<double>(point_psi.data() + u * n_psi, n_psi));
        }
    }

    // fixed-order reduction
    LossAndGradient out;
    out.grad.theta.assign(n_theta, 0.0);
    out.grad.psi.assign(n_psi, 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = residuals[i];
        loss += r * r;
        const double w = 2.0 * r / double(n);
        for (std::size_t t = 0; t < n_theta; ++t)
            out.grad.theta[t] += w * point_theta[i * n_theta + t];
        for (std::size_t s = 0; s < n_psi; ++s)
            out.grad.psi[s] += w * point_psi[i * n_psi + s];
    }
    out.loss = loss / double(n);
    return out;
}

namespace {

// residual + gradient via combo-shifted adjoint sweeps; theta/psi spans
// must be zero-initialized by the caller
double residual_gradient_into(const ReuploaderModel& model, const std::vector<double>& point,
                              engine::Workspace& ws, std::span<double> theta_acc,
                              std::span<double> psi_acc) {
    engine::FlatCircuit flat = engine::flatten(model, point);
    constexpr double half_pi = std::numbers::pi / 2.0;
    constexpr double pi = std::numbers::pi;

    const double f0 = engine::run_gradient(flat, {}, ws);
    std::vector<double> dangle0 = ws.dangle;

    // base term weight: all diagonal -2*f0*s^2/4 contributions
    double w0 = 0.0;
    for (const auto& group : flat.enc_groups) {
        for (int g : group) {
            const double s = flat.gates[g].enc_scale;
            w0 += -0.5 * s * s;
        }
    }

    double residual = w0 * f0;
    engine::accumulate_slot_gradient(flat, dangle0, w0, theta_acc, psi_acc);

    // per fused group: dresidual/dscale, for the product-rule psi terms
    std::vector<double> dr_dscale(flat.gates.size(), 0.0);

    for (const auto& group : flat.enc_groups) {
        for (std::size_t j = 0; j < group.size(); ++j) {
            const int gj = group[j];
            const double sj = flat.gates[gj].enc_scale;

            engine::AngleShift plus{gj, pi};
            const double fp = engine::run_gradient(flat, std::span(&plus, 1), ws);
            residual += 0.25 * sj * sj * fp;
            engine::accumulate_slot_gradient(flat, ws.dangle, 0.25 * sj * sj, theta_acc, psi_acc);
            engine::AngleShift minus{gj, -pi};
            const double fm = engine::run_gradient(flat, std::span(&minus, 1), ws);
            residual += 0.25 * sj * sj * fm;
            engine::accumulate_slot_gradient(flat, ws.dangle, 0.25 * sj * sj, theta_acc, psi_acc);

            dr_dscale[std::size_t(gj)] += 2.0 * sj * 0.25 * (fp + fm - 2.0 * f0);

            for (std::size_t k = j + 1; k < group.size(); ++k) {
                const int gk = group[k];
                const double sk = flat.gates[gk].enc_scale;
                double combo_sum = 0.0; // sum of sign * f over the 4 sign combos
                for (int sgn_j : {+1, -1}) {
                    for (int sgn_k : {+1, -1}) {
                        engine::AngleShift shifts[2] = {{gj, sgn_j * half_pi},
                                                        {gk, sgn_k * half_pi}};
                        const double sign = sgn_j * sgn_k > 0 ? 1.0 : -1.0;
                        const double f = engine::run_gradient(flat, std::span(shifts, 2), ws);
                        combo_sum += sign * f;
                        engine::accumulate_slot_gradient(flat, ws.dangle, sign * 0.5 * sj * sk,
                                                         theta_acc, psi_acc);
                    }
                }
                residual += 0.5 * sj * sk * combo_sum;
                dr_dscale[std::size_t(gj)] += 0.5 * sk * combo_sum;
                dr_dscale[std::size_t(gk)] += 0.5 * sj * combo_sum;
            }
        }
    }

    if (!psi_acc.empty()) {
        for (const auto& group : flat.enc_groups) {
            for (int g : group) {
                const double d = dr_dscale[std::size_t(g)];
                if (d == 0.0) continue;
                for (const auto& ref : flat.gates[g].slots) psi_acc[ref.slot] += d;
            }
        }
    }
    return residual;
}

} // namespace

ResidualAndGradient laplace_residual_gradient(const ReuploaderModel& model,
                                              const std::vector<double>& point) {
    if (model.input_dim != 2)
        throw std::invalid_argument("laplace_residual_gradient: model must take 2 inputs");
    ResidualAndGradient out;
    out.grad.theta.assign(model.params.theta.size(), 0.0);
    out.grad.psi.assign(model.params.psi_trainable ? model.params.psi.size() : 0, 0.0);
    engine::Workspace ws;
    out.residual = residual_gradient_into(model, point, ws, out.grad.theta, out.grad.psi);
    return out;
}

LossAndGradient laplace_loss_gradient(const ReuploaderModel& model,
                                      const std::vector<std::vector<double>>& interior,
                                      const std::vector<std::vector<double>>& boundary,
                                      const std::vector<double>& boundary_targets) {
    if (model.input_dim != 2)
        throw std::invalid_argument("laplace_loss_gradient: model must take 2 inputs");
    if (boundary.size() != boundary_targets.size())
        throw std::invalid_argument("laplace_loss_gradient: boundary size mismatch");
    const std::size_t nc = interior.size();
    const std::size_t nb = boundary.size();
    const std::size_t n_theta = model.params.theta.size();
    const std::size_t n_psi = model.params.psi_trainable ? model.params.psi.size() : 0;

    std::vector<double> residuals(nc, 0.0);
    std::vector<double> r_theta(nc * n_theta, 0.0);
    std::vector<double> r_psi(nc * n_psi, 0.0);
    std::vector<double> berr(nb, 0.0);
    std::vector<double> b_theta(nb * n_theta, 0.0);
    std::vector<double> b_psi(nb * n_psi, 0.0);

#pragma omp parallel
    {
        engine::Workspace ws;
#pragma omp for schedule(dynamic, 4) nowait
        for (long i = 0; i < long(nc); ++i) {
            const std::size_t u = std::size_t(i);
            residuals[u] = residual_gradient_into(
                model, interior[u], ws,
                std::span<double>(r_theta.data() + u * n_theta, n_theta),
                std::span<double>(r_psi.data() + u * n_psi, n_psi));
        }
#pragma omp for schedule(static)
        for (long b = 0; b < long(nb); ++b) {
            const std::size_t u = std::size_t(b);
            engine::FlatCircuit flat = engine::flatten(model, boundary[u]);
            const double value = engine::run_gradient(flat, {}, ws);
            berr[u] = value - boundary_targets[u];
            engine::accumulate_slot_gradient(
                flat, ws.dangle, 1.0, std::span<double>(b_theta.data() + u * n_theta, n_theta),
                std::span<double>(b_psi.data() + u * n_psi, n_psi));
        }
    }

    LossAndGradient out;
    out.grad.theta.assign(n_theta, 0.0);
    out.grad.psi.assign(n_psi, 0.0);
    double loss = 0.0;
    if (nc > 0) {
        double interior_loss = 0.0;
        for (std::size_t i = 0; i < nc; ++i) {
            interior_loss += residuals[i] * residuals[i];
            const double w = 2.0 * residuals[i] / double(nc);
            for (std::size_t t = 0; t < n_theta; ++t)
                out.grad.theta[t] += w * r_theta[i * n_theta + t];
            for (std::size_t s = 0; s < n_psi; ++s)
                out.grad.psi[s] += w * r_psi[i * n_psi + s];
        }
        loss += interior_loss / double(nc);
    }
    if (nb > 0) {
        double boundary_loss = 0.0;
        for (std::size_t i = 0; i < nb; ++i) {
            boundary_loss += berr[i] * berr[i];
            const double w = 2.0 * berr[i] / double(nb);
            for (std::size_t t = 0; t < n_theta; ++t)
                out.grad.theta[t] += w * b_theta[i * n_theta + t];
            for (std::size_t s = 0; s < n_psi; ++s)
                out.grad.psi[s] += w * b_psi[i * n_psi + s];
        }
        loss += boundary_loss / double(nb);
    }
    out.loss = loss;
    return out;
}

// ---- serial reference kernels ----

namespace reference {

std::vector<double> batch_forward(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(reference::forward(model, p));
    return out;
}

LossAndGradient mse_loss_gradient(const ReuploaderModel& model,
                                  const std::vector<std::vector<double>>& xs,
                                  const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("reference::mse_loss_gradient: mismatched or empty batch");
    const std::size_t n = xs.size();
    LossAndGradient out;
    out.grad.theta.assign(model.params.theta.size(), 0.0);
    out.grad.psi.assign(model.params.psi_trainable ? model.params.psi.size() : 0, 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = reference::forward(model, xs[i]) - ys[i];
        loss += r * r;
        GradientVector g = reference::parameter_shift_gradient(model, xs[i]);
        const double w = 2.0 * r / double(n);
        for (std::size_t t = 0; t < g.theta.size(); ++t) out.grad.theta[t] += w * g.theta[t];
        for (std::size_t s = 0; s < g.psi.size(); ++s) out.grad.psi[s] += w * g.psi[s];
    }
    out.loss = loss / double(n);
    return out;
}

double laplace_loss(const ReuploaderModel& model,
                    const std::vector<std::vector<double>>& interior,
                    const std::vector<std::vector<double>>& boundary,
                    const std::vector<double>& boundary_targets) {
    double loss = 0.0;
    if (!interior.empty()) {
        double acc = 0.0;
        for (const auto& p : interior) {
            const double r = reference::input_derivative(model, p, {0, 2}) +
                             reference::input_derivative(model, p, {1, 2});
            acc += r * r;
        }
        loss += acc / double(interior.size());
    }
    if (!boundary.empty()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < boundary.size(); ++i) {
            const double e = reference::forward(model, boundary[i]) - boundary_targets[i];
            acc += e * e;
        }
        loss += acc / double(boundary.size());
    }
    return loss;
}

LossAndGradient laplace_loss_gradient(const ReuploaderModel& model,
                                      const std::vector<std::vector<double>>& interior,
                                      const std::vector<std::vector<double>>& boundary,
                                      const std::vector<double>& boundary_targets, double h) {
    LossAndGradient out;
    out.loss = laplace_loss(model, interior, boundary, boundary_targets);
    out.grad.theta.assign(model.params.theta.size(), 0.0);
    out.grad.psi.assign(model.params.psi_trainable ? model.params.psi.size() : 0, 0.0);

    ReuploaderModel probe = model;
    for (std::size_t t = 0; t < model.params.theta.size(); ++t) {
        probe.params.theta[t] = model.params.theta[t] + h;
        const double fp = laplace_loss(probe, interior, boundary, boundary_targets);
        probe.params.theta[t] = model.params.theta[t] - h;
        const double fm = laplace_loss(probe, interior, boundary, boundary_targets);
        probe.params.theta[t] = model.params.theta[t];
        out.grad.theta[t] = (fp - fm) / (2.0 * h);
    }
    if (model.params.psi_trainable) {
        for (std::size_t s = 0; s < model.params.psi.size(); ++s) {
            probe.params.psi[s] = model.params.psi[s] + h;
            const double fp = laplace_loss(probe, interior, boundary, boundary_targets);
            probe.params.psi[s] = model.params.psi[s] - h;
            const double fm = laplace_loss(probe, interior, boundary, boundary_targets);
            probe.params.psi[s] = model.params.psi[s];
            out.grad.psi[s] = (fp - fm) / (2.0 * h);
        }
    }
    return out;
}

} // namespace reference

} // namespace qgrow
