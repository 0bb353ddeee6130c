#include "qgrow/verification.hpp"

#include "qgrow/gradients.hpp"
#include "qgrow/growth.hpp"
#include "qgrow/model.hpp"
#include "qgrow/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace qgrow {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class Family { ST_1Q, ST_2Q, LAPLACE };

LayoutSpec family_layout(Family family, int n_ansatz, const std::vector<int>& gaps) {
    switch (family) {
    case Family::ST_1Q: return gapped_student_teacher_layout(1, n_ansatz, gaps);
    case Family::ST_2Q: return gapped_student_teacher_layout(2, n_ansatz, gaps);
    default: return gapped_laplace_layout(n_ansatz, gaps);
    }
}

void family_templates(Family family, GrowthSchedule& schedule) {
    LayoutSpec unit = family == Family::LAPLACE ? gapped_laplace_layout(2, {0})
                      : family == Family::ST_2Q ? gapped_student_teacher_layout(2, 2, {0})
                                                : gapped_student_teacher_layout(1, 2, {0});
    schedule.ansatz_template = unit.blocks[0];
    schedule.fm_template = unit.blocks[1];
}

void record_failure(SuiteResult& result, const std::string& message) {
    ++result.failures;
    if (result.first_failure.empty()) result.first_failure = message;
}

} // namespace

SuiteResult preservation_suite(int n_triples, std::uint64_t seed) {
    SuiteResult result;
    result.name = "preservation";

    for (int t = 0; t < n_triples; ++t) {
        std::mt19937_64 rng(mix(seed, std::uint64_t(t)));
        const Family family = Family(rng() % 3);
        const GrowthKind strategy = GrowthKind(rng() % 3);
        const int ell = 1 + int(rng() % 2);

        int n_ansatz = 0;
        std::vector<int> gaps;
        if (strategy == GrowthKind::BLOCK) {
            n_ansatz = 1 + int(rng() % 4);
            for (int g = 0; g < n_ansatz - 1; ++g) gaps.push_back(g);
        } else {
            n_ansatz = 2 + int(rng() % 4); // up to 5 ansatz blocks, 4 gaps
            for (int g = 0; g < n_ansatz - 1; ++g) {
                if (rng() % 2 == 0) gaps.push_back(g);
            }
            while (int(gaps.size()) > n_ansatz - 1 - ell) gaps.pop_back();
        }

        ReuploaderModel model = build_reuploader(family_layout(family, n_ansatz, gaps),
                                                 InitSpec::random(0.0, kPi), rng());

        GrowthSchedule schedule;
        schedule.strategy = strategy;
        schedule.blocks_per_event = ell;
        schedule.max_feature_map_blocks = model.feature_map_block_count() + ell;
        family_templates(family, schedule);

        try {
            auto [grown, event] = grow(model, schedule, rng(), 0);
            ++result.checks;
            result.worst = std::max(result.worst, event.preservation_residual);
            if (!(event.preservation_residual < 1e-10)) {
                std::ostringstream oss;
                oss << "triple " << t << ": residual " << event.preservation_residual;
                record_failure(result, oss.str());
            }
        } catch (const std::exception& e) {
            ++result.checks;
            record_failure(result, std::string("triple ") + std::to_string(t) + ": " + e.what());
        }
    }
    return result;
}

SuiteResult gradient_suite(int n_pairs, std::uint64_t seed) {
    SuiteResult result;
    result.name = "gradient";
    constexpr double h_param = 1e-5;
    constexpr double h_input = 1e-4;

    for (int t = 0; t < n_pairs; ++t) {
        std::mt19937_64 rng(mix(seed, 0x67726164ULL + std::uint64_t(t)));
        const Family family = Family(rng() % 3);
        const int n_layers = 1 + int(rng() % 2); // <= 5 blocks total
        LayoutSpec layout = family == Family::LAPLACE ? laplace_layout(n_layers)
                            : family == Family::ST_2Q ? student_teacher_layout(2, n_layers)
                                                      : student_teacher_layout(1, n_layers);
        ReuploaderModel model = build_reuploader(layout, InitSpec::random(0.0, kPi), rng());
        // spread psi away from the init range so chain-rule factors vary
        for (double& p : model.params.psi)
            p = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);

        std::vector<double> x(std::size_t(model.input_dim));
        for (double& c : x) c = std::uniform_real_distribution<double>(-kPi, kPi)(rng);

        const GradientVector grad = parameter_shift_gradient(model, x);
        ReuploaderModel probe = model;
        auto fd = [&](std::vector<double>& values, std::size_t i) {
            const double saved = values[i];
            values[i] = saved + h_param;
            const double fp = forward(probe, x);
            values[i] = saved - h_param;
            const double fm = forward(probe, x);
            values[i] = saved;
            return (fp - fm) / (2.0 * h_param);
        };

        ++result.checks;
        bool ok = true;
        for (std::size_t i = 0; i < model.params.theta.size() && ok; ++i) {
            const double dev = std::abs(grad.theta[i] - fd(probe.params.theta, i));
            result.worst = std::max(result.worst, dev);
            if (dev > 1e-6) {
                record_failure(result, "pair " + std::to_string(t) + ": theta partial off by " +
                                           std::to_string(dev));
                ok = false;
            }
        }
        for (std::size_t i = 0; i < model.params.psi.size() && ok; ++i) {
            const double dev = std::abs(grad.psi[i] - fd(probe.params.psi, i));
            result.worst = std::max(result.worst, dev);
            if (dev > 1e-6) {
                record_failure(result, "pair " + std::to_string(t) + ": psi partial off by " +
                                           std::to_string(dev));
                ok = false;
            }
        }

        for (int d = 0; d < model.input_dim && ok; ++d) {
            const double d2 = input_derivative(model, x, {d, 2});
            std::vector<double> xs = x;
            const double f0 = forward(model, xs);
            xs[std::size_t(d)] = x[std::size_t(d)] + h_input;
            const double fp = forward(model, xs);
            xs[std::size_t(d)] = x[std::size_t(d)] - h_input;
            const double fm = forward(model, xs);
            const double stencil = (fp - 2.0 * f0 + fm) / (h_input * h_input);
            const double dev = std::abs(d2 - stencil);
            result.worst = std::max(result.worst, dev);
            if (dev > 1e-4) {
                record_failure(result, "pair " + std::to_string(t) +
                                           ": order-2 derivative off by " + std::to_string(dev));
                ok = false;
            }
        }
    }
    return result;
}

SuiteResult spectrum_suite(int n_random_models, std::uint64_t seed) {
    SuiteResult result;
    result.name = "spectrum";

    for (int L = 1; L <= 6; ++L) {
        ReuploaderModel model =
            build_reuploader(angle_encoding_layout(1, L), InitSpec::random(0.0, 0.0), 0);
        for (double& p : model.params.psi) p = 1.0;
        const OmegaSet omega = accessible_spectrum(model, 0);
        ++result.checks;
        if (int(omega.K()) != 2 * L + 1) {
            record_failure(result, "ladder L=" + std::to_string(L) + ": K=" +
                                       std::to_string(omega.K()) + " expected " +
                                       std::to_string(2 * L + 1));
        }
    }

    for (int t = 0; t < n_random_models; ++t) {
        std::mt19937_64 rng(mix(seed, 0x73706563ULL + std::uint64_t(t)));
        const int nq = 1 + int(rng() % 2);
        const int n_layers = 1 + int(rng() % 5);
        ReuploaderModel model = build_reuploader(student_teacher_layout(nq, n_layers),
                                                 InitSpec::random(0.0, 2.0 * kPi), rng());
        for (double& p : model.params.psi)
            p = double(1 + int(rng() % 2)) * (rng() % 2 == 0 ? 1.0 : -1.0);

        for (int d = 0; d < model.input_dim; ++d) {
            const OmegaSet omega = accessible_spectrum(model, d);
            long long max_freq = 0;
            for (double w : omega.frequencies)
                max_freq = std::max(max_freq, std::llabs(llround(w)));
            const int grid = int(2 * max_freq + 1);

            std::vector<double> fixed(std::size_t(model.input_dim), 0.4);
            const auto coeffs = fourier_coefficients(model, d, grid, fixed);

            std::vector<long long> allowed;
            for (double w : omega.frequencies) allowed.push_back(llround(w));

            double outside = 0.0;
            for (const auto& [freq, c] : coeffs) {
                bool in_omega = false;
                for (long long a : allowed) {
                    if (a == freq) {
                        in_omega = true;
                        break;
                    }
                }
                if (!in_omega) outside += std::norm(c);
            }
            ++result.checks;
            result.worst = std::max(result.worst, outside);
            if (!(outside < 1e-9)) {
                record_failure(result, "model " + std::to_string(t) + " dim " +
                                           std::to_string(d) + ": outside energy " +
                                           std::to_string(outside));
            }
        }
    }
    return result;
}

} // namespace qgrow
