#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "adiacheck/conditions.hpp"
#include "adiacheck/dynamics.hpp"
#include "adiacheck/holonomy.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/pipeline.hpp"
#include "adiacheck/spectral.hpp"

namespace adiacheck {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool lower_bound = false; ///< measured must be >= tolerance instead of <=
    bool pass = false;
};

struct GammaAlgebraDefects {
    double anticommutator = 0.0; ///< max |{G_i, G_j} - 2 delta_ij I|
    double commutator = 0.0;     ///< max |[G_i, G_j] - 2 i eps_ijk Pi_k|
};

inline GammaAlgebraDefects gamma_algebra_defects(const std::array<Matrix, 3>& g)
{
    const auto pi = pi_matrices();
    const Matrix id = Matrix::Identity(4, 4);
    GammaAlgebraDefects d;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const Matrix anti = g[i] * g[j] + g[j] * g[i] - (i == j ? 2.0 : 0.0) * id;
            d.anticommutator = std::max(d.anticommutator, anti.cwiseAbs().maxCoeff());
            Matrix expected = Matrix::Zero(4, 4);
            for (int k = 0; k < 3; ++k) {
                // Levi-Civita symbol for indices in {0, 1, 2}.
                const int eps = (i - j) * (j - k) * (k - i) / 2;
                expected += (2.0 * eps) * kI * pi[k];
            }
            const Matrix comm = g[i] * g[j] - g[j] * g[i] - expected;
            d.commutator = std::max(d.commutator, comm.cwiseAbs().maxCoeff());
        }
    }
    return d;
}

struct VerifyOptions {
    std::optional<double> dt;       ///< overrides every check's step size
    bool flip_gamma_y_sign = false; ///< fault injection for the algebra checks
};

namespace detail {

inline CheckResult upper(std::string name, double measured, double tol)
{
    return {std::move(name), measured, tol, false, std::isfinite(measured) && measured <= tol};
}

inline CheckResult lower(std::string name, double measured, double tol)
{
    return {std::move(name), measured, tol, true, std::isfinite(measured) && measured >= tol};
}

inline double holonomy_magnitude_error(const GammaParams& p, std::size_t steps)
{
    const TimeGrid grid(0.0, p.total_time, steps);
    const auto spectrum = build_spectrum(gamma_hamiltonian(p), grid);
    const auto hol = level_holonomy(spectrum, 0);
    double err = 0.0;
    for (std::size_t k = 0; k < grid.points(); ++k) {
        const auto cf = gamma_sufficient_closed_forms(p, grid.time(k));
        err = std::max(err, std::abs(std::abs(hol.values[k](0, 0)) - cf.u00));
        err = std::max(err, std::abs(std::abs(hol.values[k](0, 1)) - cf.u01));
    }
    return err;
}

inline double propagation_error_at_end(const GammaParams& p, std::size_t steps)
{
    const TimeGrid grid(0.0, p.total_time, steps);
    const auto traj = propagate(gamma_hamiltonian(p), gamma_reference_frame(p, 0.0).col(0), grid);
    return (traj.states.back() - gamma_exact_state(p, p.total_time)).cwiseAbs().maxCoeff();
}

} // namespace detail

/// Oracle checks against the closed-form Gamma model. Each finishes in well under a second.
inline std::vector<CheckResult> run_verification(const VerifyOptions& options = {})
{
    std::vector<CheckResult> out;

    auto g = gamma_matrices();
    if (options.flip_gamma_y_sign) {
        g[1] = -g[1];
    }
    const auto alg = gamma_algebra_defects(g);
    out.push_back(detail::upper("gamma anticommutator", alg.anticommutator, 1e-15));
    out.push_back(detail::upper("gamma commutator", alg.commutator, 1e-15));

    {
        GammaParams p{1.0, 0.05, 1.0, 1.0, 20.0};
        const double dt = options.dt.value_or(1e-3);
        const auto cmp = compare_with_exact(p, make_grid(0.0, p.total_time, dt, 1));
        out.push_back(detail::upper("propagator vs exact solution", cmp.peak_deviation, 1e-5));
    }
    {
        GammaParams p{1.0, 0.1, std::numbers::pi / 3.0, 1.0, 10.0};
        const double dt = options.dt.value_or(1e-3);
        const auto steps = make_grid(0.0, p.total_time, dt, 1).steps();
        out.push_back(detail::upper("holonomy magnitudes vs closed form",
                                    detail::holonomy_magnitude_error(p, steps), 1e-6));
    }
    {
        GammaParams p{1.0, 0.1, 0.8, 1.0, 10.0};
        const double dt = options.dt.value_or(1e-3);
        const TimeGrid grid = make_grid(0.0, p.total_time, dt, 1);
        const auto spectrum = build_spectrum(gamma_hamiltonian(p), grid);
        const auto hol = level_holonomy(spectrum, 0);
        const auto report = build_condition_report(spectrum, hol);
        const double nec = gamma_necessary_closed_form(p);
        double nec_err = 0.0;
        double d0_err = 0.0;
        double d1_err = 0.0;
        for (std::size_t k = 0; k < grid.points(); ++k) {
            const auto cf = gamma_sufficient_closed_forms(p, grid.time(k));
            nec_err = std::max(nec_err, std::abs(report.excited[0].necessary[k] - nec) / nec);
            if (k > 0) {
                d0_err = std::max(d0_err, std::abs(report.d0[k] - cf.d0) / cf.d0);
            }
            for (const auto& series : report.excited[0].sufficient) {
                d1_err = std::max(d1_err, std::abs(series[k] - cf.d1) / cf.d1);
            }
        }
        out.push_back(detail::upper("necessary margin vs closed form (relative)", nec_err, 1e-5));
        out.push_back(detail::upper("D0 vs closed form (relative)", d0_err, 1e-5));
        out.push_back(detail::upper("D1 vs closed form (relative)", d1_err, 1e-5));
    }
    {
        GammaParams p{1.0, 0.05, 1.0, 1.0, 20.0};
        const double dt = options.dt.value_or(0.05);
        const auto steps = make_grid(0.0, p.total_time, dt, 1).steps();
        const double e1 = detail::propagation_error_at_end(p, steps);
        const double e2 = detail::propagation_error_at_end(p, 2 * steps);
        out.push_back(detail::lower("propagator convergence order", std::log2(e1 / e2), 1.9));
    }
    {
        GammaParams p{1.0, 0.1, std::numbers::pi / 3.0, 1.0, 10.0};
        const double dt = options.dt.value_or(0.05);
        const auto steps = make_grid(0.0, p.total_time, dt, 1).steps();
        const double e1 = detail::holonomy_magnitude_error(p, steps);
        const double e2 = detail::holonomy_magnitude_error(p, 2 * steps);
        out.push_back(detail::lower("holonomy convergence order", std::log2(e1 / e2), 1.9));
    }
    return out;
}

} // namespace adiacheck
