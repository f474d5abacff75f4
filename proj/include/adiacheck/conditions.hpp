#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "adiacheck/errors.hpp"
#include "adiacheck/holonomy.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/spectral.hpp"

namespace adiacheck {

// Block conventions: necessary margins consume M^{n0} = F_n^dagger dF_0/dt and the
// sufficient bounds consume M^{0n} = F_0^dagger dF_n/dt, both as built by overlap_block.
// Absolute values of their entries coincide with those of the row/column-labelled
// matrices of the underlying formulas, so every norm below is convention independent.

struct ConditionOptions {
    double eta = 0.1;           ///< "much smaller than" cutoff on dimensionless ratios
    double null_cutoff = 1e-6;  ///< holonomy entries below this are treated as null
    std::size_t row = 0;        ///< initial-condition row h_0 of U^0
    double gap_variation_warn = 0.1;
};

/// hbar ||M^{n0}||_1 / |Delta_{n0}|.
inline double necessary_margin(const Matrix& block_n0, double gap, double hbar)
{
    if (gap == 0.0) {
        throw InvalidInput("necessary_margin: zero gap; the two levels should have been merged");
    }
    return hbar * one_norm(block_n0) / std::abs(gap);
}

/// Integrand of D^0 at one time: sum over excited levels of sum_{k,i} |[M M^dagger]_{ki}| / |Delta_{0n}|.
inline double sufficient_d0_integrand(std::span<const Matrix> blocks_0n, std::span<const double> gaps_0n)
{
    if (blocks_0n.size() != gaps_0n.size()) {
        throw DimensionMismatch("sufficient_d0_integrand: one gap per block required");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < blocks_0n.size(); ++i) {
        if (gaps_0n[i] == 0.0) {
            throw InvalidInput("sufficient_d0_integrand: zero gap");
        }
        const Matrix mm = blocks_0n[i] * blocks_0n[i].adjoint();
        sum += mm.cwiseAbs().sum() / std::abs(gaps_0n[i]);
    }
    return sum;
}

/// D^0(t_k) for every k: hbar d_0 times the cumulative trapezoid of the integrand.
inline std::vector<double> sufficient_d0(std::span<const double> integrand, double dt,
                                         std::size_t d0, double hbar)
{
    std::vector<double> out(integrand.size(), 0.0);
    const double scale = hbar * static_cast<double>(d0) * 0.5 * dt;
    for (std::size_t k = 1; k < integrand.size(); ++k) {
        out[k] = out[k - 1] + scale * (integrand[k - 1] + integrand[k]);
    }
    return out;
}

/// D^n_{g}(t) = hbar/|Delta_{n0}(0)| (sum_k |[M^{0n}(t)]_{k g}| + d_n sum_{k,l} |[M^{0n}(0)]_{k l}|).
inline double sufficient_dn(const Matrix& block_0n_t, const Matrix& block_0n_initial,
                            double gap_initial, std::size_t dn, double hbar, std::size_t g)
{
    if (gap_initial == 0.0) {
        throw InvalidInput("sufficient_dn: zero gap at t = 0");
    }
    if (g >= static_cast<std::size_t>(block_0n_t.cols())) {
        throw InvalidInput("sufficient_dn: column index out of range");
    }
    const double column = block_0n_t.col(static_cast<Eigen::Index>(g)).cwiseAbs().sum();
    const double total = block_0n_initial.cwiseAbs().sum();
    return hbar / std::abs(gap_initial) * (column + static_cast<double>(dn) * total);
}

/// Smallest non-null |[U^0]_{row, g}|.
inline double u_floor(const Matrix& u0, std::size_t row, double null_cutoff)
{
    double floor = std::numeric_limits<double>::infinity();
    for (Eigen::Index g = 0; g < u0.cols(); ++g) {
        const double mag = std::abs(u0(static_cast<Eigen::Index>(row), g));
        if (mag >= null_cutoff) {
            floor = std::min(floor, mag);
        }
    }
    if (!std::isfinite(floor)) {
        throw Error("u_floor: every entry of the holonomy row is below the null cutoff");
    }
    return floor;
}

struct ExcitedLevelMargins {
    std::size_t level = 0;
    std::size_t multiplicity = 0;
    std::vector<double> necessary;             ///< [k]
    std::vector<std::vector<double>> sufficient; ///< [g][k]
};

struct ConditionReport {
    TimeGrid grid;
    ConditionOptions options;
    double hbar = 1.0;
    std::vector<ExcitedLevelMargins> excited;
    std::vector<double> d0;       ///< D^0(t_k), identical for all g_0
    std::vector<double> u_floor;  ///< smallest non-null |[U^0(t_k)]_{row,g}|
    std::vector<double> u_min;    ///< smallest |[U^0(t_k)]_{row,g}| including null entries
    bool necessary_pass = false;
    bool sufficient_pass = false;
    std::vector<std::string> warnings;

    double peak_necessary() const
    {
        double m = 0.0;
        for (const auto& lvl : excited) {
            for (double v : lvl.necessary) {
                m = std::max(m, v);
            }
        }
        return m;
    }

    double peak_d0() const { return d0.empty() ? 0.0 : *std::max_element(d0.begin(), d0.end()); }

    /// Peak over g and t of D^n_g for one excited level (0 if absent).
    double peak_dn(std::size_t level) const
    {
        double m = 0.0;
        for (const auto& lvl : excited) {
            if (lvl.level != level) {
                continue;
            }
            for (const auto& series : lvl.sufficient) {
                for (double v : series) {
                    m = std::max(m, v);
                }
            }
        }
        return m;
    }

    double min_u_floor() const
    {
        return u_floor.empty() ? 1.0 : *std::min_element(u_floor.begin(), u_floor.end());
    }
};

/// Pass iff max over t, n of the necessary margin is at most eta.
inline bool necessary_check(const ConditionReport& report, double eta)
{
    return report.peak_necessary() <= eta;
}

/// Pass iff every D^0 and D^n_g value is at most eta times the non-null holonomy floor.
inline bool practical_sufficient_check(const ConditionReport& report, double eta)
{
    for (std::size_t k = 0; k < report.u_floor.size(); ++k) {
        const double bound = eta * report.u_floor[k];
        if (report.d0[k] > bound) {
            return false;
        }
        for (const auto& lvl : report.excited) {
            for (const auto& series : lvl.sufficient) {
                if (series[k] > bound) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Evaluates the necessary condition and the practical sufficient condition for a state
/// started in the ground level, given the ground-level holonomy on the same grid.
inline ConditionReport build_condition_report(const SnapshotSpectrum& spectrum,
                                              const Holonomy& ground_holonomy,
                                              const ConditionOptions& options = {})
{
    const auto& st = spectrum.structure;
    const std::size_t points = spectrum.points();
    const double hbar = spectrum.model.hbar();
    if (ground_holonomy.level != 0 || ground_holonomy.values.size() != points) {
        throw DimensionMismatch("build_condition_report: ground holonomy must be on the spectrum grid");
    }
    if (!(options.eta > 0.0)) {
        throw InvalidInput("build_condition_report: eta must be positive");
    }
    if (options.row >= st.multiplicities.at(0)) {
        throw InvalidInput("build_condition_report: row exceeds ground-level multiplicity");
    }

    ConditionReport report{spectrum.grid, options, hbar, {}, {}, {}, {}, false, false, {}};
    std::vector<std::vector<Matrix>> blocks_0n(st.level_count());
    for (std::size_t n = 1; n < st.level_count(); ++n) {
        blocks_0n[n] = overlap_series(spectrum, 0, n);
        const auto blocks_n0 = overlap_series(spectrum, n, 0);

        ExcitedLevelMargins lvl;
        lvl.level = n;
        lvl.multiplicity = st.multiplicities[n];
        lvl.necessary.resize(points);
        lvl.sufficient.assign(lvl.multiplicity, std::vector<double>(points));
        const double gap0 = st.gap(n, 0, 0);
        double gap_lo = std::abs(gap0);
        double gap_hi = gap_lo;
        for (std::size_t k = 0; k < points; ++k) {
            const double gap = st.gap(n, 0, k);
            gap_lo = std::min(gap_lo, std::abs(gap));
            gap_hi = std::max(gap_hi, std::abs(gap));
            lvl.necessary[k] = necessary_margin(blocks_n0[k], gap, hbar);
            for (std::size_t g = 0; g < lvl.multiplicity; ++g) {
                lvl.sufficient[g][k] =
                    sufficient_dn(blocks_0n[n][k], blocks_0n[n][0], gap0, lvl.multiplicity, hbar, g);
            }
        }
        if (gap_hi - gap_lo > options.gap_variation_warn * std::abs(gap0)) {
            std::ostringstream msg;
            msg << "gap between level " << n << " and the ground level varies by "
                << (gap_hi - gap_lo) / std::abs(gap0) * 100.0
                << "% over the grid; D^n uses the gap at t = 0";
            report.warnings.push_back(msg.str());
        }
        report.excited.push_back(std::move(lvl));
    }

    std::vector<double> integrand(points, 0.0);
    std::vector<Matrix> blocks_at_k;
    std::vector<double> gaps_at_k;
    for (std::size_t k = 0; k < points; ++k) {
        blocks_at_k.clear();
        gaps_at_k.clear();
        for (std::size_t n = 1; n < st.level_count(); ++n) {
            blocks_at_k.push_back(blocks_0n[n][k]);
            gaps_at_k.push_back(st.gap(0, n, k));
        }
        integrand[k] = sufficient_d0_integrand(blocks_at_k, gaps_at_k);
    }
    report.d0 = sufficient_d0(integrand, spectrum.grid.dt(), st.multiplicities[0], hbar);

    report.u_floor.resize(points);
    report.u_min.resize(points);
    const auto row = static_cast<Eigen::Index>(options.row);
    for (std::size_t k = 0; k < points; ++k) {
        const Matrix& u = ground_holonomy.values[k];
        report.u_floor[k] = u_floor(u, options.row, options.null_cutoff);
        report.u_min[k] = u.row(row).cwiseAbs().minCoeff();
    }

    report.necessary_pass = necessary_check(report, options.eta);
    report.sufficient_pass = practical_sufficient_check(report, options.eta);
    return report;
}

/// Closed-form margins of the Gamma model, used as oracles.
struct GammaSufficientClosedForms {
    double d0 = 0.0;
    double d1 = 0.0;
    double u00 = 0.0;
    double u01 = 0.0;
};

/// w sin(th) (sin(th) + |cos(th)|) / (2b): the one-norm of M^{10} over the gap.
inline double gamma_necessary_closed_form(const GammaParams& p)
{
    const double st = std::sin(p.theta);
    return p.w * st * (st + std::abs(std::cos(p.theta))) / (2.0 * p.b);
}

/// w sin(th) |sin(th) + cos(th)| / (2b); equals the one-norm form for th in [0, pi/2].
inline double gamma_necessary_printed_form(const GammaParams& p)
{
    const double st = std::sin(p.theta);
    return p.w * st * std::abs(st + std::cos(p.theta)) / (2.0 * p.b);
}

inline GammaSufficientClosedForms gamma_sufficient_closed_forms(const GammaParams& p, double t)
{
    const double st = std::sin(p.theta);
    const double ct = std::cos(p.theta);
    const double phase = std::sin(0.5 * p.w * t * ct);
    GammaSufficientClosedForms r;
    r.d0 = p.w * p.w * t * st * st / p.b;
    r.d1 = 5.0 * p.w * st * (std::abs(ct) + st) / (2.0 * p.b);
    r.u00 = std::sqrt(std::max(0.0, 1.0 - st * st * phase * phase));
    r.u01 = st * std::abs(phase);
    return r;
}

} // namespace adiacheck
