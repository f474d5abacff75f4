#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "adiacheck/conditions.hpp"
#include "adiacheck/dynamics.hpp"
#include "adiacheck/holonomy.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/schedule_io.hpp"
#include "adiacheck/spectral.hpp"

namespace adiacheck {

/// Everything a run needs; built from a config file and command-line overrides.
struct RunConfig {
    std::optional<GammaParams> gamma;  ///< analytic model, or
    std::string schedule_path;         ///< sampled schedule file

    double t_end = 0.0;                ///< 0: 1/w for Gamma runs, schedule end otherwise
    double dt = 0.0;                   ///< 0: max(b, w) dt = 1e-2, or schedule spacing
    std::size_t analysis_stride = 1;   ///< analysis grid = every stride-th propagation point

    double eta = 0.1;
    double null_cutoff = 1e-6;
    std::size_t row = 0;
    double group_tol = 1e-8;
    double hermiticity_tol = kDefaultHermiticityTol;

    std::string out_dir = ".";
    bool timestamp = true;
    bool write_json = true;
    bool write_csv = true;
    std::size_t threads = 1;

    std::vector<double> sweep_w_over_b;
    std::vector<double> sweep_theta;
    bool sweep_propagate = true;

    void validate() const
    {
        if (!gamma && schedule_path.empty()) {
            throw InvalidInput("config: either Gamma-model parameters or a schedule file is required");
        }
        if (gamma && !schedule_path.empty()) {
            throw InvalidInput("config: Gamma-model parameters and a schedule file are mutually exclusive");
        }
        if (!(eta > 0.0 && eta < 1.0)) {
            throw InvalidInput("config: eta must lie in (0, 1)");
        }
        if (analysis_stride == 0) {
            throw InvalidInput("config: analysis stride must be positive");
        }
        if (dt < 0.0 || t_end < 0.0) {
            throw InvalidInput("config: dt and t_end must be non-negative");
        }
    }

    nlohmann::json echo() const
    {
        nlohmann::json j;
        if (gamma) {
            j["model"] = {{"type", "gamma"},
                          {"b", gamma->b},
                          {"w", gamma->w},
                          {"theta", gamma->theta},
                          {"hbar", gamma->hbar}};
        } else {
            j["model"] = {{"type", "schedule"}, {"path", schedule_path}};
        }
        j["t_end"] = t_end;
        j["dt"] = dt;
        j["analysis_stride"] = analysis_stride;
        j["eta"] = eta;
        j["null_cutoff"] = null_cutoff;
        j["row"] = row;
        j["group_tol"] = group_tol;
        j["hermiticity_tol"] = hermiticity_tol;
        return j;
    }
};

/// Default total time for a Gamma run: T = 1/w keeps wt <= 1; a static field gets 10/b.
inline double default_gamma_time(const GammaParams& p)
{
    return p.w > 0.0 ? 1.0 / p.w : 10.0 / p.b;
}

/// Default Gamma step: max(b, w) dt <= 1e-2.
inline double default_gamma_dt(const GammaParams& p)
{
    return 1e-2 / std::max(p.b, p.w);
}

/// Propagation grid with a step count divisible by the analysis stride.
inline TimeGrid make_grid(double t_start, double t_end, double dt, std::size_t stride)
{
    auto steps = static_cast<std::size_t>(std::ceil((t_end - t_start) / dt - 1e-9));
    steps = std::max<std::size_t>(steps, 2 * stride);
    steps = (steps + stride - 1) / stride * stride;
    return TimeGrid(t_start, t_end, steps);
}

/// The model plus the fine (propagation) grid of a run.
struct ResolvedRun {
    HamiltonianModel model;
    TimeGrid grid;
    std::optional<GammaParams> gamma;
};

inline ResolvedRun resolve(const RunConfig& cfg)
{
    cfg.validate();
    if (cfg.gamma) {
        GammaParams p = *cfg.gamma;
        p.total_time = cfg.t_end > 0.0 ? cfg.t_end : default_gamma_time(p);
        const double dt = cfg.dt > 0.0 ? cfg.dt : default_gamma_dt(p);
        return {gamma_hamiltonian(p), make_grid(0.0, p.total_time, dt, cfg.analysis_stride), p};
    }
    const Schedule s = load_schedule(cfg.schedule_path);
    auto model = schedule_model(s, cfg.hermiticity_tol);
    if (cfg.dt <= 0.0 && cfg.t_end <= 0.0) {
        return {model, s.grid, std::nullopt};
    }
    const double end = cfg.t_end > 0.0 ? std::min(cfg.t_end, s.grid.t_end()) : s.grid.t_end();
    const double dt = cfg.dt > 0.0 ? cfg.dt : s.grid.dt();
    return {model, make_grid(s.grid.t_start(), end, dt, cfg.analysis_stride), std::nullopt};
}

enum ExitCode : int { kBothPass = 0, kError = 1, kSufficientFails = 2, kNecessaryFails = 3 };

inline int verdict_exit_code(const ConditionReport& r)
{
    if (!r.necessary_pass) {
        return kNecessaryFails;
    }
    return r.sufficient_pass ? kBothPass : kSufficientFails;
}

struct AnalysisResult {
    SnapshotSpectrum spectrum;
    Holonomy ground;
    ConditionReport report;
};

inline AnalysisResult analyze(const HamiltonianModel& model, const TimeGrid& analysis_grid,
                              const RunConfig& cfg)
{
    SpectralOptions so;
    so.group_tol = cfg.group_tol;
    auto spectrum = build_spectrum(model, analysis_grid, so);
    auto ground = level_holonomy(spectrum, 0);
    ConditionOptions co;
    co.eta = cfg.eta;
    co.null_cutoff = cfg.null_cutoff;
    co.row = cfg.row;
    auto report = build_condition_report(spectrum, ground, co);
    return {std::move(spectrum), std::move(ground), std::move(report)};
}

inline AnalysisResult analyze(const RunConfig& cfg)
{
    const auto run = resolve(cfg);
    return analyze(run.model, run.grid.coarsened(cfg.analysis_stride), cfg);
}

/// One row of the exact-versus-numeric comparison, magnitudes only.
struct ExactRow {
    double t = 0.0;
    std::array<double, 4> exact{};
    std::array<double, 4> numeric{};
    double deviation = 0.0;
};

struct ExactComparison {
    std::vector<ExactRow> rows;
    double peak_deviation = 0.0;
};

/// Propagates |0^0(0)> and compares snapshot-basis magnitudes with the closed form.
inline ExactComparison compare_with_exact(const GammaParams& p, const TimeGrid& grid,
                                          std::size_t stride = 1)
{
    const auto model = gamma_hamiltonian(p);
    const Vector psi0 = gamma_reference_frame(p, grid.t_start()).col(0);
    PropagateOptions po;
    po.store_stride = stride;
    const auto traj = propagate(model, psi0, grid, po);

    ExactComparison out;
    out.rows.reserve(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const double t = traj.grid.time(k);
        const auto ex = gamma_exact(p, t);
        const Vector c = gamma_reference_frame(p, t).adjoint() * traj.states[k];
        ExactRow row;
        row.t = t;
        for (int j = 0; j < 4; ++j) {
            row.exact[j] = std::abs(ex.c[j]);
            row.numeric[j] = std::abs(c(j));
            row.deviation = std::max(row.deviation, std::abs(row.exact[j] - row.numeric[j]));
        }
        out.peak_deviation = std::max(out.peak_deviation, row.deviation);
        out.rows.push_back(row);
    }
    return out;
}

struct SweepRow {
    double w_over_b = 0.0;
    double theta = 0.0;
    double peak_necessary = 0.0;
    double peak_d0 = 0.0;
    double peak_d1 = 0.0;
    double min_u_floor = 0.0;
    bool necessary_pass = false;
    bool sufficient_pass = false;
    std::optional<double> peak_leakage;
    std::optional<double> final_fidelity;
    std::string error;
};

inline SweepRow sweep_point(const RunConfig& cfg, double w_over_b, double theta)
{
    SweepRow row;
    row.w_over_b = w_over_b;
    row.theta = theta;
    try {
        RunConfig point = cfg;
        GammaParams p = cfg.gamma.value_or(GammaParams{});
        p.w = w_over_b * p.b;
        p.theta = theta;
        point.gamma = p;
        point.schedule_path.clear();
        const auto run = resolve(point);
        const auto grid = run.grid.coarsened(point.analysis_stride);
        const auto result = analyze(run.model, grid, point);
        const auto& r = result.report;
        row.peak_necessary = r.peak_necessary();
        row.peak_d0 = r.peak_d0();
        row.peak_d1 = r.peak_dn(1);
        row.min_u_floor = r.min_u_floor();
        row.necessary_pass = r.necessary_pass;
        row.sufficient_pass = r.sufficient_pass;

        if (point.sweep_propagate) {
            const Vector psi0 = result.spectrum.frames[0][0].col(0);
            PropagateOptions po;
            po.store_stride = point.analysis_stride;
            const auto traj = propagate(run.model, psi0, run.grid, po);
            double leak = 0.0;
            for (std::size_t n = 1; n < result.spectrum.structure.level_count(); ++n) {
                for (double v : excited_leakage(traj, result.spectrum, n)) {
                    leak = std::max(leak, v);
                }
            }
            row.peak_leakage = leak;
            const std::vector<Complex> b0 = [&] {
                std::vector<Complex> v(result.spectrum.structure.level_count(), Complex{});
                v[0] = 1.0;
                return v;
            }();
            const std::vector<Holonomy> hol{result.ground};
            const auto daa = daa_state(result.spectrum, hol, b0);
            row.final_fidelity = fidelity(traj.states.back(), daa.states.back());
        }
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

/// Runs every (w/b, theta) point on a pool of worker threads; rows keep input order.
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg)
{
    if (cfg.sweep_w_over_b.empty() || cfg.sweep_theta.empty()) {
        throw InvalidInput("sweep: both the w/b list and the theta list must be non-empty");
    }
    struct Point {
        double ratio;
        double theta;
    };
    std::vector<Point> points;
    for (double r : cfg.sweep_w_over_b) {
        for (double th : cfg.sweep_theta) {
            points.push_back({r, th});
        }
    }
    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            rows[i] = sweep_point(cfg, points[i].ratio, points[i].theta);
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(cfg.threads, 1, points.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    return rows;
}

} // namespace adiacheck
