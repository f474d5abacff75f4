// adiacheck: audits the degenerate adiabatic approximation for time-dependent Hamiltonians.
//
//   adiacheck analyze --w 0.01 --theta 1.0 --out results/
//   adiacheck exact   --w 0.05 --theta 1.0 --dt 1e-3 --t-end 20
//   adiacheck sweep   --w-over-b 0.01,0.1,1,2 --thetas 0,0.5,1.5707963267948966
//   adiacheck verify
//
// Options may also come from a TOML-style file given with --config; flags override it.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "adiacheck/adiacheck.hpp"

namespace fs = std::filesystem;
using namespace adiacheck;

namespace {

struct CliState {
    RunConfig cfg;
    double b = 1.0;
    double w = 0.1;
    double theta = 1.0;
    double hbar = 1.0;
    bool no_timestamp = false;
    std::string formats = "json,csv";
    int threads = 0;
    std::string fault;
};

std::size_t resolve_threads(int flag)
{
    if (flag > 0) {
        return static_cast<std::size_t>(flag);
    }
    if (const char* env = std::getenv("ADIACHECK_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return static_cast<std::size_t>(n);
            }
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid ADIACHECK_THREADS=" << env << '\n';
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void finalize(CliState& s)
{
    auto& cfg = s.cfg;
    if (cfg.schedule_path.empty()) {
        cfg.gamma = GammaParams{s.b, s.w, s.theta, s.hbar, 1.0};
    }
    cfg.timestamp = !s.no_timestamp;
    cfg.write_json = s.formats.find("json") != std::string::npos;
    cfg.write_csv = s.formats.find("csv") != std::string::npos;
    cfg.threads = resolve_threads(s.threads);
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name)
{
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / name;
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot write " + path.string());
    }
    return out;
}

int cmd_analyze(const CliState& s)
{
    const auto& cfg = s.cfg;
    const auto result = analyze(cfg);
    const auto& r = result.report;
    if (cfg.write_json) {
        auto doc = report_to_json(r, cfg.echo());
        if (cfg.timestamp) {
            doc["generated"] = utc_timestamp();
        }
        open_output(cfg, "report.json") << doc.dump(2) << '\n';
    }
    if (cfg.write_csv) {
        auto out = open_output(cfg, "report.csv");
        write_report_csv(out, r, cfg.timestamp);
    }
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    const int code = verdict_exit_code(r);
    std::cout << std::setprecision(6) << "necessary: " << (r.necessary_pass ? "pass" : "FAIL")
              << " (peak margin " << r.peak_necessary() << ", eta " << cfg.eta << ")\n"
              << "sufficient: " << (r.sufficient_pass ? "pass" : "FAIL") << " (peak D0 "
              << r.peak_d0() << ", peak D1 " << r.peak_dn(1) << ", min u_floor " << r.min_u_floor()
              << ")\n";
    return code;
}

int cmd_exact(const CliState& s)
{
    const auto& cfg = s.cfg;
    if (!cfg.gamma) {
        throw InvalidInput("exact: only the Gamma model has a closed-form solution");
    }
    const auto run = resolve(cfg);
    const auto cmp = compare_with_exact(*run.gamma, run.grid, cfg.analysis_stride);

    auto out = open_output(cfg, "exact.csv");
    if (cfg.timestamp) {
        out << "# generated " << utc_timestamp() << '\n';
    }
    out << "t,exact_c00,exact_c01,exact_c10,exact_c11,numeric_c00,numeric_c01,numeric_c10,"
           "numeric_c11,max_deviation\n";
    for (const auto& row : cmp.rows) {
        out << format_double(row.t);
        for (double v : row.exact) {
            out << ',' << format_double(v);
        }
        for (double v : row.numeric) {
            out << ',' << format_double(v);
        }
        out << ',' << format_double(row.deviation) << '\n';
    }

    PropagateOptions po;
    po.store_stride = cfg.analysis_stride;
    const auto traj = propagate(run.model, gamma_reference_frame(*run.gamma, 0.0).col(0), run.grid, po);
    auto tout = open_output(cfg, "trajectory.csv");
    write_trajectory_csv(tout, traj, cfg.timestamp);

    std::cout << "peak deviation " << format_double(cmp.peak_deviation) << " over "
              << run.grid.steps() << " steps (dt " << run.grid.dt() << ")\n";
    return 0;
}

int cmd_sweep(const CliState& s)
{
    const auto& cfg = s.cfg;
    if (!cfg.gamma) {
        throw InvalidInput("sweep: parameter sweeps run on the Gamma model");
    }
    const auto rows = run_sweep(cfg);
    auto out = open_output(cfg, "sweep.csv");
    if (cfg.timestamp) {
        out << "# generated " << utc_timestamp() << '\n';
    }
    out << "w_over_b,theta,peak_necessary,peak_d0,peak_d1,min_u_floor,necessary_pass,"
           "sufficient_pass,peak_leakage,final_fidelity,error\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
    int failures = 0;
    for (const auto& r : rows) {
        out << format_double(r.w_over_b) << ',' << format_double(r.theta) << ','
            << format_double(r.peak_necessary) << ',' << format_double(r.peak_d0) << ','
            << format_double(r.peak_d1) << ',' << format_double(r.min_u_floor) << ','
            << (r.necessary_pass ? 1 : 0) << ',' << (r.sufficient_pass ? 1 : 0) << ','
            << opt(r.peak_leakage) << ',' << opt(r.final_fidelity) << ',' << '"' << r.error << '"'
            << '\n';
        if (!r.error.empty()) {
            ++failures;
            std::cerr << "sweep point w/b=" << r.w_over_b << " theta=" << r.theta << ": " << r.error
                      << '\n';
        }
    }
    std::cout << rows.size() << " sweep points written to "
              << (fs::path(cfg.out_dir) / "sweep.csv").string() << '\n';
    return failures == 0 ? 0 : 1;
}

int cmd_verify(const CliState& s)
{
    VerifyOptions vo;
    if (s.cfg.dt > 0.0) {
        vo.dt = s.cfg.dt;
    }
    if (!s.fault.empty()) {
        if (s.fault != "gamma-y-sign") {
            throw InvalidInput("verify: unknown fault '" + s.fault + "'");
        }
        vo.flip_gamma_y_sign = true;
    }
    const auto checks = run_verification(vo);
    bool ok = true;
    std::cout << std::left << std::setw(46) << "check" << std::setw(16) << "measured"
              << std::setw(18) << "tolerance" << "result\n";
    for (const auto& c : checks) {
        std::ostringstream tol;
        tol << (c.lower_bound ? ">= " : "<= ") << std::setprecision(3) << c.tolerance;
        std::cout << std::setw(46) << c.name << std::setw(16) << std::setprecision(6) << c.measured
                  << std::setw(18) << tol.str() << (c.pass ? "pass" : "FAIL") << '\n';
        ok = ok && c.pass;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CliState s;
    CLI::App app{"Degenerate adiabatic approximation auditor"};
    app.set_config("--config", "", "TOML-style configuration file");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    auto& cfg = s.cfg;
    app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    app.add_option("--eta", cfg.eta, "Cutoff interpreting 'much smaller than'")->capture_default_str();
    app.add_option("--dt", cfg.dt, "Time step (default: max(b, w) dt = 1e-2)");
    app.add_option("--t-end", cfg.t_end, "Total time (default: 1/w)");
    app.add_flag("--no-timestamp", s.no_timestamp, "Omit timestamps so reruns are byte-identical");
    app.add_option("--threads", s.threads, "Worker threads (fallback: ADIACHECK_THREADS)");
    app.add_option("--b", s.b, "Coupling angular frequency")->capture_default_str();
    app.add_option("--w", s.w, "Field rotation angular frequency")->capture_default_str();
    app.add_option("--theta", s.theta, "Polar angle of the field")->capture_default_str();
    app.add_option("--hbar", s.hbar, "Action scale")->capture_default_str();
    app.add_option("--schedule", cfg.schedule_path, "Sampled schedule JSON instead of the Gamma model");
    app.add_option("--stride", cfg.analysis_stride, "Analysis grid stride over the propagation grid");
    app.add_option("--null-cutoff", cfg.null_cutoff, "Holonomy entries below this count as null")
        ->capture_default_str();
    app.add_option("--row", cfg.row, "Initial-condition row of the ground holonomy");
    app.add_option("--group-tol", cfg.group_tol, "Relative degeneracy grouping tolerance");
    app.add_option("--hermiticity-tol", cfg.hermiticity_tol, "Schedule Hermiticity tolerance");
    app.add_option("--formats", s.formats, "Report formats: json, csv, or json,csv")->capture_default_str();

    auto* analyze_cmd = app.add_subcommand("analyze", "Evaluate the adiabaticity conditions");
    auto* exact_cmd = app.add_subcommand("exact", "Compare propagation with the exact Gamma solution");
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep w/b and theta for the Gamma model");
    auto* verify_cmd = app.add_subcommand("verify", "Run the oracle checks");
    sweep_cmd->add_option("--w-over-b", cfg.sweep_w_over_b, "List of w/b values")->delimiter(',');
    sweep_cmd->add_option("--thetas", cfg.sweep_theta, "List of theta values")->delimiter(',');
    sweep_cmd->add_flag("!--no-propagate", cfg.sweep_propagate, "Skip propagation (no leakage/fidelity)");
    verify_cmd->add_option("--inject-fault", s.fault, "Test hook: gamma-y-sign")->group("");
    for (auto* sub : {analyze_cmd, exact_cmd, sweep_cmd, verify_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kError;
    }

    try {
        finalize(s);
        if (*analyze_cmd) {
            return cmd_analyze(s);
        }
        if (*exact_cmd) {
            return cmd_exact(s);
        }
        if (*sweep_cmd) {
            return cmd_sweep(s);
        }
        return cmd_verify(s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
}
