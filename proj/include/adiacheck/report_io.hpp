#pragma once

#include <chrono>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "adiacheck/conditions.hpp"
#include "adiacheck/dynamics.hpp"

namespace adiacheck {

/// Full-precision (17 significant digits) rendering used for every CSV cell.
inline std::string format_double(double v)
{
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

inline nlohmann::json report_to_json(const ConditionReport& r, const nlohmann::json& config_echo = {})
{
    nlohmann::json doc;
    doc["config"] = config_echo;
    doc["grid"] = {{"t_start", r.grid.t_start()}, {"t_end", r.grid.t_end()}, {"steps", r.grid.steps()}};
    doc["options"] = {{"eta", r.options.eta},
                      {"null_cutoff", r.options.null_cutoff},
                      {"row", r.options.row},
                      {"gap_variation_warn", r.options.gap_variation_warn}};
    doc["hbar"] = r.hbar;
    nlohmann::json times = nlohmann::json::array();
    for (std::size_t k = 0; k < r.grid.points(); ++k) {
        times.push_back(r.grid.time(k));
    }
    doc["times"] = std::move(times);
    doc["d0"] = r.d0;
    doc["u_floor"] = r.u_floor;
    doc["u_min"] = r.u_min;
    doc["excited_levels"] = nlohmann::json::array();
    for (const auto& lvl : r.excited) {
        doc["excited_levels"].push_back({{"level", lvl.level},
                                         {"multiplicity", lvl.multiplicity},
                                         {"necessary_margin", lvl.necessary},
                                         {"sufficient_dn", lvl.sufficient}});
    }
    doc["summary"] = {{"peak_necessary_margin", r.peak_necessary()},
                      {"peak_d0", r.peak_d0()},
                      {"min_u_floor", r.min_u_floor()}};
    doc["verdicts"] = {{"necessary_pass", r.necessary_pass}, {"sufficient_pass", r.sufficient_pass}};
    doc["warnings"] = r.warnings;
    return doc;
}

/// Columns: t, necessary_n<level>..., d0, d<level>_g<g>..., u_floor.
inline void write_report_csv(std::ostream& out, const ConditionReport& r, bool timestamp)
{
    if (timestamp) {
        out << "# generated " << utc_timestamp() << '\n';
    }
    out << "t";
    for (const auto& lvl : r.excited) {
        out << ",necessary_n" << lvl.level;
    }
    out << ",d0";
    for (const auto& lvl : r.excited) {
        for (std::size_t g = 0; g < lvl.multiplicity; ++g) {
            out << ",d" << lvl.level << "_g" << g;
        }
    }
    out << ",u_floor\n";
    for (std::size_t k = 0; k < r.grid.points(); ++k) {
        out << format_double(r.grid.time(k));
        for (const auto& lvl : r.excited) {
            out << ',' << format_double(lvl.necessary[k]);
        }
        out << ',' << format_double(r.d0[k]);
        for (const auto& lvl : r.excited) {
            for (const auto& series : lvl.sufficient) {
                out << ',' << format_double(series[k]);
            }
        }
        out << ',' << format_double(r.u_floor[k]) << '\n';
    }
}

/// Columns: t, re_0, im_0, ..., re_{N-1}, im_{N-1}, norm.
inline void write_trajectory_csv(std::ostream& out, const WaveTrajectory& traj, bool timestamp)
{
    if (timestamp) {
        out << "# generated " << utc_timestamp() << '\n';
    }
    const auto n = traj.states.empty() ? 0 : traj.states.front().size();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << ",re_" << i << ",im_" << i;
    }
    out << ",norm\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out << format_double(traj.grid.time(k));
        for (Eigen::Index i = 0; i < n; ++i) {
            out << ',' << format_double(traj.states[k](i).real()) << ','
                << format_double(traj.states[k](i).imag());
        }
        out << ',' << format_double(traj.states[k].norm()) << '\n';
    }
}

} // namespace adiacheck
