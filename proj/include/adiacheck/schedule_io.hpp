#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adiacheck/errors.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/time_grid.hpp"

namespace adiacheck {

/// A Hamiltonian schedule sampled on a uniform grid.
struct Schedule {
    TimeGrid grid;
    double hbar = 1.0;
    std::vector<Matrix> matrices;
};

namespace detail {

inline Complex parse_entry(const nlohmann::json& v, std::size_t k, std::size_t i, std::size_t j)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw InvalidInput("schedule: matrix " + std::to_string(k) + " entry (" + std::to_string(i) +
                           "," + std::to_string(j) + ") is not a [re, im] pair");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

} // namespace detail

/// Parses {"dimension", "hbar", "times", "matrices"}; matrices are row-major [re, im] pairs.
inline Schedule parse_schedule(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("dimension") || !doc.contains("times") ||
        !doc.contains("matrices")) {
        throw InvalidInput("schedule: expected keys \"dimension\", \"times\", \"matrices\"");
    }
    if (!doc["dimension"].is_number_integer() || doc["dimension"].get<long long>() <= 0) {
        throw InvalidInput("schedule: \"dimension\" must be a positive integer");
    }
    const auto n = doc["dimension"].get<std::size_t>();
    const double hbar = doc.value("hbar", 1.0);
    const auto& times = doc["times"];
    const auto& mats = doc["matrices"];
    if (!times.is_array() || !mats.is_array()) {
        throw InvalidInput("schedule: \"times\" and \"matrices\" must be arrays");
    }
    if (times.size() != mats.size()) {
        throw DimensionMismatch("schedule: " + std::to_string(times.size()) + " times but " +
                                std::to_string(mats.size()) + " matrices");
    }
    if (times.size() < 3) {
        throw InvalidInput("schedule: at least three time points required");
    }

    std::vector<double> t;
    t.reserve(times.size());
    for (const auto& v : times) {
        if (!v.is_number()) {
            throw InvalidInput("schedule: non-numeric time");
        }
        t.push_back(v.get<double>());
    }
    const std::size_t steps = t.size() - 1;
    const double dt = (t.back() - t.front()) / static_cast<double>(steps);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double expected = t.front() + static_cast<double>(k) * dt;
        if (std::abs(t[k] - expected) > 1e-9 * std::abs(t.back() - t.front())) {
            throw InvalidInput("schedule: times must be uniformly spaced (index " + std::to_string(k) + ")");
        }
    }

    Schedule out{TimeGrid(t.front(), t.back(), steps), hbar, {}};
    out.matrices.reserve(mats.size());
    for (std::size_t k = 0; k < mats.size(); ++k) {
        const auto& rows = mats[k];
        if (!rows.is_array() || rows.size() != n) {
            throw DimensionMismatch("schedule: matrix " + std::to_string(k) + " does not have " +
                                    std::to_string(n) + " rows");
        }
        Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (!rows[i].is_array() || rows[i].size() != n) {
                throw DimensionMismatch("schedule: matrix " + std::to_string(k) + " row " +
                                        std::to_string(i) + " does not have " + std::to_string(n) +
                                        " entries");
            }
            for (std::size_t j = 0; j < n; ++j) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    detail::parse_entry(rows[i][j], k, i, j);
            }
        }
        out.matrices.push_back(std::move(m));
    }
    return out;
}

inline Schedule load_schedule(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("schedule: cannot open " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("schedule: " + path + " is not valid JSON: " + e.what());
    }
    return parse_schedule(doc);
}

inline nlohmann::json schedule_to_json(const Schedule& s)
{
    nlohmann::json doc;
    const auto n = s.matrices.empty() ? 0 : s.matrices.front().rows();
    doc["dimension"] = n;
    doc["hbar"] = s.hbar;
    doc["times"] = nlohmann::json::array();
    doc["matrices"] = nlohmann::json::array();
    for (std::size_t k = 0; k < s.grid.points(); ++k) {
        doc["times"].push_back(s.grid.time(k));
    }
    for (const auto& m : s.matrices) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                row.push_back({m(i, j).real(), m(i, j).imag()});
            }
            rows.push_back(std::move(row));
        }
        doc["matrices"].push_back(std::move(rows));
    }
    return doc;
}

inline HamiltonianModel schedule_model(const Schedule& s, double hermiticity_tol = kDefaultHermiticityTol)
{
    return sampled_model(s.grid, s.matrices, s.hbar, hermiticity_tol);
}

} // namespace adiacheck
