#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adiacheck/errors.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/spectral.hpp"
#include "adiacheck/time_grid.hpp"

namespace adiacheck {

/// Cumulative trapezoidal integral of E_n(t)/hbar over the grid; entry k is omega_n(t_k).
inline std::vector<double> dynamical_phases(const LevelStructure& structure, const TimeGrid& grid,
                                            double hbar, std::size_t n)
{
    const auto& e = structure.energies.at(n);
    std::vector<double> omega(e.size(), 0.0);
    const double half = 0.5 * grid.dt() / hbar;
    for (std::size_t k = 1; k < e.size(); ++k) {
        omega[k] = omega[k - 1] + half * (e[k - 1] + e[k]);
    }
    return omega;
}

inline double dynamical_phase(const SnapshotSpectrum& spectrum, std::size_t n, std::size_t k)
{
    if (k >= spectrum.points()) {
        throw InvalidInput("dynamical_phase: grid index out of range");
    }
    return dynamical_phases(spectrum.structure, spectrum.grid, spectrum.model.hbar(), n)[k];
}

/// Wilczek-Zee unitary U^n(t_k) of one level on a grid.
struct Holonomy {
    std::size_t level = 0;
    TimeGrid grid;
    std::vector<Matrix> values;

    const Matrix& initial() const { return values.front(); }
    const Matrix& at(std::size_t k) const { return values.at(k); }
};

struct HolonomyOptions {
    std::size_t reunitarize_every = 1000; ///< polar projection period; 0 disables it
    double anti_hermitian_abs_tol = 1e-6;
    double anti_hermitian_rel_tol = 1e-3;
    double connection_scale = 0.0;        ///< magnitude the relative tolerance refers to; 0: per block
};

/// Time-ordered product U(t_{k+1}) = U(t_k) exp(A_{k+1/2} dt) with A = conj(M^{nn}) sampled
/// at the interval midpoint as the average of its endpoint values.
inline Holonomy wz_holonomy(std::size_t level, const TimeGrid& grid, std::span<const Matrix> blocks,
                            const Matrix& initial, const HolonomyOptions& options = {})
{
    if (blocks.size() != grid.points()) {
        throw DimensionMismatch("wz_holonomy: " + std::to_string(blocks.size()) +
                                " overlap blocks for " + std::to_string(grid.points()) + " grid points");
    }
    const Eigen::Index d = initial.rows();
    if (initial.cols() != d || unitarity_defect(initial) > 1e-9) {
        throw InvalidInput("wz_holonomy: initial matrix is not unitary");
    }
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const Matrix& m = blocks[k];
        if (m.rows() != d || m.cols() != d) {
            throw DimensionMismatch("wz_holonomy: overlap block " + std::to_string(k) + " has wrong shape");
        }
        const double defect = anti_hermiticity_defect(m);
        const double scale = std::max(options.connection_scale, m.cwiseAbs().maxCoeff());
        if (defect > options.anti_hermitian_abs_tol + options.anti_hermitian_rel_tol * scale) {
            throw InvalidInput("wz_holonomy: connection is not anti-Hermitian at grid point " +
                               std::to_string(k) + " (defect " + std::to_string(defect) +
                               "); check the overlap blocks or refine the grid");
        }
    }

    Holonomy out{level, grid, {}};
    out.values.reserve(blocks.size());
    out.values.push_back(initial);
    const double dt = grid.dt();
    Matrix u = initial;
    for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
        const Matrix a = (0.5 * (blocks[k] + blocks[k + 1])).conjugate();
        u = (u * anti_hermitian_exp(a, dt)).eval();
        if (options.reunitarize_every != 0 && (k + 1) % options.reunitarize_every == 0) {
            u = polar_unitary(u);
        }
        out.values.push_back(u);
    }
    return out;
}

/// Holonomy of level n from finite-difference diagonal overlap blocks of a smoothed spectrum.
inline Holonomy level_holonomy(const SnapshotSpectrum& spectrum, std::size_t n,
                               const std::optional<Matrix>& initial = std::nullopt,
                               const HolonomyOptions& options = {})
{
    const auto d = static_cast<Eigen::Index>(spectrum.structure.multiplicities.at(n));
    const auto blocks = overlap_series(spectrum, n, n);
    // Finite-difference defects scale with the full frame velocity, not just its in-level part.
    HolonomyOptions opts = options;
    for (std::size_t k = 0; k < spectrum.points(); ++k) {
        opts.connection_scale =
            std::max(opts.connection_scale, frame_derivative(spectrum, n, k).cwiseAbs().maxCoeff());
    }
    return wz_holonomy(n, spectrum.grid, blocks, initial.value_or(Matrix::Identity(d, d)), opts);
}

/// Zeroth-order (degenerate adiabatic) state on the grid.
struct DaaState {
    TimeGrid grid;
    std::vector<Complex> initial_amplitudes;
    std::size_t row = 0;
    /// coefficients[k][n]: coefficient row over level n's frame columns at t_k.
    std::vector<std::vector<Vector>> coefficients;
    /// Assembled N-vector per grid point.
    std::vector<Vector> states;
};

inline DaaState daa_state(const SnapshotSpectrum& spectrum, std::span<const Holonomy> holonomies,
                          std::span<const Complex> amplitudes, std::size_t row = 0)
{
    const auto& st = spectrum.structure;
    if (amplitudes.size() != st.level_count()) {
        throw DimensionMismatch("daa_state: expected " + std::to_string(st.level_count()) +
                                " level amplitudes, got " + std::to_string(amplitudes.size()));
    }
    double norm2 = 0.0;
    for (const auto& b : amplitudes) {
        norm2 += std::norm(b);
    }
    if (std::abs(norm2 - 1.0) > 1e-9) {
        throw InvalidInput("daa_state: level amplitudes are not normalized (sum |b|^2 = " +
                           std::to_string(norm2) + ")");
    }

    std::vector<const Holonomy*> by_level(st.level_count(), nullptr);
    for (const auto& h : holonomies) {
        if (h.level < by_level.size()) {
            by_level[h.level] = &h;
        }
    }
    std::vector<std::vector<double>> omega(st.level_count());
    for (std::size_t n = 0; n < st.level_count(); ++n) {
        if (amplitudes[n] == Complex{}) {
            continue;
        }
        if (by_level[n] == nullptr) {
            throw InvalidInput("daa_state: missing holonomy for populated level " + std::to_string(n));
        }
        if (by_level[n]->values.size() != spectrum.points()) {
            throw DimensionMismatch("daa_state: holonomy of level " + std::to_string(n) +
                                    " is on a different grid");
        }
        if (row >= st.multiplicities[n]) {
            throw InvalidInput("daa_state: initial-condition row exceeds level multiplicity");
        }
        omega[n] = dynamical_phases(st, spectrum.grid, spectrum.model.hbar(), n);
    }

    DaaState out{spectrum.grid, {amplitudes.begin(), amplitudes.end()}, row, {}, {}};
    const auto dim = static_cast<Eigen::Index>(spectrum.model.dimension());
    out.coefficients.resize(spectrum.points());
    out.states.reserve(spectrum.points());
    for (std::size_t k = 0; k < spectrum.points(); ++k) {
        Vector psi = Vector::Zero(dim);
        auto& rows = out.coefficients[k];
        rows.resize(st.level_count());
        for (std::size_t n = 0; n < st.level_count(); ++n) {
            const auto d = static_cast<Eigen::Index>(st.multiplicities[n]);
            if (amplitudes[n] == Complex{}) {
                rows[n] = Vector::Zero(d);
                continue;
            }
            const Complex phase = std::polar(1.0, -omega[n][k]) * amplitudes[n];
            rows[n] = phase * by_level[n]->values[k].row(static_cast<Eigen::Index>(row)).transpose();
            psi += spectrum.frames[n][k] * rows[n];
        }
        out.states.push_back(std::move(psi));
    }
    return out;
}

} // namespace adiacheck
