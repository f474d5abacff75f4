#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "adiacheck/errors.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/time_grid.hpp"

namespace adiacheck {

/// Degenerate levels in ascending energy; level 0 is the ground eigenspace.
struct LevelStructure {
    std::vector<std::size_t> multiplicities;
    std::vector<std::vector<double>> energies; ///< [level][grid point]

    std::size_t level_count() const noexcept { return multiplicities.size(); }

    /// Column offset of a level inside a full eigenframe.
    std::size_t offset(std::size_t level) const
    {
        std::size_t off = 0;
        for (std::size_t n = 0; n < level; ++n) {
            off += multiplicities.at(n);
        }
        return off;
    }

    /// Delta_{nm}(t_k) = E_n(t_k) - E_m(t_k).
    double gap(std::size_t n, std::size_t m, std::size_t k) const
    {
        return energies.at(n).at(k) - energies.at(m).at(k);
    }
};

enum class FrameGauge { Solver, ParallelTransport, Reference };

/// Snapshot eigenframes on a grid: frames[n][k] is an N x d_n matrix with orthonormal columns.
struct SnapshotSpectrum {
    HamiltonianModel model;
    TimeGrid grid;
    LevelStructure structure;
    std::vector<std::vector<Matrix>> frames;
    FrameGauge gauge = FrameGauge::Solver;

    std::size_t points() const noexcept { return frames.empty() ? 0 : frames.front().size(); }
};

struct SpectralOptions {
    double group_tol = 1e-8;   ///< relative to ||H||_max
    double min_overlap = 0.5;  ///< smallest singular value allowed between consecutive frames
    bool use_reference = true; ///< rotate onto the model's reference frame when it has one
};

namespace detail {

inline std::vector<std::size_t> cluster_sizes(const Eigen::VectorXd& sorted, double tol)
{
    std::vector<std::size_t> sizes{1};
    for (Eigen::Index i = 1; i < sorted.size(); ++i) {
        if (sorted(i) - sorted(i - 1) <= tol) {
            ++sizes.back();
        } else {
            sizes.push_back(1);
        }
    }
    return sizes;
}

inline std::string format_sizes(const std::vector<std::size_t>& sizes)
{
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        out << (i ? "," : "") << sizes[i];
    }
    out << ']';
    return out.str();
}

} // namespace detail

/// Diagonalizes H(t_k) on every grid point and groups eigenvalues into degenerate levels.
/// Frames are returned in whatever gauge the eigensolver produced.
inline SnapshotSpectrum snapshot_decompose(const HamiltonianModel& model, const TimeGrid& grid,
                                           double group_tol = 1e-8)
{
    if (model.dimension() < 2) {
        throw InvalidInput("snapshot_decompose: model dimension must be at least 2");
    }
    SnapshotSpectrum spec{model, grid, {}, {}, FrameGauge::Solver};
    const std::size_t points = grid.points();

    for (std::size_t k = 0; k < points; ++k) {
        const double t = grid.time(k);
        const Matrix h = model.evaluate(t);
        if (h.rows() != static_cast<Eigen::Index>(model.dimension()) || h.cols() != h.rows()) {
            throw DimensionMismatch("snapshot_decompose: H(t) has wrong shape at t = " +
                                    std::to_string(t));
        }
        if (hermiticity_defect(h) > model.hermiticity_tol()) {
            throw NonHermitian("snapshot_decompose: H(t) not Hermitian at t = " + std::to_string(t));
        }
        const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Eigen::VectorXd& ev = es.eigenvalues(); // ascending
        const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
        const auto sizes = detail::cluster_sizes(ev, group_tol * scale);

        if (k == 0) {
            spec.structure.multiplicities = sizes;
            spec.structure.energies.assign(sizes.size(), std::vector<double>(points));
            spec.frames.assign(sizes.size(), std::vector<Matrix>(points));
        } else if (sizes != spec.structure.multiplicities) {
            std::ostringstream msg;
            msg << "snapshot_decompose: level multiplicities changed from "
                << detail::format_sizes(spec.structure.multiplicities) << " to "
                << detail::format_sizes(sizes) << " in grid interval [" << grid.time(k - 1) << ", "
                << t << "]";
            throw MultiplicityChange(msg.str(), grid.time(k - 1), t);
        }

        Eigen::Index col = 0;
        for (std::size_t n = 0; n < sizes.size(); ++n) {
            const auto d = static_cast<Eigen::Index>(sizes[n]);
            spec.structure.energies[n][k] = ev.segment(col, d).mean();
            spec.frames[n][k] = es.eigenvectors().middleCols(col, d);
            col += d;
        }
    }
    return spec;
}

/// Discrete parallel transport: each frame is rotated within its eigenspace to the closest
/// alignment with its predecessor. The first frame is left unchanged.
inline SnapshotSpectrum smooth_frames(SnapshotSpectrum spectrum, double min_overlap = 0.5)
{
    for (std::size_t n = 0; n < spectrum.frames.size(); ++n) {
        auto& level = spectrum.frames[n];
        for (std::size_t k = 1; k < level.size(); ++k) {
            const Matrix overlap = level[k].adjoint() * level[k - 1];
            const double sigma = smallest_singular_value(overlap);
            if (sigma < min_overlap) {
                std::ostringstream msg;
                msg << "smooth_frames: eigenspace of level " << n << " rotates too far between t = "
                    << spectrum.grid.time(k - 1) << " and t = " << spectrum.grid.time(k)
                    << " (overlap singular value " << sigma << "); refine the grid";
                throw GridTooCoarse(msg.str());
            }
            level[k] = (level[k] * polar_unitary(overlap)).eval();
        }
    }
    if (spectrum.points() > 1) {
        spectrum.gauge = FrameGauge::ParallelTransport;
    }
    return spectrum;
}

/// Rotates every frame within its eigenspace onto the model's reference frame.
inline SnapshotSpectrum apply_reference_gauge(SnapshotSpectrum spectrum)
{
    const auto& model = spectrum.model;
    if (!model.has_reference_frame()) {
        throw InvalidInput("apply_reference_gauge: model has no reference frame");
    }
    const auto& st = spectrum.structure;
    for (std::size_t k = 0; k < spectrum.points(); ++k) {
        const double t = spectrum.grid.time(k);
        const Matrix ref = model.reference_frame(t);
        for (std::size_t n = 0; n < st.level_count(); ++n) {
            const auto off = static_cast<Eigen::Index>(st.offset(n));
            const auto d = static_cast<Eigen::Index>(st.multiplicities[n]);
            const Matrix overlap = spectrum.frames[n][k].adjoint() * ref.middleCols(off, d);
            if (smallest_singular_value(overlap) < 0.99) {
                throw InvalidInput("apply_reference_gauge: reference frame does not span level " +
                                   std::to_string(n) + " at t = " + std::to_string(t));
            }
            spectrum.frames[n][k] = (spectrum.frames[n][k] * polar_unitary(overlap)).eval();
        }
    }
    spectrum.gauge = FrameGauge::Reference;
    return spectrum;
}

/// Decompose, smooth, and (when the model defines one) adopt the reference gauge.
inline SnapshotSpectrum build_spectrum(const HamiltonianModel& model, const TimeGrid& grid,
                                       const SpectralOptions& options = {})
{
    auto spectrum = smooth_frames(snapshot_decompose(model, grid, options.group_tol),
                                  options.min_overlap);
    if (options.use_reference && model.has_reference_frame()) {
        spectrum = apply_reference_gauge(std::move(spectrum));
    }
    return spectrum;
}

enum class OverlapMethod { FiniteDifference, Hdot };

/// Entries (h, g) = <n^h(t_k)| d/dt m^g(t_k)>, a d_n x d_m matrix in units of 1/time.
struct OverlapBlock {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 0;
    Matrix entries;
};

/// Time derivative of level m's frame at grid point k, second order everywhere.
inline Matrix frame_derivative(const SnapshotSpectrum& spectrum, std::size_t m, std::size_t k)
{
    const auto& f = spectrum.frames.at(m);
    const std::size_t last = f.size() - 1;
    if (f.size() < 3) {
        throw InvalidInput("frame_derivative: at least three grid points required");
    }
    const double dt = spectrum.grid.dt();
    if (k == 0) {
        return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    }
    if (k == last) {
        return (3.0 * f[last] - 4.0 * f[last - 1] + f[last - 2]) / (2.0 * dt);
    }
    return (f[k + 1] - f[k - 1]) / (2.0 * dt);
}

inline OverlapBlock overlap_block(const SnapshotSpectrum& spectrum, std::size_t n, std::size_t m,
                                  std::size_t k,
                                  OverlapMethod method = OverlapMethod::FiniteDifference)
{
    const auto levels = spectrum.structure.level_count();
    if (n >= levels || m >= levels) {
        throw InvalidInput("overlap_block: level index out of range");
    }
    if (k >= spectrum.points()) {
        throw InvalidInput("overlap_block: grid index out of range");
    }
    OverlapBlock block{n, m, k, {}};
    if (method == OverlapMethod::FiniteDifference) {
        block.entries = spectrum.frames[n][k].adjoint() * frame_derivative(spectrum, m, k);
        return block;
    }
    if (n == m) {
        throw InvalidInput("overlap_block: the hdot method cannot produce a diagonal block "
                           "(the intra-level connection is gauge dependent)");
    }
    const Matrix hdot = spectrum.model.derivative(spectrum.grid.time(k));
    const double gap = spectrum.structure.gap(m, n, k);
    block.entries = spectrum.frames[n][k].adjoint() * hdot * spectrum.frames[m][k] / gap;
    return block;
}

/// overlap_block over every grid point.
inline std::vector<Matrix> overlap_series(const SnapshotSpectrum& spectrum, std::size_t n,
                                          std::size_t m,
                                          OverlapMethod method = OverlapMethod::FiniteDifference)
{
    std::vector<Matrix> out;
    out.reserve(spectrum.points());
    for (std::size_t k = 0; k < spectrum.points(); ++k) {
        out.push_back(overlap_block(spectrum, n, m, k, method).entries);
    }
    return out;
}

/// The full N x N frame at grid point k, levels stacked in ascending order.
inline Matrix full_frame(const SnapshotSpectrum& spectrum, std::size_t k)
{
    const auto n = static_cast<Eigen::Index>(spectrum.model.dimension());
    Matrix f(n, n);
    Eigen::Index col = 0;
    for (const auto& level : spectrum.frames) {
        f.middleCols(col, level[k].cols()) = level[k];
        col += level[k].cols();
    }
    return f;
}

} // namespace adiacheck
