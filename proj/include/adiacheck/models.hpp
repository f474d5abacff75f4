#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adiacheck/errors.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/time_grid.hpp"

namespace adiacheck {

inline constexpr double kDefaultHermiticityTol = 1e-10;

/// Parameters of the four-level model in a field of constant magnitude rotating about z.
struct GammaParams {
    double b = 1.0;          ///< coupling angular frequency, > 0
    double w = 0.1;          ///< rotation angular frequency, >= 0
    double theta = 1.0;      ///< polar angle in [0, pi]
    double hbar = 1.0;
    double total_time = 10.0;

    void validate() const
    {
        if (!(b > 0.0)) {
            throw InvalidInput("GammaParams: b must be positive");
        }
        if (!(w >= 0.0)) {
            throw InvalidInput("GammaParams: w must be non-negative");
        }
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
            throw InvalidInput("GammaParams: theta must lie in [0, pi]");
        }
        if (!(hbar > 0.0)) {
            throw InvalidInput("GammaParams: hbar must be positive");
        }
        if (!(total_time > 0.0)) {
            throw InvalidInput("GammaParams: total_time must be positive");
        }
    }
};

using MatrixFunction = std::function<Matrix(double)>;

/// A time-dependent Hermitian operator H(t), optionally with its derivative and a
/// preferred eigenframe convention. Immutable after construction.
///
/// The reference frame, when present, maps t to an N x N unitary whose columns are
/// eigenvectors of H(t) grouped by level in ascending energy. Spectral analysis
/// rotates its frames onto it so that gauge-dependent quantities follow that convention.
class HamiltonianModel {
public:
    HamiltonianModel(std::size_t dimension, double hbar, MatrixFunction evaluate,
                     MatrixFunction derivative = {}, MatrixFunction reference_frame = {},
                     double hermiticity_tol = kDefaultHermiticityTol)
        : dimension_(dimension), hbar_(hbar), hermiticity_tol_(hermiticity_tol),
          evaluate_(std::move(evaluate)), derivative_(std::move(derivative)),
          reference_frame_(std::move(reference_frame))
    {
        if (dimension_ == 0) {
            throw InvalidInput("HamiltonianModel: dimension must be positive");
        }
        if (!(hbar_ > 0.0)) {
            throw InvalidInput("HamiltonianModel: hbar must be positive");
        }
        if (!evaluate_) {
            throw InvalidInput("HamiltonianModel: evaluate function required");
        }
    }

    std::size_t dimension() const noexcept { return dimension_; }
    double hbar() const noexcept { return hbar_; }
    double hermiticity_tol() const noexcept { return hermiticity_tol_; }

    Matrix evaluate(double t) const { return evaluate_(t); }

    bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }
    Matrix derivative(double t) const
    {
        if (!derivative_) {
            throw InvalidInput("HamiltonianModel: no time derivative available");
        }
        return derivative_(t);
    }

    bool has_reference_frame() const noexcept { return static_cast<bool>(reference_frame_); }
    Matrix reference_frame(double t) const
    {
        if (!reference_frame_) {
            throw InvalidInput("HamiltonianModel: no reference frame available");
        }
        return reference_frame_(t);
    }

private:
    std::size_t dimension_;
    double hbar_;
    double hermiticity_tol_;
    MatrixFunction evaluate_;
    MatrixFunction derivative_;
    MatrixFunction reference_frame_;
};

namespace detail {

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vector kron(const Vector& a, const Vector& b)
{
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

} // namespace detail

/// Standard Pauli matrices (sigma_x, sigma_y, sigma_z).
inline std::array<Matrix, 3> pauli_matrices()
{
    Matrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, -kI, kI, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    return {sx, sy, sz};
}

/// Dirac matrices Gamma_j = sigma_x (x) sigma_j, j = x, y, z.
inline std::array<Matrix, 3> gamma_matrices()
{
    const auto s = pauli_matrices();
    return {detail::kron(s[0], s[0]), detail::kron(s[0], s[1]), detail::kron(s[0], s[2])};
}

/// Pi_k = I_2 (x) sigma_k, the commutator partners of the Gamma matrices.
inline std::array<Matrix, 3> pi_matrices()
{
    const auto s = pauli_matrices();
    const Matrix id = Matrix::Identity(2, 2);
    return {detail::kron(id, s[0]), detail::kron(id, s[1]), detail::kron(id, s[2])};
}

/// Snapshot eigenframe of the Gamma model in the convention of its closed-form solution.
/// Columns are |0^0>, |0^1>, |1^0>, |1^1> (ground pair first).
inline Matrix gamma_reference_frame(const GammaParams& p, double t)
{
    const double c = std::cos(0.5 * p.theta);
    const double s = std::sin(0.5 * p.theta);
    const Complex e = std::polar(1.0, p.w * t);
    const double r = 1.0 / std::numbers::sqrt2;

    Vector plus_x(2), minus_x(2), up(2), down(2);
    plus_x << r, r;
    minus_x << r, -r;
    up << c, e * s;
    down << -s / e, c;

    const Vector px_dn = detail::kron(plus_x, down);
    const Vector px_up = detail::kron(plus_x, up);
    const Vector mx_dn = detail::kron(minus_x, down);
    const Vector mx_up = detail::kron(minus_x, up);

    Matrix f(4, 4);
    f.col(0) = c * px_dn + (s / e) * mx_up;
    f.col(1) = -s * e * px_dn + c * mx_up;
    f.col(2) = -(s / e) * px_up - c * mx_dn;
    f.col(3) = -c * px_up + s * e * mx_dn;
    return f;
}

/// H(t) = (hbar b / 2) r(t).Gamma with r(t) = (sin th cos wt, sin th sin wt, cos th).
inline HamiltonianModel gamma_hamiltonian(const GammaParams& params)
{
    params.validate();
    const auto g = gamma_matrices();
    const double scale = 0.5 * params.hbar * params.b;
    const double st = std::sin(params.theta);
    const double ct = std::cos(params.theta);
    const double w = params.w;

    auto evaluate = [g, scale, st, ct, w](double t) -> Matrix {
        return scale * (st * std::cos(w * t) * g[0] + st * std::sin(w * t) * g[1] + ct * g[2]);
    };
    auto derivative = [g, scale, st, w](double t) -> Matrix {
        return (scale * st * w) * (-std::sin(w * t) * g[0] + std::cos(w * t) * g[1]);
    };
    auto frame = [params](double t) { return gamma_reference_frame(params, t); };
    return HamiltonianModel(4, params.hbar, evaluate, derivative, frame);
}

/// Piecewise-linear model through Hermitian samples on a uniform grid. The derivative is
/// the linear interpolant of nodal second-order finite differences.
inline HamiltonianModel sampled_model(const TimeGrid& grid, std::vector<Matrix> samples,
                                      double hbar = 1.0,
                                      double hermiticity_tol = kDefaultHermiticityTol)
{
    if (samples.size() != grid.points()) {
        throw DimensionMismatch("sampled_model: " + std::to_string(samples.size()) +
                                " samples for " + std::to_string(grid.points()) + " grid points");
    }
    const Eigen::Index n = samples.front().rows();
    if (n == 0) {
        throw DimensionMismatch("sampled_model: empty sample matrix");
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k].rows() != n || samples[k].cols() != n) {
            throw DimensionMismatch("sampled_model: sample " + std::to_string(k) + " is " +
                                    std::to_string(samples[k].rows()) + "x" +
                                    std::to_string(samples[k].cols()) + ", expected " +
                                    std::to_string(n) + "x" + std::to_string(n));
        }
        const double defect = hermiticity_defect(samples[k]);
        if (defect > hermiticity_tol) {
            throw NonHermitian("sampled_model: sample " + std::to_string(k) +
                               " deviates from Hermitian by " + std::to_string(defect));
        }
        // Symmetrize away sub-tolerance noise.
        samples[k] = (0.5 * (samples[k] + samples[k].adjoint())).eval();
    }

    const std::size_t last = samples.size() - 1;
    const double dt = grid.dt();
    std::vector<Matrix> slopes(samples.size());
    for (std::size_t k = 0; k <= last; ++k) {
        if (k == 0) {
            slopes[k] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * dt);
        } else if (k == last) {
            slopes[k] = (3.0 * samples[last] - 4.0 * samples[last - 1] + samples[last - 2]) / (2.0 * dt);
        } else {
            slopes[k] = (samples[k + 1] - samples[k - 1]) / (2.0 * dt);
        }
    }

    auto interpolate = [grid, last](const std::vector<Matrix>& nodes, double t) -> Matrix {
        const double span = grid.t_end() - grid.t_start();
        const double slack = 1e-12 * span;
        if (t < grid.t_start() - slack || t > grid.t_end() + slack) {
            throw InvalidInput("sampled_model: t = " + std::to_string(t) + " outside schedule");
        }
        const double x = std::clamp((t - grid.t_start()) / grid.dt(), 0.0, static_cast<double>(last));
        const auto k = std::min(static_cast<std::size_t>(x), last - 1);
        const double frac = x - static_cast<double>(k);
        return (1.0 - frac) * nodes[k] + frac * nodes[k + 1];
    };

    auto shared_samples = std::make_shared<const std::vector<Matrix>>(std::move(samples));
    auto shared_slopes = std::make_shared<const std::vector<Matrix>>(std::move(slopes));
    auto evaluate = [interpolate, shared_samples](double t) { return interpolate(*shared_samples, t); };
    auto derivative = [interpolate, shared_slopes](double t) { return interpolate(*shared_slopes, t); };
    return HamiltonianModel(static_cast<std::size_t>(n), hbar, evaluate, derivative, {},
                            hermiticity_tol);
}

/// Samples any model on a grid; convenient for building schedules from analytic models.
inline std::vector<Matrix> sample(const HamiltonianModel& model, const TimeGrid& grid)
{
    std::vector<Matrix> out;
    out.reserve(grid.points());
    for (std::size_t k = 0; k < grid.points(); ++k) {
        out.push_back(model.evaluate(grid.time(k)));
    }
    return out;
}

} // namespace adiacheck
