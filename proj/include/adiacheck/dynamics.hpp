#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "adiacheck/errors.hpp"
#include "adiacheck/linalg.hpp"
#include "adiacheck/models.hpp"
#include "adiacheck/spectral.hpp"
#include "adiacheck/time_grid.hpp"

namespace adiacheck {

/// States psi(t_k) on a grid.
struct WaveTrajectory {
    TimeGrid grid;
    std::vector<Vector> states;
};

struct PropagateOptions {
    double norm_tol = 1e-9;    ///< accepted deviation of ||psi0|| from 1
    std::size_t store_stride = 1; ///< keep every stride-th state; must divide the step count
};

/// Midpoint exponential integrator psi_{k+1} = exp(-i H(t_k + dt/2) dt / hbar) psi_k.
inline WaveTrajectory propagate(const HamiltonianModel& model, const Vector& psi0,
                                const TimeGrid& grid, const PropagateOptions& options = {})
{
    if (psi0.size() != static_cast<Eigen::Index>(model.dimension())) {
        throw DimensionMismatch("propagate: initial state has dimension " +
                                std::to_string(psi0.size()) + ", model has " +
                                std::to_string(model.dimension()));
    }
    if (std::abs(psi0.norm() - 1.0) > options.norm_tol) {
        throw InvalidInput("propagate: initial state is not normalized");
    }
    const TimeGrid stored = grid.coarsened(options.store_stride);
    WaveTrajectory out{stored, {}};
    out.states.reserve(stored.points());
    out.states.push_back(psi0);

    const double dt = grid.dt();
    const double tau = dt / model.hbar();
    Vector psi = psi0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const double t_mid = grid.t_start() + (static_cast<double>(k) + 0.5) * dt;
        const Matrix h = model.evaluate(t_mid);
        if (hermiticity_defect(h) > model.hermiticity_tol()) {
            throw NonHermitian("propagate: H(t) not Hermitian at t = " + std::to_string(t_mid));
        }
        psi = unitary_exp(h, tau) * psi;
        if ((k + 1) % options.store_stride == 0) {
            out.states.push_back(psi);
        }
    }
    return out;
}

/// Closed-form snapshot-basis coefficients of the Gamma model started in |0^0(0)>.
struct GammaExactCoefficients {
    double t = 0.0;
    /// c_00, c_01, c_10, c_11: amplitudes on |0^0>, |0^1>, |1^0>, |1^1>.
    std::array<Complex, 4> c{};
    Complex a_plus, a_minus, b_plus, b_minus;
    double omega_plus = 0.0;
    double omega_minus = 0.0;
};

inline GammaExactCoefficients gamma_exact(const GammaParams& p, double t)
{
    const double b = p.b;
    const double w = p.w;
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    const double op2 = w * w + b * b + 2.0 * w * b * ct;
    const double om2 = w * w + b * b - 2.0 * w * b * ct;
    const double tiny = 1e-24 * (w * w + b * b);
    if (op2 <= tiny || om2 <= tiny) {
        throw SingularParameter("gamma_exact: Omega_+ or Omega_- vanishes (w = b with cos(theta) = -/+1)");
    }

    GammaExactCoefficients r;
    r.t = t;
    r.omega_plus = std::sqrt(op2);
    r.omega_minus = std::sqrt(om2);
    auto a_fn = [&](double omega, double sign) {
        return Complex{std::cos(0.5 * omega * t), (b + sign * w * ct) * std::sin(0.5 * omega * t) / omega};
    };
    auto b_fn = [&](double omega) { return Complex{0.0, w * std::sin(0.5 * omega * t) / omega}; };
    r.a_plus = a_fn(r.omega_plus, 1.0);
    r.a_minus = a_fn(r.omega_minus, -1.0);
    r.b_plus = b_fn(r.omega_plus);
    r.b_minus = b_fn(r.omega_minus);

    const Complex ep = std::polar(1.0, 0.5 * w * t);
    const Complex em = std::conj(ep);
    r.c[0] = ep * ((1.0 + ct) * r.a_minus + (1.0 - ct) * r.a_plus) / 2.0;
    r.c[1] = em * st * (r.a_plus - r.a_minus) / 2.0;
    r.c[2] = ep * st * st * (r.b_plus + r.b_minus) / 2.0;
    r.c[3] = em * st * ((1.0 + ct) * r.b_minus - (1.0 - ct) * r.b_plus) / 2.0;
    return r;
}

/// The exact Gamma-model state expressed in the fixed lab basis.
inline Vector gamma_exact_state(const GammaParams& p, double t)
{
    const auto r = gamma_exact(p, t);
    Vector c(4);
    c << r.c[0], r.c[1], r.c[2], r.c[3];
    return gamma_reference_frame(p, t) * c;
}

/// |<psi|phi>| for unit vectors.
inline double fidelity(const Vector& psi, const Vector& phi, double norm_tol = 1e-8)
{
    if (psi.size() != phi.size()) {
        throw DimensionMismatch("fidelity: vectors differ in dimension");
    }
    if (std::abs(psi.norm() - 1.0) > norm_tol || std::abs(phi.norm() - 1.0) > norm_tol) {
        throw InvalidInput("fidelity: inputs must be normalized");
    }
    return std::clamp(std::abs(psi.dot(phi)), 0.0, 1.0);
}

namespace detail {

/// Strides (a, b) such that index a*i of grid x and b*i of grid y refer to the same time.
inline std::pair<std::size_t, std::size_t> common_strides(const TimeGrid& x, const TimeGrid& y)
{
    const double span = x.t_end() - x.t_start();
    if (std::abs(x.t_start() - y.t_start()) > 1e-12 * span ||
        std::abs(x.t_end() - y.t_end()) > 1e-12 * span) {
        throw DimensionMismatch("grids cover different time intervals");
    }
    if (x.steps() % y.steps() == 0) {
        return {x.steps() / y.steps(), 1};
    }
    if (y.steps() % x.steps() == 0) {
        return {1, y.steps() / x.steps()};
    }
    throw DimensionMismatch("grid step counts are not nested");
}

} // namespace detail

/// Max norm of F_n(t)^dagger psi(t) on the coarser of the two grids.
inline std::vector<double> excited_leakage(const WaveTrajectory& trajectory,
                                           const SnapshotSpectrum& spectrum, std::size_t n)
{
    if (n >= spectrum.structure.level_count()) {
        throw InvalidInput("excited_leakage: level " + std::to_string(n) + " does not exist");
    }
    const auto [ts, ss] = detail::common_strides(trajectory.grid, spectrum.grid);
    const std::size_t count = std::min((trajectory.states.size() - 1) / ts, (spectrum.points() - 1) / ss) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vector proj = spectrum.frames[n][i * ss].adjoint() * trajectory.states[i * ts];
        out.push_back(proj.cwiseAbs().maxCoeff());
    }
    return out;
}

} // namespace adiacheck
