#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adiacheck/dynamics.hpp"
#include "adiacheck/holonomy.hpp"

using namespace adiacheck;

namespace {

constexpr double kPi = std::numbers::pi;

SnapshotSpectrum gamma_spectrum(const GammaParams& p, std::size_t steps)
{
    return build_spectrum(gamma_hamiltonian(p), TimeGrid(0.0, p.total_time, steps));
}

double u00_mag(const GammaParams& p, double t)
{
    const double s = std::sin(p.w * t * std::cos(p.theta) / 2.0);
    return std::sqrt(1.0 - std::pow(std::sin(p.theta) * s, 2));
}

double u01_mag(const GammaParams& p, double t)
{
    return std::sin(p.theta) * std::abs(std::sin(p.w * t * std::cos(p.theta) / 2.0));
}

double magnitude_error(const GammaParams& p, const Holonomy& u, std::size_t k)
{
    const double t = u.grid.time(k);
    return std::max(std::abs(std::abs(u.at(k)(0, 0)) - u00_mag(p, t)),
                    std::abs(std::abs(u.at(k)(0, 1)) - u01_mag(p, t)));
}

} // namespace

TEST(DynamicalPhase, EmptyIntegralAtStart)
{
    const auto s = gamma_spectrum({}, 100);
    EXPECT_EQ(dynamical_phase(s, 0, 0), 0.0);
    EXPECT_EQ(dynamical_phase(s, 1, 0), 0.0);
}

TEST(DynamicalPhase, ConstantGroundEnergy)
{
    const GammaParams p{1.7, 0.2, 0.9, 1.0, 6.0};
    const auto s = gamma_spectrum(p, 600);
    for (std::size_t k = 0; k < s.points(); k += 50) {
        EXPECT_NEAR(dynamical_phase(s, 0, k), -p.b * s.grid.time(k) / 2.0, 1e-11);
    }
}

TEST(DynamicalPhase, TrapezoidRuleIsSecondOrder)
{
    // E(t) = t^2 on a non-degenerate two-level model; exact phase t^3 / 3.
    const HamiltonianModel model(2, 1.0, [](double t) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = t * t;
        h(1, 1) = t * t + 5.0;
        return h;
    });
    auto err = [&](std::size_t steps) {
        const auto s = build_spectrum(model, TimeGrid(0.0, 2.0, steps));
        return std::abs(dynamical_phase(s, 0, steps) - 8.0 / 3.0);
    };
    EXPECT_NEAR(err(50) / err(100), 4.0, 0.05);
}

TEST(WzHolonomy, ZeroConnectionGivesIdentity)
{
    const TimeGrid grid(0.0, 1.0, 100);
    const std::vector<Matrix> blocks(grid.points(), Matrix::Zero(3, 3));
    const auto u = wz_holonomy(0, grid, blocks, Matrix::Identity(3, 3));
    for (const auto& v : u.values) {
        EXPECT_EQ((v - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(WzHolonomy, ConstantConnectionIsExponential)
{
    // Row dynamics U' = U conj(M) with constant M has the closed form exp(conj(M) t).
    Matrix m(2, 2);
    m << Complex(0.0, 0.3), Complex(0.2, 0.1), Complex(-0.2, 0.1), Complex(0.0, -0.5);
    const TimeGrid grid(0.0, 2.0, 200);
    const std::vector<Matrix> blocks(grid.points(), m);
    const auto u = wz_holonomy(0, grid, blocks, Matrix::Identity(2, 2));
    const Matrix expected = anti_hermitian_exp(m.conjugate(), 2.0);
    EXPECT_LT((u.at(grid.steps()) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WzHolonomy, RejectsBadInput)
{
    const TimeGrid grid(0.0, 1.0, 10);
    std::vector<Matrix> blocks(grid.points(), Matrix::Zero(2, 2));
    blocks[4](0, 1) = 1.0; // Hermitian part, not a connection
    EXPECT_THROW(wz_holonomy(0, grid, blocks, Matrix::Identity(2, 2)), InvalidInput);
    blocks[4].setZero();
    EXPECT_THROW(wz_holonomy(0, grid, blocks, 2.0 * Matrix::Identity(2, 2)), InvalidInput);
    blocks.pop_back();
    EXPECT_THROW(wz_holonomy(0, grid, blocks, Matrix::Identity(2, 2)), DimensionMismatch);
}

TEST(WzHolonomy, GammaMagnitudesMatchClosedForm)
{
    for (double theta : {kPi / 6, kPi / 3, 1.0, 2.0}) {
        const GammaParams p{1.0, 0.1, theta, 1.0, 10.0};
        const auto s = gamma_spectrum(p, 10000);
        const auto u = level_holonomy(s, 0);
        double worst = 0.0;
        for (std::size_t k = 0; k < s.points(); ++k) {
            worst = std::max(worst, magnitude_error(p, u, k));
        }
        EXPECT_LE(worst, 1e-6) << "theta = " << theta;
    }
}

TEST(WzHolonomy, EquatorialHolonomyIsDiagonalInMagnitude)
{
    const GammaParams p{1.0, 0.1, kPi / 2, 1.0, 10.0};
    const auto u = level_holonomy(gamma_spectrum(p, 5000), 0);
    for (std::size_t k = 0; k < u.values.size(); k += 100) {
        EXPECT_NEAR(std::abs(u.at(k)(0, 0)), 1.0, 1e-9);
        EXPECT_LE(std::abs(u.at(k)(0, 1)), 1e-9);
    }
}

TEST(WzHolonomy, UnitarityDrift)
{
    const GammaParams p{1.0, 0.3, 1.0, 1.0, 100.0};
    const auto s = gamma_spectrum(p, 100000);
    for (std::size_t every : {1000ul, 0ul}) {
        HolonomyOptions opts;
        opts.reunitarize_every = every;
        const auto u = level_holonomy(s, 0, std::nullopt, opts);
        double worst = 0.0;
        for (const auto& v : u.values) {
            worst = std::max(worst, unitarity_defect(v));
        }
        EXPECT_LE(worst, 1e-8);
    }
}

TEST(WzHolonomy, SecondOrderConvergence)
{
    const GammaParams p{1.0, 0.4, 1.0, 1.0, 5.0};
    auto err = [&](std::size_t steps) {
        const auto u = level_holonomy(gamma_spectrum(p, steps), 0);
        return magnitude_error(p, u, steps);
    };
    const double e1 = err(100);
    const double e2 = err(200);
    EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(DaaState, InitialStateIsGroundFrameColumn)
{
    const GammaParams p{1.0, 0.2, 1.0, 1.0, 5.0};
    const auto s = gamma_spectrum(p, 500);
    const std::vector<Holonomy> hol{level_holonomy(s, 0)};
    const std::vector<Complex> b0{1.0, 0.0};
    const auto daa = daa_state(s, hol, b0);
    EXPECT_LT((daa.states[0] - s.frames[0][0].col(0)).cwiseAbs().maxCoeff(), 1e-15);
    for (const auto& psi : daa.states) {
        EXPECT_NEAR(psi.norm(), 1.0, 1e-9);
    }
}

TEST(DaaState, MixedLevelsStayNormalized)
{
    const GammaParams p{1.0, 0.2, 0.6, 1.0, 5.0};
    const auto s = gamma_spectrum(p, 500);
    const std::vector<Holonomy> hol{level_holonomy(s, 0), level_holonomy(s, 1)};
    const std::vector<Complex> b0{Complex(0.6, 0.0), Complex(0.0, 0.8)};
    const auto daa = daa_state(s, hol, b0, 1);
    for (const auto& psi : daa.states) {
        EXPECT_NEAR(psi.norm(), 1.0, 1e-9);
    }
}

TEST(DaaState, RejectsBadAmplitudes)
{
    const auto s = gamma_spectrum({}, 100);
    const std::vector<Holonomy> hol{level_holonomy(s, 0)};
    const std::vector<Complex> unnormalized{0.9, 0.0};
    EXPECT_THROW(daa_state(s, hol, unnormalized), InvalidInput);
    const std::vector<Complex> needs_level1{0.0, 1.0};
    EXPECT_THROW(daa_state(s, hol, needs_level1), InvalidInput);
    const std::vector<Complex> wrong_count{1.0};
    EXPECT_THROW(daa_state(s, hol, wrong_count), DimensionMismatch);
}

TEST(DaaState, SlowFieldMatchesExactSolution)
{
    const GammaParams p{1.0, 1e-6, 1.0, 1.0, 20.0};
    const auto s = gamma_spectrum(p, 2000);
    const std::vector<Holonomy> hol{level_holonomy(s, 0)};
    const std::vector<Complex> b0{1.0, 0.0};
    const auto daa = daa_state(s, hol, b0);
    for (std::size_t k = 0; k < s.points(); k += 100) {
        const Vector exact = gamma_exact_state(p, s.grid.time(k));
        EXPECT_GE(fidelity(exact, daa.states[k]), 1.0 - 1e-9);
    }
}

TEST(DaaState, GaugeCovariance)
{
    std::mt19937 rng(42);
    std::normal_distribution<double> nd;
    Matrix g(2, 2);
    for (Eigen::Index i = 0; i < 4; ++i) {
        g(i) = Complex{nd(rng), nd(rng)};
    }
    const Matrix v = polar_unitary(g);

    const GammaParams p{1.0, 0.3, 1.1, 1.0, 5.0};
    const auto s = gamma_spectrum(p, 1000);
    auto rotated = s;
    for (auto& f : rotated.frames[0]) {
        f = (f * v).eval();
    }
    const std::vector<Complex> b0{1.0, 0.0};
    const std::vector<Holonomy> h1{level_holonomy(s, 0)};
    const std::vector<Holonomy> h2{level_holonomy(rotated, 0, Matrix(v.conjugate()))};
    const auto a = daa_state(s, h1, b0);
    const auto b = daa_state(rotated, h2, b0);
    for (std::size_t k = 0; k < s.points(); ++k) {
        EXPECT_LE((a.states[k] - b.states[k]).cwiseAbs().maxCoeff(), 1e-8);
    }
}
