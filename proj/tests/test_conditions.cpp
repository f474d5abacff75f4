#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adiacheck/conditions.hpp"

using namespace adiacheck;

namespace {

constexpr double kPi = std::numbers::pi;

struct Analysis {
    SnapshotSpectrum spectrum;
    Holonomy ground;
    ConditionReport report;
};

Analysis run(const GammaParams& p, std::size_t steps, const ConditionOptions& opts = {})
{
    auto s = build_spectrum(gamma_hamiltonian(p), TimeGrid(0.0, p.total_time, steps));
    auto u = level_holonomy(s, 0);
    auto r = build_condition_report(s, u, opts);
    return {std::move(s), std::move(u), std::move(r)};
}

GammaParams gamma(double w, double theta, double b = 1.0)
{
    const double total = w > 0.0 ? 1.0 / w : 10.0 / b;
    return {b, w, theta, 1.0, total};
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

// Verdict of the practical sufficient check evaluated purely from the closed forms.
bool closed_form_sufficient(const GammaParams& p, const TimeGrid& grid, double eta, double cutoff)
{
    for (std::size_t k = 0; k < grid.points(); ++k) {
        const auto c = gamma_sufficient_closed_forms(p, grid.time(k));
        double floor = 2.0;
        for (double u : {c.u00, c.u01}) {
            if (u >= cutoff) {
                floor = std::min(floor, u);
            }
        }
        if (std::max(c.d0, c.d1) > eta * floor) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST(NecessaryMargin, DirectEvaluation)
{
    Matrix m(2, 2);
    m << Complex(0.0, -0.05), 0.0, 0.0, Complex(0.0, 0.05);
    EXPECT_DOUBLE_EQ(necessary_margin(m, 1.0, 1.0), 0.05);
    EXPECT_DOUBLE_EQ(necessary_margin(m, -0.5, 2.0), 0.2);
    EXPECT_THROW(necessary_margin(m, 0.0, 1.0), InvalidInput);
}

TEST(SufficientDn, DirectEvaluation)
{
    Matrix now(2, 2);
    now << 1.0, Complex(0.0, 2.0), -3.0, 0.5;
    Matrix start(2, 2);
    start << 0.25, 0.0, 0.0, Complex(0.0, -0.25);
    // column 1 of `now`: 2 + 0.5; start sum 0.5, times d_n = 2.
    EXPECT_DOUBLE_EQ(sufficient_dn(now, start, -2.0, 2, 1.0, 1), (2.5 + 2 * 0.5) / 2.0);
    EXPECT_THROW(sufficient_dn(now, start, 0.0, 2, 1.0, 0), InvalidInput);
    EXPECT_THROW(sufficient_dn(now, start, 1.0, 2, 1.0, 2), InvalidInput);
}

TEST(SufficientD0, TrapezoidAndErrors)
{
    const std::vector<double> f{0.0, 1.0, 2.0, 3.0};
    const auto d = sufficient_d0(f, 0.5, 2, 1.0);
    EXPECT_DOUBLE_EQ(d[0], 0.0);
    EXPECT_DOUBLE_EQ(d[3], 2.0 * 0.5 * (0.5 + 1.5 + 2.5));
    const std::vector<Matrix> blocks{Matrix::Identity(2, 2)};
    const std::vector<double> zero_gap{0.0};
    EXPECT_THROW(sufficient_d0_integrand(blocks, zero_gap), InvalidInput);
    const std::vector<double> two_gaps{1.0, 1.0};
    EXPECT_THROW(sufficient_d0_integrand(blocks, two_gaps), DimensionMismatch);
}

TEST(UFloor, SkipsNullEntries)
{
    Matrix u(2, 3);
    u << 0.0, 1e-7, Complex(0.0, 0.3), 1.0, 0.0, 0.0;
    EXPECT_DOUBLE_EQ(u_floor(u, 0, 1e-6), 0.3);
    EXPECT_DOUBLE_EQ(u_floor(u, 1, 1e-6), 1.0);
    const Matrix null_row = Matrix::Zero(1, 2);
    EXPECT_THROW(u_floor(null_row, 0, 1e-6), Error);
}

TEST(GammaMargins, NecessaryMatchesClosedForm)
{
    for (double theta : {0.3, 0.8, kPi / 3, kPi / 2}) {
        const auto p = gamma(0.1, theta);
        const auto a = run(p, 10000);
        const double expected = gamma_necessary_closed_form(p);
        for (double v : a.report.excited[0].necessary) {
            ASSERT_LE(rel(v, expected), 1e-5) << "theta = " << theta;
        }
        // The printed absolute-value form agrees on [0, pi/2].
        EXPECT_NEAR(gamma_necessary_printed_form(p), expected, 1e-15);
    }
    EXPECT_NEAR(gamma_necessary_closed_form(gamma(0.1, kPi / 2)), 0.05, 1e-15);
}

TEST(GammaMargins, SufficientMatchesClosedForms)
{
    for (double theta : {0.3, 0.8, kPi / 2}) {
        const auto p = gamma(0.1, theta);
        const auto a = run(p, 10000);
        const auto& r = a.report;
        for (std::size_t k = 1; k < r.grid.points(); ++k) {
            const auto c = gamma_sufficient_closed_forms(p, r.grid.time(k));
            ASSERT_LE(rel(r.d0[k], c.d0), 1e-5) << "k = " << k;
            for (const auto& series : r.excited[0].sufficient) {
                ASSERT_LE(rel(series[k], c.d1), 1e-5) << "k = " << k;
            }
        }
        EXPECT_EQ(r.d0[0], 0.0);
    }
    EXPECT_NEAR(gamma_sufficient_closed_forms(gamma(0.1, kPi / 2), 3.0).d1, 0.25, 1e-15);
}

TEST(GammaMargins, PolarAxisVanishes)
{
    const auto a = run(gamma(0.5, 0.0), 1000);
    EXPECT_EQ(a.report.peak_necessary(), 0.0);
    EXPECT_EQ(a.report.peak_d0(), 0.0);
    EXPECT_EQ(a.report.peak_dn(1), 0.0);
    EXPECT_TRUE(a.report.necessary_pass);
}

TEST(GammaMargins, D0IsNondecreasing)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uw(0.01, 2.0), uth(0.0, kPi);
    for (int trial = 0; trial < 8; ++trial) {
        const auto a = run(gamma(uw(rng), uth(rng)), 500);
        const auto& d0 = a.report.d0;
        for (std::size_t k = 1; k < d0.size(); ++k) {
            EXPECT_GE(d0[k], d0[k - 1]);
        }
    }
}

TEST(GammaMargins, DominanceOverNecessary)
{
    for (int i = 0; i <= 20; ++i) {
        const double theta = kPi / 2 * i / 20.0;
        const auto p = gamma(0.1, theta);
        const auto a = run(p, 2000);
        const auto& lvl = a.report.excited[0];
        for (std::size_t k = 0; k < lvl.necessary.size(); ++k) {
            for (const auto& series : lvl.sufficient) {
                EXPECT_GE(series[k], 5.0 * lvl.necessary[k] * (1.0 - 1e-6));
            }
        }
        const auto c = gamma_sufficient_closed_forms(p, 1.0);
        if (theta > 0.0) {
            EXPECT_GE(c.d1 / gamma_necessary_printed_form(p), 5.0 - 1e-12);
        }
    }
}

TEST(GammaMargins, ScalingInvariance)
{
    const auto a = run({1.0, 0.2, 0.9, 1.0, 5.0}, 1000);
    const auto b = run({3.0, 0.6, 0.9, 1.0, 5.0 / 3.0}, 1000);
    const auto& ra = a.report;
    const auto& rb = b.report;
    for (std::size_t k = 0; k < ra.grid.points(); ++k) {
        EXPECT_NEAR(ra.excited[0].necessary[k], rb.excited[0].necessary[k], 1e-9);
        EXPECT_NEAR(ra.d0[k], rb.d0[k], 1e-9);
        EXPECT_NEAR(ra.excited[0].sufficient[1][k], rb.excited[0].sufficient[1][k], 1e-9);
        EXPECT_NEAR(ra.u_floor[k], rb.u_floor[k], 1e-9);
    }
}

TEST(GammaMargins, PhaseRegaugingLeavesMarginsUnchanged)
{
    const auto base = run(gamma(0.1, 0.7), 2000);
    auto rotated = base.spectrum;
    auto diag_phase = [](double a, double b) {
        Matrix d = Matrix::Zero(2, 2);
        d(0, 0) = std::polar(1.0, a);
        d(1, 1) = std::polar(1.0, b);
        return d;
    };
    const std::vector<Matrix> phases{diag_phase(0.4, -2.0), diag_phase(1.3, 0.2)};
    for (std::size_t n = 0; n < 2; ++n) {
        for (auto& f : rotated.frames[n]) {
            f = (f * phases[n]).eval();
        }
    }
    const auto u = level_holonomy(rotated, 0, Matrix(phases[0].conjugate()));
    const auto r = build_condition_report(rotated, u);
    const auto& r0 = base.report;
    EXPECT_NEAR(r.peak_necessary(), r0.peak_necessary(), 1e-9);
    EXPECT_NEAR(r.peak_d0(), r0.peak_d0(), 1e-9);
    EXPECT_NEAR(r.peak_dn(1), r0.peak_dn(1), 1e-9);
    EXPECT_NEAR(r.min_u_floor(), r0.min_u_floor(), 1e-9);
}

TEST(GammaMargins, UnitaryRegaugingKeepsFrobeniusNormsAndVerdicts)
{
    std::mt19937 rng(21);
    std::normal_distribution<double> nd;
    auto random_unitary = [&] {
        Matrix g(2, 2);
        for (Eigen::Index i = 0; i < 4; ++i) {
            g(i) = Complex{nd(rng), nd(rng)};
        }
        return polar_unitary(g);
    };
    Matrix hadamard(2, 2);
    hadamard << 1.0, kI, kI, 1.0;
    hadamard /= std::sqrt(2.0);

    for (const auto& p : {gamma(0.01, kPi / 2), gamma(2.0, 1.0), gamma(0.2, 0.5)}) {
        const auto base = run(p, 2000);
        auto check = [&](const std::array<Matrix, 2>& v) {
            auto rotated = base.spectrum;
            for (std::size_t n = 0; n < 2; ++n) {
                for (auto& f : rotated.frames[n]) {
                    f = (f * v[n]).eval();
                }
            }
            for (std::size_t k = 0; k < rotated.points(); k += 97) {
                for (auto [n, m] : {std::pair{0ul, 1ul}, std::pair{1ul, 0ul}, std::pair{0ul, 0ul}}) {
                    EXPECT_NEAR(overlap_block(rotated, n, m, k).entries.norm(),
                                overlap_block(base.spectrum, n, m, k).entries.norm(), 1e-12);
                }
            }
            const auto u = level_holonomy(rotated, 0, Matrix(v[0].conjugate()));
            return build_condition_report(rotated, u);
        };
        check({random_unitary(), random_unitary()});
        const auto r = check({hadamard, hadamard});
        EXPECT_EQ(r.necessary_pass, base.report.necessary_pass);
        EXPECT_EQ(r.sufficient_pass, base.report.sufficient_pass);
    }
}

TEST(Verdicts, FastRotationFailsSufficientEverywhere)
{
    for (int i = 1; i <= 50; ++i) {
        const double theta = kPi * i / 51.0;
        const auto a = run(gamma(2.0, theta), 200);
        EXPECT_FALSE(a.report.sufficient_pass) << "theta = " << theta;
    }
}

TEST(Verdicts, EquatorialThreshold)
{
    // Condition reduces to 5w/(2b) <= eta with eta = 0.1, i.e. w <= 0.04 b.
    EXPECT_TRUE(run(gamma(0.035, kPi / 2), 2000).report.sufficient_pass);
    EXPECT_FALSE(run(gamma(0.045, kPi / 2), 2000).report.sufficient_pass);
    EXPECT_TRUE(run(gamma(0.07, kPi / 2, 2.0), 2000).report.sufficient_pass);
}

TEST(Verdicts, SlowTiltedFieldFollowsClosedFormFloor)
{
    // |U01| grows from zero, so the smallest non-null entry starts far below D1/eta.
    for (double w : {0.005, 0.01}) {
        const auto p = gamma(w, 1.0);
        const auto a = run(p, 2000);
        EXPECT_TRUE(a.report.necessary_pass);
        EXPECT_EQ(a.report.sufficient_pass, closed_form_sufficient(p, a.report.grid, 0.1, 1e-6));
        EXPECT_FALSE(a.report.sufficient_pass);
    }
}

TEST(Verdicts, NecessaryExamples)
{
    auto slow = run(gamma(0.01, 1.0), 1000).report;
    EXPECT_TRUE(slow.necessary_pass);
    EXPECT_NEAR(slow.peak_necessary(), 0.01 * std::sin(1.0) * (std::sin(1.0) + std::cos(1.0)) / 2.0, 1e-8);
    auto fast = run(gamma(2.0, kPi / 2), 1000).report;
    EXPECT_FALSE(fast.necessary_pass);
    EXPECT_NEAR(fast.peak_necessary(), 1.0, 1e-5);
    for (double w : {0.5, 2.0, 10.0}) {
        auto r = run(gamma(w, 0.0), 200).report;
        EXPECT_TRUE(r.necessary_pass);
        EXPECT_EQ(r.peak_necessary(), 0.0);
    }
}

TEST(Verdicts, PathologicalSmallTilt)
{
    const auto r = run(gamma(2.0, 0.01), 2000).report;
    EXPECT_TRUE(r.necessary_pass);
    EXPECT_FALSE(r.sufficient_pass);
}

TEST(ClosedForms, HolonomyMagnitudes)
{
    const auto eq = gamma_sufficient_closed_forms(gamma(0.3, kPi / 2), 7.0);
    EXPECT_NEAR(eq.u00, 1.0, 1e-15);
    EXPECT_NEAR(eq.u01, 0.0, 1e-15);
    const auto c = gamma_sufficient_closed_forms({1.0, 0.5, kPi / 3, 1.0, 1.0}, 2.0);
    EXPECT_NEAR(c.u01, std::sin(kPi / 3) * std::abs(std::sin(0.25)), 1e-15);
    EXPECT_NEAR(c.u00 * c.u00 + c.u01 * c.u01, 1.0, 1e-15);
}

TEST(Report, WarnsWhenGapVaries)
{
    const HamiltonianModel model(2, 1.0, [](double t) {
        Matrix h(2, 2);
        h << 0.0, 0.1, 0.1, 1.0 + t;
        return h;
    });
    const auto s = build_spectrum(model, TimeGrid(0.0, 1.0, 100));
    const auto r = build_condition_report(s, level_holonomy(s, 0));
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("gap"), std::string::npos);

    const auto steady = run(gamma(0.1, 1.0), 100).report;
    EXPECT_TRUE(steady.warnings.empty());
}

TEST(Report, RejectsInconsistentInputs)
{
    const auto a = run(gamma(0.1, 1.0), 100);
    ConditionOptions bad_row;
    bad_row.row = 2;
    EXPECT_THROW(build_condition_report(a.spectrum, a.ground, bad_row), InvalidInput);
    const auto other = run(gamma(0.1, 1.0), 50);
    EXPECT_THROW(build_condition_report(a.spectrum, other.ground), DimensionMismatch);
}
