#include <gtest/gtest.h>

#include <cmath>

#include "twistl/oscillatory.hpp"

using namespace twistl;

namespace {

OscillatorySpec in_window(double Y, i64 m1 = 101) {
    return {Y * 11.0, 1, 11, 101, m1, 1.0, +1, OscillatoryKind::v2};
}

}  // namespace

TEST(StationaryPhase, RelativeError) {
    const auto V = Cutoff2D::product_bump();
    for (const double Y : {100.0, 1000.0}) {
        const auto r = stationary_phase_compare(in_window(Y), V);
        EXPECT_LT(r.relative_error, 0.1) << Y;
        EXPECT_NEAR(r.x0, 1.0, 1e-12);
    }
}

TEST(StationaryPhase, PointLocation) {
    const auto V = Cutoff2D::product_bump();
    for (const i64 m1 : {80, 101, 150}) {
        auto s = in_window(300.0, m1);
        s.y = 1.3;
        const auto x0 = stationary_point_numeric(s, V);
        ASSERT_TRUE(x0.has_value());
        EXPECT_NEAR(*x0, 101.0 * 101.0 * 1.3 / double(m1 * m1), 1e-6);
    }
}

TEST(StationaryPhase, OutsideTheWindow) {
    const auto V = Cutoff2D::product_bump();
    const double Y = 100.0;
    const double scale = std::abs(oscillatory_V_integral(in_window(Y), V));
    for (const i64 m1 : {-101, -3, 3, 10100}) {
        const double v = std::abs(oscillatory_V_integral(in_window(Y, m1), V));
        EXPECT_LT(v, 1e-6 * scale) << m1;
        EXPECT_LT(v, 1e-6 * std::sqrt(1.0 / Y)) << m1;
    }
    EXPECT_THROW(stationary_phase_compare(in_window(Y, -101), V), StationaryPointOutsideSupport);
}

TEST(StationaryPhase, MinusSignMirrors) {
    const auto V = Cutoff2D::product_bump();
    auto plus = in_window(100.0);
    auto minus = plus;
    minus.sign = -1;
    minus.m1 = -plus.m1;
    const auto a = oscillatory_V_integral(plus, V), b = oscillatory_V_integral(minus, V);
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-10);
}

TEST(OscillatoryV1, ZeroFrequencyIsTheMass) {
    const auto V = Cutoff2D::product_bump();
    OscillatorySpec s{50.0, 1, 5, 7, 0, 1.0, +1, OscillatoryKind::v1};
    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    const double mass = integrate<double>([&](double x) { return V(x, 1.0); }, 0.25, 4.0, opt).value;
    EXPECT_NEAR(oscillatory_V_integral(s, V).real(), mass, 1e-9);
    EXPECT_NEAR(oscillatory_V_integral(s, V).imag(), 0.0, 1e-9);
    EXPECT_GT(mass, 0.1);
}

TEST(PoissonSummation, Gaussian) {
    const auto r = numeric_poisson_check(SchwartzFunction::gaussian(), 0, 1, 10);
    EXPECT_NEAR(r.direct.real(), 1.0864348112, 1e-9);
    EXPECT_LT(r.residual, 1e-10);
}

TEST(PoissonSummation, Periodicity) {
    const auto psi = SchwartzFunction::gaussian();
    for (i64 a = 0; a < 3; ++a) {
        const auto x = numeric_poisson_check(psi, a, 3, 30), y = numeric_poisson_check(psi, a + 3, 3, 30);
        EXPECT_LT(std::abs(x.direct - y.direct) + std::abs(x.dual - y.dual), 1e-14);
    }
}

TEST(PoissonSummation, CompactBump) {
    EXPECT_LT(numeric_poisson_check(SchwartzFunction::bump(0.3, 2.5), 1, 3, 200).residual, 1e-8);
}

TEST(PoissonSummation, WrongDenominatorFails) {
    // dual variable m/q instead of m/r breaks the identity
    EXPECT_GT(numeric_poisson_check(SchwartzFunction::gaussian(), 1, 3, 30, 5).residual, 1e-3);
}

TEST(PoissonSummation, TruncationGuard) {
    EXPECT_THROW(numeric_poisson_check(SchwartzFunction::gaussian(), 0, 1, 2), TruncationTooSmall);
}
