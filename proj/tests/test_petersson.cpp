#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "twistl/petersson.hpp"

using namespace twistl;

namespace {

const std::vector<NewformEigendata>& forms(i64 q) {
    static std::map<i64, std::vector<NewformEigendata>> cache;
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, newform_eigendata(q, 60)).first;
    return it->second;
}

constexpr i64 kC = i64{1} << 15;

}  // namespace

TEST(Petersson, WeightsPositiveAndNormalised) {
    for (const i64 q : {11, 23, 37}) {
        const auto& f = forms(q);
        const auto w = solve_harmonic_weights(f, q, 2, default_probes(f.size(), q), kC);
        ASSERT_EQ(w.omega.size(), f.size());
        for (const double x : w.omega) EXPECT_GT(x, 0.0);
        // the (1,1) equation is one of the probes, so spectral(1,1) reproduces Delta(1,1)
        const double sum = std::accumulate(w.omega.begin(), w.omega.end(), 0.0);
        EXPECT_NEAR(spectral_side(w, f, 1, 1), sum, 1e-14);
        EXPECT_NEAR(sum, geometric_side(1, 1, q, 2, kC).value, 1e-10);
        EXPECT_LT(w.condition, 1e3);
    }
}

TEST(Petersson, ImpliedSymmetricSquareIsPlausible) {
    const auto& f = forms(11);
    const auto w = solve_harmonic_weights(f, 11, 2, {1}, kC);
    const double l1 = w.implied_symmetric_square().front();
    EXPECT_GT(l1, 0.3);
    EXPECT_LT(l1, 3.0);
}

TEST(Petersson, GeometricSideIsSymmetric) {
    const auto a = geometric_side(2, 7, 23, 2, 4096);
    const auto b = geometric_side(7, 2, 23, 2, 4096);
    EXPECT_NEAR(a.value, b.value, 1e-13);
}

TEST(Petersson, HeldOutResidualSmall) {
    for (const i64 q : {11, 23}) {
        const auto& f = forms(q);
        const auto v = verify_petersson(f, q, 2, default_probes(f.size(), q), {{2, 3}, {2, 5}, {3, 5}, {4, 9}}, kC);
        EXPECT_LT(v.max_residual, 5e-4) << q;
        for (const auto& r : v.held_out) EXPECT_LT(r.residual, 10.0 * r.empirical_tail + 1e-4) << r.m << "," << r.n;
    }
}

TEST(Petersson, ResidualShrinksWithTruncation) {
    const auto& f = forms(11);
    const std::vector<std::pair<i64, i64>> pairs{{2, 3}, {3, 5}};
    const auto coarse = verify_petersson(f, 11, 2, {1}, pairs, 1 << 11);
    const auto fine = verify_petersson(f, 11, 2, {1}, pairs, 1 << 16);
    EXPECT_LT(fine.max_residual, coarse.max_residual);
    EXPECT_LT(fine.max_residual, 1e-4);
}

TEST(Petersson, IndicesDivisibleByLevel) {
    const auto& f = forms(11);
    const auto w = solve_harmonic_weights(f, 11, 2, {1}, kC);
    EXPECT_LT(trace_residual(w, f, {{2, 11}, {11, 3}}, kC), 5e-4);
}

TEST(Petersson, TailBoundDecreases) {
    double prev = petersson_tail_bound(2, 3, 11, 2, 64);
    for (i64 C = 128; C <= (1 << 20); C *= 2) {
        const double t = petersson_tail_bound(2, 3, 11, 2, C);
        EXPECT_LT(t, prev);
        prev = t;
    }
}

TEST(Petersson, CertificationAtHigherWeight) {
    // weight 2 decays like C^(-1/2) log C, out of reach; weight 4 is quick
    EXPECT_THROW(certified_c_max(2, 3, 11, 2), TailBudgetExceeded);
    const i64 C = certified_c_max(2, 3, 11, 4);
    EXPECT_LT(petersson_tail_bound(2, 3, 11, 4, C), 1e-8);
    const auto g = geometric_side_certified(2, 3, 11, 4);
    EXPECT_LT(g.tail_bound, 1e-8);
    EXPECT_LT(g.empirical_tail, 1e-8);
}

TEST(Petersson, RejectsWeightsWithLevelOneForms) {
    EXPECT_EQ(level_one_cusp_dimension(10), 0);
    EXPECT_EQ(level_one_cusp_dimension(12), 1);
    EXPECT_EQ(level_one_cusp_dimension(24), 2);
    EXPECT_THROW(geometric_side(2, 3, 11, 12, 64), DomainError);
    EXPECT_THROW(geometric_side(2, 3, 12, 2, 64), DomainError);
}

TEST(Petersson, InputErrors) {
    const auto& f = forms(11);
    EXPECT_THROW(solve_harmonic_weights(f, 11, 2, {11}, 64), DomainError);
    EXPECT_THROW(solve_harmonic_weights(f, 11, 2, {1, 2}, 64), DomainError);
    EXPECT_THROW(solve_harmonic_weights(f, 23, 2, {1}, 64), DomainError);
    const auto w = solve_harmonic_weights(f, 11, 2, {1}, 256);
    EXPECT_THROW(trace_residual(w, f, {{1, 1}}), DomainError);
    EXPECT_THROW(geometric_side(2, 3, 11, 2, 1), DomainError);
}
