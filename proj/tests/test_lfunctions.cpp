#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "twistl/lfunctions.hpp"

using namespace twistl;

namespace {

const std::vector<NewformEigendata>& forms(i64 q) {
    static std::map<i64, std::vector<NewformEigendata>> cache;
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, newform_eigendata(q, 400)).first;
    return it->second;
}

}  // namespace

TEST(RootNumber, UnitModulusAndThirdBalance) {
    for (const i64 q : {11, 23}) {
        for (const i64 p : {3, 5, 7, 13}) {
            for (const auto& f : forms(q)) {
                for (const auto& chi : characters_mod(p)) {
                    const cplx eps = root_number(f, chi);
                    EXPECT_NEAR(std::abs(eps), 1.0, 1e-8) << q << " " << chi.label();
                    EXPECT_LT(root_number_consistency(f, chi), 1e-8) << q << " " << chi.label();
                    EXPECT_LT(std::abs(eps - root_number_candidate(f, chi)), 1e-8) << q << " " << chi.label();
                }
            }
        }
    }
}

TEST(RootNumber, ConjugateCharacter) {
    const auto& f = forms(11)[0];
    for (const auto& chi : characters_mod(7)) {
        const cplx a = root_number(f, chi), b = root_number(f, chi.conj());
        EXPECT_LT(std::abs(a * b - 1.0), 1e-8) << chi.label();
        EXPECT_LT(std::abs(b - std::conj(a)), 1e-8) << chi.label();
    }
}

TEST(RootNumber, EqualBalanceIsSingular) {
    EXPECT_THROW(root_number(forms(11)[0], characters_mod(5)[0], 1.0, 1.0), SystemSingular);
}

TEST(CentralValue, RegressionAtLevel11) {
    const auto& f = forms(11)[0];
    const auto quad = central_value(f, parse_character("3:1"));
    EXPECT_NEAR(quad.value.real(), 1.68449633297528, 1e-10);
    EXPECT_NEAR(quad.value.imag(), 0.0, 1e-10);
    const auto c = central_value(f, parse_character("5:1"));
    EXPECT_NEAR(c.value.real(), 0.685976714589712, 1e-10);
    EXPECT_NEAR(c.value.imag(), -1.10993363969612, 1e-10);
    EXPECT_LT(c.error_estimate, 1e-10);
}

TEST(CentralValue, LongerSumAgrees) {
    for (const i64 q : {11, 23})
        for (const auto& f : forms(q))
            for (const auto& chi : characters_mod(7)) {
                const auto a = central_value(f, chi, 1.0), b = central_value(f, chi, 2.0);
                EXPECT_GT(b.afe_length, a.afe_length);
                EXPECT_LT(std::abs(a.value - b.value), 1e-9) << q << " " << chi.label();
            }
}

TEST(CentralValue, ConjugateCharacterGivesConjugateValue) {
    for (const auto& f : forms(23))
        for (const auto& chi : characters_mod(11)) {
            const cplx a = central_value(f, chi).value, b = central_value(f, chi.conj()).value;
            EXPECT_LT(std::abs(b - std::conj(a)), 1e-9) << chi.label();
        }
}

TEST(CentralValue, RejectsBadInputs) {
    const auto& f = forms(11)[0];
    EXPECT_THROW(central_value(f, parse_character("11:1")), DomainError);
    EXPECT_THROW(central_value(f, parse_character("5:1"), 0.5), DomainError);
    const auto shortf = newform_eigendata(11, 40)[0];
    EXPECT_THROW(central_value(shortf, parse_character("13:1")), EigendataTooShort);
}

TEST(Moment, NaturalIsSumOfSquares) {
    const auto& fs = forms(23);
    const auto chi = parse_character("7:2");
    double expect = 0.0;
    for (const auto& f : fs) expect += std::norm(central_value(f, chi).value);
    const auto m = twisted_moment(fs, chi, Weighting::natural);
    EXPECT_NEAR(m.moment, expect, 1e-12);
    EXPECT_EQ(m.dim, 2u);
    EXPECT_GE(m.moment, 0.0);
}

TEST(Moment, HarmonicNeedsWeights) {
    EXPECT_THROW(twisted_moment(forms(11), parse_character("5:1"), Weighting::harmonic), DomainError);
}

TEST(DualMoment, MatchesPeterssonExpansion) {
    const auto& fs = forms(11);
    const auto w = solve_harmonic_weights(fs, 11, 2, {1}, i64{1} << 16);
    const auto chi = parse_character("3:1");
    const auto coarse = dual_moment_check(fs, w, chi, 10.0, dyadic_afe_cutoff(2), 2000);
    const auto fine = dual_moment_check(fs, w, chi, 10.0, dyadic_afe_cutoff(2), 20000);
    EXPECT_LT(fine.residual, 1e-4 * std::max(1.0, fine.spectral));
    EXPECT_LE(fine.residual, coarse.residual);
    EXPECT_GT(fine.diagonal, 0.0);
}

TEST(DualMoment, DiagonalOnlyWhenKloostermanTermsVanish) {
    // with a single n in the support the expansion is V(1)^2 Delta(1,1) / N
    const auto& fs = forms(11);
    const auto w = solve_harmonic_weights(fs, 11, 2, {1}, 4096);
    const auto cutoff = [](double x) { return (x > 0.9 && x < 1.1) ? 1.0 : 0.0; };
    const auto r = dual_moment_check(fs, w, parse_character("3:1"), 1.0, cutoff, 4096);
    EXPECT_NEAR(r.diagonal, 1.0, 1e-15);
    EXPECT_NEAR(r.spectral, w.omega[0], 1e-15);
    EXPECT_NEAR(r.geometric, geometric_side(1, 1, 11, 2, 4096).value, 1e-12);
    EXPECT_LT(r.residual, 1e-9);
}

TEST(DualMoment, CertificationFailsAtWeightTwo) {
    const auto& fs = forms(11);
    const auto w = solve_harmonic_weights(fs, 11, 2, {1}, 4096);
    EXPECT_THROW(dual_moment_check(fs, w, parse_character("3:1"), 10.0, dyadic_afe_cutoff(2), 4096, 1e-8),
                 TailBudgetExceeded);
}
